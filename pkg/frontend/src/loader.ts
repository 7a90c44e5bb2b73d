/**
 * Loaders for the simulator's documented CSV/JSON schemas.
 *
 * Every loader validates the documented column layout before touching the
 * numbers; violations raise SchemaError naming the offending column so a
 * mismatched producer/consumer pair fails loudly.
 */

import { readFileSync } from "fs";

export class SchemaError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "SchemaError";
  }
}

export interface Table {
  columns: string[];
  /** column-major numeric data */
  data: number[][];
}

export interface Extrema {
  min: number;
  max: number;
}

function readLines(path: string): string[] {
  let text: string;
  try {
    text = readFileSync(path, "utf8");
  } catch (err) {
    throw new SchemaError(`cannot read ${path}: ${(err as Error).message}`);
  }
  const lines = text.split("\n").filter((l) => l.length > 0);
  if (lines.length === 0) {
    throw new SchemaError(`${path}: file is empty (no header row)`);
  }
  return lines;
}

/** Load a CSV whose header must equal `expected` exactly. */
export function loadCsv(path: string, expected: string[]): Table {
  const lines = readLines(path);
  const header = lines[0].split(",");
  for (const column of expected) {
    if (!header.includes(column)) {
      throw new SchemaError(
        `${path}: missing column '${column}' (header: ${lines[0]})`,
      );
    }
  }
  for (const column of header) {
    if (!expected.includes(column)) {
      throw new SchemaError(`${path}: unexpected column '${column}'`);
    }
  }
  if (lines.length < 2) {
    throw new SchemaError(`${path}: no data rows`);
  }
  const index = expected.map((c) => header.indexOf(c));
  const data: number[][] = expected.map(() => new Array(lines.length - 1));
  for (let r = 1; r < lines.length; r++) {
    const parts = lines[r].split(",");
    if (parts.length !== header.length) {
      throw new SchemaError(
        `${path}: row ${r} has ${parts.length} fields, expected ${header.length}`,
      );
    }
    for (let c = 0; c < expected.length; c++) {
      const value = Number(parts[index[c]]);
      if (!Number.isFinite(value)) {
        throw new SchemaError(
          `${path}: row ${r}, column '${expected[c]}': not a number (${parts[index[c]]})`,
        );
      }
      data[c][r - 1] = value;
    }
  }
  return { columns: expected, data };
}

export function column(table: Table, name: string): number[] {
  const i = table.columns.indexOf(name);
  if (i < 0) {
    throw new SchemaError(`no column '${name}'`);
  }
  return table.data[i];
}

export function extrema(values: number[]): Extrema {
  let min = Infinity;
  let max = -Infinity;
  for (const v of values) {
    if (v < min) min = v;
    if (v > max) max = v;
  }
  return { min, max };
}

export interface Spectrogram {
  omegaEv: number[];
  zCm: number[];
  /** amplitude[omega index][z index] */
  amplitude: number[][];
}

/** Matrix CSV: header row 'omega_ev,<z values...>', one row per frequency. */
export function loadSpectrogram(path: string): Spectrogram {
  const lines = readLines(path);
  const header = lines[0].split(",");
  if (header[0] !== "omega_ev") {
    throw new SchemaError(
      `${path}: first header cell must be 'omega_ev', got '${header[0]}'`,
    );
  }
  const zCm = header.slice(1).map(Number);
  if (zCm.some((v) => !Number.isFinite(v))) {
    throw new SchemaError(`${path}: z axis header contains non-numeric values`);
  }
  const omegaEv: number[] = [];
  const amplitude: number[][] = [];
  for (let r = 1; r < lines.length; r++) {
    const parts = lines[r].split(",").map(Number);
    if (parts.length !== header.length) {
      throw new SchemaError(
        `${path}: row ${r} has ${parts.length} fields, expected ${header.length}`,
      );
    }
    if (parts.some((v) => !Number.isFinite(v))) {
      throw new SchemaError(`${path}: row ${r} contains non-numeric values`);
    }
    omegaEv.push(parts[0]);
    amplitude.push(parts.slice(1));
  }
  if (amplitude.length === 0) {
    throw new SchemaError(`${path}: no data rows`);
  }
  return { omegaEv, zCm, amplitude };
}

export interface MemoryRecord {
  efficiency: number;
  storageTimeFs: number | null;
  tAFs: number | null;
  tBFs: number | null;
  leakageFraction: number;
  timeBandwidthProduct: number | null;
  transmittedFraction: number;
}

export function loadMemoryJson(path: string): MemoryRecord {
  let raw: Record<string, unknown>;
  try {
    raw = JSON.parse(readFileSync(path, "utf8"));
  } catch (err) {
    throw new SchemaError(`${path}: ${(err as Error).message}`);
  }
  const need = [
    "efficiency",
    "storage_time_fs",
    "t_a_fs",
    "t_b_fs",
    "leakage_fraction",
    "time_bandwidth_product",
    "transmitted_fraction",
  ];
  for (const key of need) {
    if (!(key in raw)) {
      throw new SchemaError(`${path}: missing field '${key}'`);
    }
  }
  return {
    efficiency: raw["efficiency"] as number,
    storageTimeFs: raw["storage_time_fs"] as number | null,
    tAFs: raw["t_a_fs"] as number | null,
    tBFs: raw["t_b_fs"] as number | null,
    leakageFraction: raw["leakage_fraction"] as number,
    timeBandwidthProduct: raw["time_bandwidth_product"] as number | null,
    transmittedFraction: raw["transmitted_fraction"] as number,
  };
}

export const ALIGNMENT_COLUMNS = ["t_fs", "cos2_expectation"];
export const INDEX_COLUMNS = ["t_fs", "n_minus_1"];
export const FIELD_COLUMNS = ["tau_fs", "re_E", "im_E"];
export const SPECTRUM_COLUMNS = ["omega_ev", "amplitude"];
export const SWEEP_COLUMNS = ["optical_depth", "efficiency"];

export function fieldAmplitude(table: Table): number[] {
  const re = column(table, "re_E");
  const im = column(table, "im_E");
  return re.map((r, i) => Math.hypot(r, im[i]));
}
