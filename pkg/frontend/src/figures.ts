/**
 * Figure builders: each consumes a directory of simulator outputs and
 * returns the SVG plus the data extrema it plotted (so tests can verify
 * rendering never alters the data).
 */

import { join } from "path";
import {
  ALIGNMENT_COLUMNS,
  column,
  Extrema,
  extrema,
  FIELD_COLUMNS,
  fieldAmplitude,
  INDEX_COLUMNS,
  loadCsv,
  loadMemoryJson,
  loadSpectrogram,
  SchemaError,
  SWEEP_COLUMNS,
} from "./loader.js";
import { document, Panel, renderHeatmap, renderPanel, PANEL_SIZE } from "./svg.js";
import { readdirSync } from "fs";

export interface FigureResult {
  svg: string;
  extrema: Record<string, Extrema>;
}

const FS_PER_PS = 1000;

/** Index-trace panel: dn(t) = n(t) - 1 across the revival window. */
export function buildFig2(dir: string): FigureResult {
  const index = loadCsv(join(dir, "index.csv"), INDEX_COLUMNS);
  const tPs = column(index, "t_fs").map((v) => v / FS_PER_PS);
  const dn = column(index, "n_minus_1");
  const panel: Panel = {
    title: "Refractive index dynamics from impulsive alignment",
    xLabel: "time (ps)",
    yLabel: "Δn = n - 1",
    series: [{ x: tPs, y: dn, color: "#1f4e9c", width: 1.2 }],
  };
  return {
    svg: document([renderPanel(panel)], 1),
    extrema: { n_minus_1: extrema(dn), t_ps: extrema(tPs) },
  };
}

function fieldFiles(dir: string): string[] {
  const names = readdirSync(dir)
    .filter((n) => /^field_z\d+\.csv$/.test(n))
    .sort();
  if (names.length < 2) {
    throw new SchemaError(`${dir}: need at least two field_z*.csv snapshots`);
  }
  return names;
}

/** Storage plot: |E(tau)| snapshots through the medium plus the
 *  frequency-vs-distance map showing the scan across the resonance. */
export function buildFig3(dir: string): FigureResult {
  const names = fieldFiles(dir);
  const series = [];
  let ampAll: Extrema = { min: Infinity, max: -Infinity };
  for (let i = 0; i < names.length; i++) {
    const table = loadCsv(join(dir, names[i]), FIELD_COLUMNS);
    const tau = column(table, "tau_fs").map((v) => v / FS_PER_PS);
    const amp = fieldAmplitude(table);
    const e = extrema(amp);
    ampAll = {
      min: Math.min(ampAll.min, e.min),
      max: Math.max(ampAll.max, e.max),
    };
    const shade = Math.round(200 - (170 * i) / (names.length - 1));
    series.push({
      x: tau,
      y: amp.map((a) => a + i * 0.0),
      color: `rgb(${shade},${Math.round(shade * 0.45)},${255 - shade})`,
      width: 1.0,
      label:
        i === 0 ? "entrance" : i === names.length - 1 ? "exit" : undefined,
    });
  }
  const panelA: Panel = {
    title: "Signal amplitude |E(τ)| through the medium",
    xLabel: "τ (ps)",
    yLabel: "|E| (a.u.)",
    series,
  };
  const gram = loadSpectrogram(join(dir, "spectrogram.csv"));
  const panelB = renderHeatmap(
    {
      title: "Spectral amplitude vs propagation distance",
      xLabel: "z (cm)",
      yLabel: "ħω (eV)",
      x: gram.zCm,
      y: gram.omegaEv,
      values: gram.amplitude,
    },
    0,
    PANEL_SIZE.height,
  );
  return {
    svg: document([renderPanel(panelA), panelB], 2),
    extrema: {
      amplitude: ampAll,
      omega_ev: extrema(gram.omegaEv),
      z_cm: extrema(gram.zCm),
    },
  };
}

const FIG4_PANELS: [string, string][] = [
  ["align_pump_only", "(a) pump only"],
  ["align_attenuated", "(b) revivals attenuated by a control pulse"],
  ["align_regenerated", "(c) revivals regenerated by a final control"],
];

/** Revival-control panels from three alignment traces. */
export function buildFig4(dir: string): FigureResult {
  const panels: string[] = [];
  let all: Extrema = { min: Infinity, max: -Infinity };
  FIG4_PANELS.forEach(([sub, title], i) => {
    const table = loadCsv(join(dir, sub, "alignment.csv"), ALIGNMENT_COLUMNS);
    const tPs = column(table, "t_fs").map((v) => v / FS_PER_PS);
    const cos2 = column(table, "cos2_expectation");
    const e = extrema(cos2);
    all = { min: Math.min(all.min, e.min), max: Math.max(all.max, e.max) };
    panels.push(
      renderPanel(
        {
          title,
          xLabel: "time (ps)",
          yLabel: "⟨cos²θ⟩",
          series: [{ x: tPs, y: cos2, color: "#8a2b0d", width: 1.1 }],
        },
        0,
        i * PANEL_SIZE.height,
      ),
    );
  });
  return {
    svg: document(panels, FIG4_PANELS.length),
    extrema: { cos2_expectation: all },
  };
}

/** Read-time panels: input and output fields with the detected emission
 *  window and the measured efficiency. */
export function buildFig5(dir: string): FigureResult {
  const subs = readdirSync(dir)
    .filter((n) => /^read\d+$/.test(n))
    .sort();
  if (subs.length === 0) {
    throw new SchemaError(`${dir}: no read*/ run directories found`);
  }
  const panels: string[] = [];
  let ampAll: Extrema = { min: Infinity, max: -Infinity };
  subs.forEach((sub, i) => {
    const runDir = join(dir, sub);
    const names = fieldFiles(runDir);
    const input = loadCsv(join(runDir, names[0]), FIELD_COLUMNS);
    const output = loadCsv(join(runDir, names[names.length - 1]), FIELD_COLUMNS);
    const record = loadMemoryJson(join(runDir, "memory.json"));
    const tauIn = column(input, "tau_fs").map((v) => v / FS_PER_PS);
    const ampIn = fieldAmplitude(input);
    const tauOut = column(output, "tau_fs").map((v) => v / FS_PER_PS);
    const ampOut = fieldAmplitude(output);
    for (const e of [extrema(ampIn), extrema(ampOut)]) {
      ampAll = {
        min: Math.min(ampAll.min, e.min),
        max: Math.max(ampAll.max, e.max),
      };
    }
    const vlines = [];
    if (record.tAFs !== null && record.tBFs !== null) {
      vlines.push(
        { x: record.tAFs / FS_PER_PS, color: "#444", dash: "4,3" },
        { x: record.tBFs / FS_PER_PS, color: "#444", dash: "4,3" },
      );
    }
    const eff = (100 * record.efficiency).toFixed(1);
    panels.push(
      renderPanel(
        {
          title: `${sub}: stored and re-emitted signal (${eff}%)`,
          xLabel: "τ (ps)",
          yLabel: "|E| (a.u.)",
          series: [
            { x: tauIn, y: ampIn, color: "#c0392b", width: 1.1, label: "input" },
            { x: tauOut, y: ampOut, color: "#1e8449", width: 1.1, label: "output" },
          ],
          vlines,
        },
        0,
        i * PANEL_SIZE.height,
      ),
    );
  });
  return { svg: document(panels, subs.length), extrema: { amplitude: ampAll } };
}

/** Memory efficiency as a function of optical depth. */
export function buildFig6(dir: string): FigureResult {
  const sweep = loadCsv(join(dir, "sweep.csv"), SWEEP_COLUMNS);
  const depth = column(sweep, "optical_depth");
  const eff = column(sweep, "efficiency");
  const panel: Panel = {
    title: "Memory efficiency vs optical depth",
    xLabel: "optical depth",
    yLabel: "efficiency",
    series: [{ x: depth, y: eff, color: "#1f4e9c", width: 1.5, markers: true }],
    yRange: [0, 1.05],
  };
  return {
    svg: document([renderPanel(panel)], 1),
    extrema: { optical_depth: extrema(depth), efficiency: extrema(eff) },
  };
}
