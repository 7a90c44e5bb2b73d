/**
 * Minimal deterministic SVG plotting: line panels and heatmaps with
 * labeled, ticked axes.  No canvas or DOM dependencies, so byte-identical
 * output for identical inputs.
 */

export interface Series {
  x: number[];
  y: number[];
  color: string;
  width?: number;
  dash?: string;
  label?: string;
  markers?: boolean;
}

export interface VLine {
  x: number;
  color: string;
  dash?: string;
}

export interface Panel {
  title: string;
  xLabel: string;
  yLabel: string;
  series: Series[];
  vlines?: VLine[];
  annotations?: { x: number; y: number; text: string }[];
  xRange?: [number, number];
  yRange?: [number, number];
}

const PANEL_W = 560;
const PANEL_H = 260;
const MARGIN = { left: 70, right: 16, top: 28, bottom: 44 };

function fmt(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) return v.toExponential(2);
  return Number(v.toPrecision(4)).toString();
}

function niceTicks(lo: number, hi: number, n = 5): number[] {
  if (!(hi > lo)) return [lo];
  const span = hi - lo;
  const step0 = span / n;
  const mag = Math.pow(10, Math.floor(Math.log10(step0)));
  const candidates = [1, 2, 2.5, 5, 10].map((m) => m * mag);
  const step = candidates.find((s) => span / s <= n + 1) ?? candidates[4];
  const start = Math.ceil(lo / step) * step;
  const ticks: number[] = [];
  for (let t = start; t <= hi + 1e-12 * span; t += step) {
    ticks.push(Math.abs(t) < 1e-12 * span ? 0 : t);
  }
  return ticks;
}

function dataRange(series: Series[], axis: "x" | "y"): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const s of series) {
    for (const v of s[axis]) {
      if (v < lo) lo = v;
      if (v > hi) hi = v;
    }
  }
  if (!(hi > lo)) {
    hi = lo + 1;
  }
  return [lo, hi];
}

export function renderPanel(panel: Panel, xOff = 0, yOff = 0): string {
  const [x0, x1] = panel.xRange ?? dataRange(panel.series, "x");
  let [y0, y1] = panel.yRange ?? dataRange(panel.series, "y");
  const pad = 0.06 * (y1 - y0 || 1);
  y0 -= pad;
  y1 += pad;
  const plotW = PANEL_W - MARGIN.left - MARGIN.right;
  const plotH = PANEL_H - MARGIN.top - MARGIN.bottom;
  const sx = (v: number) =>
    MARGIN.left + ((v - x0) / (x1 - x0)) * plotW + xOff;
  const sy = (v: number) =>
    MARGIN.top + (1 - (v - y0) / (y1 - y0)) * plotH + yOff;

  const parts: string[] = [];
  parts.push(
    `<rect x="${MARGIN.left + xOff}" y="${MARGIN.top + yOff}" width="${plotW}" height="${plotH}" fill="none" stroke="#333" stroke-width="1"/>`,
  );
  parts.push(
    `<text x="${xOff + PANEL_W / 2}" y="${yOff + 16}" text-anchor="middle" font-size="13" font-family="sans-serif">${panel.title}</text>`,
  );
  for (const t of niceTicks(x0, x1)) {
    const px = sx(t);
    parts.push(
      `<line x1="${px.toFixed(2)}" y1="${sy(y0).toFixed(2)}" x2="${px.toFixed(2)}" y2="${(sy(y0) + 4).toFixed(2)}" stroke="#333"/>`,
      `<text x="${px.toFixed(2)}" y="${(sy(y0) + 17).toFixed(2)}" text-anchor="middle" font-size="10" font-family="sans-serif">${fmt(t)}</text>`,
    );
  }
  for (const t of niceTicks(y0, y1)) {
    const py = sy(t);
    parts.push(
      `<line x1="${(MARGIN.left + xOff - 4).toFixed(2)}" y1="${py.toFixed(2)}" x2="${(MARGIN.left + xOff).toFixed(2)}" y2="${py.toFixed(2)}" stroke="#333"/>`,
      `<text x="${(MARGIN.left + xOff - 7).toFixed(2)}" y="${(py + 3).toFixed(2)}" text-anchor="end" font-size="10" font-family="sans-serif">${fmt(t)}</text>`,
    );
  }
  parts.push(
    `<text x="${xOff + MARGIN.left + plotW / 2}" y="${yOff + PANEL_H - 8}" text-anchor="middle" font-size="12" font-family="sans-serif">${panel.xLabel}</text>`,
    `<text x="${xOff + 16}" y="${yOff + MARGIN.top + plotH / 2}" text-anchor="middle" font-size="12" font-family="sans-serif" transform="rotate(-90 ${xOff + 16} ${yOff + MARGIN.top + plotH / 2})">${panel.yLabel}</text>`,
  );
  for (const vl of panel.vlines ?? []) {
    if (vl.x < x0 || vl.x > x1) continue;
    parts.push(
      `<line x1="${sx(vl.x).toFixed(2)}" y1="${sy(y1).toFixed(2)}" x2="${sx(vl.x).toFixed(2)}" y2="${sy(y0).toFixed(2)}" stroke="${vl.color}" stroke-width="1"${vl.dash ? ` stroke-dasharray="${vl.dash}"` : ""}/>`,
    );
  }
  for (const s of panel.series) {
    const pts: string[] = [];
    for (let i = 0; i < s.x.length; i++) {
      if (s.x[i] < x0 || s.x[i] > x1) continue;
      pts.push(`${sx(s.x[i]).toFixed(2)},${sy(s.y[i]).toFixed(2)}`);
    }
    parts.push(
      `<polyline points="${pts.join(" ")}" fill="none" stroke="${s.color}" stroke-width="${s.width ?? 1.3}"${s.dash ? ` stroke-dasharray="${s.dash}"` : ""}/>`,
    );
    if (s.markers) {
      for (const p of pts) {
        const [px, py] = p.split(",");
        parts.push(`<circle cx="${px}" cy="${py}" r="3" fill="${s.color}"/>`);
      }
    }
  }
  let legendY = yOff + MARGIN.top + 14;
  for (const s of panel.series) {
    if (!s.label) continue;
    const lx = xOff + MARGIN.left + plotW - 130;
    parts.push(
      `<line x1="${lx}" y1="${legendY - 4}" x2="${lx + 22}" y2="${legendY - 4}" stroke="${s.color}" stroke-width="2"/>`,
      `<text x="${lx + 27}" y="${legendY}" font-size="10" font-family="sans-serif">${s.label}</text>`,
    );
    legendY += 14;
  }
  for (const a of panel.annotations ?? []) {
    parts.push(
      `<text x="${sx(a.x).toFixed(2)}" y="${sy(a.y).toFixed(2)}" font-size="11" font-family="sans-serif">${a.text}</text>`,
    );
  }
  return parts.join("\n");
}

export interface Heatmap {
  title: string;
  xLabel: string;
  yLabel: string;
  x: number[];
  y: number[];
  /** values[y index][x index], plotted with a fixed monotone colormap */
  values: number[][];
}

function colormap(t: number): string {
  // dark blue -> teal -> yellow, three-stop linear interpolation
  const stops: [number, number, number][] = [
    [13, 8, 135],
    [33, 145, 140],
    [253, 231, 37],
  ];
  const s = Math.min(Math.max(t, 0), 1) * (stops.length - 1);
  const i = Math.min(Math.floor(s), stops.length - 2);
  const f = s - i;
  const c = stops[i].map((a, k) => Math.round(a + f * (stops[i + 1][k] - a)));
  return `rgb(${c[0]},${c[1]},${c[2]})`;
}

export function renderHeatmap(map: Heatmap, xOff = 0, yOff = 0): string {
  const plotW = PANEL_W - MARGIN.left - MARGIN.right;
  const plotH = PANEL_H - MARGIN.top - MARGIN.bottom;
  const nx = map.x.length;
  const ny = map.y.length;
  let vmax = -Infinity;
  for (const row of map.values) for (const v of row) if (v > vmax) vmax = v;
  if (!(vmax > 0)) vmax = 1;

  const parts: string[] = [];
  const cellW = plotW / nx;
  const cellH = plotH / ny;
  for (let j = 0; j < ny; j++) {
    for (let i = 0; i < nx; i++) {
      const v = map.values[j][i] / vmax;
      const px = MARGIN.left + xOff + i * cellW;
      const py = MARGIN.top + yOff + (ny - 1 - j) * cellH;
      parts.push(
        `<rect x="${px.toFixed(2)}" y="${py.toFixed(2)}" width="${(cellW + 0.5).toFixed(2)}" height="${(cellH + 0.5).toFixed(2)}" fill="${colormap(v)}"/>`,
      );
    }
  }
  const x0 = map.x[0];
  const x1 = map.x[nx - 1];
  const y0 = map.y[0];
  const y1 = map.y[ny - 1];
  const sx = (v: number) => MARGIN.left + xOff + ((v - x0) / (x1 - x0 || 1)) * plotW;
  const sy = (v: number) =>
    MARGIN.top + yOff + (1 - (v - y0) / (y1 - y0 || 1)) * plotH;
  parts.push(
    `<rect x="${MARGIN.left + xOff}" y="${MARGIN.top + yOff}" width="${plotW}" height="${plotH}" fill="none" stroke="#333"/>`,
    `<text x="${xOff + PANEL_W / 2}" y="${yOff + 16}" text-anchor="middle" font-size="13" font-family="sans-serif">${map.title}</text>`,
  );
  for (const t of niceTicks(x0, x1)) {
    parts.push(
      `<text x="${sx(t).toFixed(2)}" y="${(MARGIN.top + yOff + plotH + 15).toFixed(2)}" text-anchor="middle" font-size="10" font-family="sans-serif">${fmt(t)}</text>`,
    );
  }
  for (const t of niceTicks(y0, y1)) {
    parts.push(
      `<text x="${(MARGIN.left + xOff - 7).toFixed(2)}" y="${(sy(t) + 3).toFixed(2)}" text-anchor="end" font-size="10" font-family="sans-serif">${fmt(t)}</text>`,
    );
  }
  parts.push(
    `<text x="${xOff + MARGIN.left + plotW / 2}" y="${yOff + PANEL_H - 8}" text-anchor="middle" font-size="12" font-family="sans-serif">${map.xLabel}</text>`,
    `<text x="${xOff + 16}" y="${yOff + MARGIN.top + plotH / 2}" text-anchor="middle" font-size="12" font-family="sans-serif" transform="rotate(-90 ${xOff + 16} ${yOff + MARGIN.top + plotH / 2})">${map.yLabel}</text>`,
  );
  return parts.join("\n");
}

export function document(content: string[], rows: number): string {
  const height = rows * PANEL_H + 10;
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${PANEL_W + 10}" height="${height}" viewBox="0 0 ${PANEL_W + 10} ${height}">`,
    `<rect width="100%" height="100%" fill="white"/>`,
    ...content,
    `</svg>`,
    ``,
  ].join("\n");
}

export const PANEL_SIZE = { width: PANEL_W, height: PANEL_H };
