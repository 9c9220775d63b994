/**
 * The four figure kinds. Each builder draws onto a Surface so the same code
 * emits SVG or PNG; nothing time- or machine-dependent is embedded, so
 * rerenders of the same inputs are byte-identical.
 */

import { CaseFile, CaseRow, RateRow } from "./csv";
import { logLogSlope } from "./fit";
import { formatTick, linearScale, logScale, Scale } from "./scale";
import { Surface } from "./surface";

export const FIGURE_KINDS = [
  "rate_loglog",
  "components_timeseries",
  "corrector_comparison",
  "energy_slack",
] as const;
export type FigureKind = (typeof FIGURE_KINDS)[number];

export interface FigureSpec {
  kind: FigureKind;
  inputs: string[];
  output: string;
  title?: string;
}

const W = 720;
const H = 480;
const MARGIN = { left: 78, right: 24, top: 44, bottom: 56 };
const COLORS = ["#1f6fb2", "#d1495b", "#3e8d63", "#8d6a9f", "#c78326"];

export const FIGURE_SIZE = { width: W, height: H };

interface Frame {
  x: Scale;
  y: Scale;
}

function drawFrame(
  s: Surface,
  x: Scale,
  y: Scale,
  opts: {
    title: string;
    xLabel: string;
    yLabel: string;
    xTickFormat?: (v: number) => string;
    yTickFormat?: (v: number) => string;
    xTicks?: number[];
  }
): Frame {
  const x0 = MARGIN.left;
  const x1 = W - MARGIN.right;
  const y0 = H - MARGIN.bottom;
  const y1 = MARGIN.top;
  const axis = { stroke: "#333333", width: 1 };
  s.line(x0, y0, x1, y0, axis);
  s.line(x0, y0, x0, y1, axis);
  const fx = opts.xTickFormat ?? formatTick;
  const fy = opts.yTickFormat ?? formatTick;
  for (const t of opts.xTicks ?? x.ticks()) {
    const px = x(t);
    if (px < x0 - 0.5 || px > x1 + 0.5) continue;
    s.line(px, y0, px, y0 + 5, axis);
    s.line(px, y0, px, y1, { stroke: "#e6e6e6", width: 0.7 });
    s.text(px, y0 + 20, fx(t), { anchor: "middle", size: 11 });
  }
  for (const t of y.ticks()) {
    const py = y(t);
    if (py > y0 + 0.5 || py < y1 - 0.5) continue;
    s.line(x0 - 5, py, x0, py, axis);
    s.line(x0, py, x1, py, { stroke: "#e6e6e6", width: 0.7 });
    s.text(x0 - 9, py + 4, fy(t), { anchor: "end", size: 11 });
  }
  s.text((x0 + x1) / 2, H - 14, opts.xLabel, { anchor: "middle", size: 13 });
  s.text(18, (y0 + y1) / 2, opts.yLabel, {
    anchor: "middle",
    size: 13,
    rotate: -90,
  });
  s.text((x0 + x1) / 2, 24, opts.title, { anchor: "middle", size: 15 });
  return { x, y };
}

function drawLegend(s: Surface, entries: Array<{ label: string; color: string; dash?: number[] }>): void {
  let y = MARGIN.top + 14;
  const x = W - MARGIN.right - 190;
  for (const e of entries) {
    s.line(x, y - 4, x + 26, y - 4, { stroke: e.color, width: 2, dash: e.dash });
    s.text(x + 32, y, e.label, { size: 11 });
    y += 16;
  }
}

function annotateAborted(s: Surface, reason: string, tEnd: number): void {
  s.text(MARGIN.left + 8, MARGIN.top + 14, `aborted at t=${formatTick(tEnd)}: ${reason}`, {
    size: 11,
    color: "#b00020",
  });
}

function padDomain(lo: number, hi: number): [number, number] {
  if (lo === hi) return [lo - 0.5, hi + 0.5];
  const pad = 0.05 * (hi - lo);
  return [lo - pad, hi + pad];
}

// -- rate plot ----------------------------------------------------------------

export function renderRate(s: Surface, rows: RateRow[], title?: string): void {
  const eps = rows.map((r) => r.eps);
  const sup = rows.map((r) => r.sup_mod_total);
  const { slope, intercept } = logLogSlope(eps, sup);
  const sigma = rows[0].sigma_theory;

  const x = logScale([Math.min(...eps) / 1.3, Math.max(...eps) * 1.3], [MARGIN.left, W - MARGIN.right]);
  const y = logScale(
    [Math.min(...sup) / 1.6, Math.max(...sup) * 1.6],
    [H - MARGIN.bottom, MARGIN.top]
  );
  drawFrame(s, x, y, {
    title: title ?? "modulated energy vs Mach parameter",
    xLabel: "eps",
    yLabel: "sup_t modulated energy",
    xTicks: eps,
    xTickFormat: (v) => formatTick(v),
    yTickFormat: (v) => v.toExponential(0),
  });

  const lo = Math.min(...eps);
  const hi = Math.max(...eps);
  const fitted: Array<[number, number]> = [lo, hi].map((e) => [
    x(e),
    y(Math.exp(intercept + slope * Math.log(e))),
  ]);
  s.polyline(fitted, { stroke: COLORS[0], width: 1.6 });

  // reference slope anchored at the largest-eps point
  const anchor = rows.reduce((a, b) => (a.eps > b.eps ? a : b));
  const ref: Array<[number, number]> = [lo, hi].map((e) => [
    x(e),
    y(anchor.sup_mod_total * Math.pow(e / anchor.eps, sigma)),
  ]);
  s.polyline(ref, { stroke: "#555555", width: 1.3, dash: [6, 4] });

  for (const r of rows) {
    s.circle(x(r.eps), y(r.sup_mod_total), 4, COLORS[1]);
  }

  drawLegend(s, [
    { label: `fitted slope ${slope.toFixed(3)}`, color: COLORS[0] },
    { label: `reference slope ${sigma.toFixed(3)}`, color: "#555555", dash: [6, 4] },
  ]);
}

// -- time-series figures ---------------------------------------------------------

interface SeriesSpec {
  label: string;
  color: string;
  value: (r: CaseRow) => number;
  dash?: number[];
}

function renderSeries(
  s: Surface,
  file: CaseFile,
  series: SeriesSpec[],
  opts: {
    title: string;
    yLabel: string;
    includeValues?: number[];
    extra?: (s: Surface, f: Frame) => void;
  }
): void {
  const rows = file.rows;
  if (rows.length === 0) {
    // nothing but the abort marker: draw an annotated empty frame
    const x = linearScale([0, 1], [MARGIN.left, W - MARGIN.right]);
    const y = linearScale([0, 1], [H - MARGIN.bottom, MARGIN.top]);
    drawFrame(s, x, y, { title: opts.title, xLabel: "t", yLabel: opts.yLabel });
    if (file.abortReason !== null) annotateAborted(s, file.abortReason, 0);
    return;
  }
  const ts = rows.map((r) => r.t);
  let lo = Infinity;
  let hi = -Infinity;
  for (const spec of series) {
    for (const r of rows) {
      const v = spec.value(r);
      lo = Math.min(lo, v);
      hi = Math.max(hi, v);
    }
  }
  for (const v of opts.includeValues ?? []) {
    lo = Math.min(lo, v);
    hi = Math.max(hi, v);
  }
  const x = linearScale(padDomain(Math.min(...ts), Math.max(...ts)), [
    MARGIN.left,
    W - MARGIN.right,
  ]);
  const y = linearScale(padDomain(Math.min(lo, 0), Math.max(hi, 0)), [
    H - MARGIN.bottom,
    MARGIN.top,
  ]);
  const frame = drawFrame(s, x, y, { title: opts.title, xLabel: "t", yLabel: opts.yLabel });
  for (const spec of series) {
    s.polyline(
      rows.map((r) => [x(r.t), y(spec.value(r))] as [number, number]),
      { stroke: spec.color, width: 1.8, dash: spec.dash }
    );
  }
  drawLegend(s, series.map(({ label, color, dash }) => ({ label, color, dash })));
  if (file.abortReason !== null) {
    const tEnd = ts[ts.length - 1];
    s.line(x(tEnd), H - MARGIN.bottom, x(tEnd), MARGIN.top, {
      stroke: "#b00020",
      width: 1.2,
      dash: [3, 3],
    });
    annotateAborted(s, file.abortReason, tEnd);
  }
  opts.extra?.(s, frame);
}

export function renderComponents(s: Surface, file: CaseFile, title?: string): void {
  renderSeries(
    s,
    file,
    [
      { label: "kinetic mismatch w2", color: COLORS[0], value: (r) => r.w2 },
      { label: "magnetic mismatch Z2", color: COLORS[1], value: (r) => r.Z2 },
      { label: "acoustic mismatch pi2", color: COLORS[2], value: (r) => r.pi2 },
      { label: "total", color: "#222222", value: (r) => r.mod_total, dash: [5, 3] },
    ],
    { title: title ?? "modulated energy components", yLabel: "energy" }
  );
}

export function renderComparison(s: Surface, file: CaseFile, title?: string): void {
  renderSeries(
    s,
    file,
    [
      {
        label: "corrected w2+pi2",
        color: COLORS[2],
        value: (r) => r.w2 + r.pi2,
      },
      {
        label: "uncorrected w2+pi2",
        color: COLORS[1],
        value: (r) => r.uncorrected_w2 + r.uncorrected_pi2,
        dash: [5, 3],
      },
    ],
    { title: title ?? "corrector effectiveness", yLabel: "energy" }
  );
}

export function renderSlack(s: Surface, file: CaseFile, title?: string): void {
  const e0 = file.rows.length > 0 ? file.rows[0].E_total : 0;
  const tol = 1e-3 * e0 + 1e-12;
  renderSeries(
    s,
    file,
    [{ label: "slack E(0) - E(t) - D_cum", color: COLORS[0], value: (r) => r.slack }],
    {
      title: title ?? "energy inequality slack",
      yLabel: "slack",
      includeValues: [-tol],
      extra: (surf, frame) => {
        const y = frame.y(-tol);
        surf.line(MARGIN.left, y, W - MARGIN.right, y, {
          stroke: "#b00020",
          width: 1.2,
          dash: [6, 4],
        });
        surf.text(W - MARGIN.right - 4, y - 5, "-tol_E", {
          anchor: "end",
          size: 10,
          color: "#b00020",
        });
      },
    }
  );
}
