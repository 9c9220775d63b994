/** Minimal linear/log scales with tick generation for the figure axes. */

export interface Scale {
  (value: number): number;
  ticks(): number[];
}

export function linearScale(
  domain: [number, number],
  range: [number, number]
): Scale {
  let [d0, d1] = domain;
  if (d0 === d1) {
    d0 -= 0.5;
    d1 += 0.5;
  }
  const f = ((value: number) =>
    range[0] + ((value - d0) / (d1 - d0)) * (range[1] - range[0])) as Scale;
  f.ticks = () => niceTicks(d0, d1);
  return f;
}

export function logScale(domain: [number, number], range: [number, number]): Scale {
  if (!(domain[0] > 0) || !(domain[1] > 0)) {
    throw new Error("log scale needs positive domain");
  }
  let l0 = Math.log10(domain[0]);
  let l1 = Math.log10(domain[1]);
  if (l0 === l1) {
    l0 -= 0.5;
    l1 += 0.5;
  }
  const f = ((value: number) =>
    range[0] + ((Math.log10(value) - l0) / (l1 - l0)) * (range[1] - range[0])) as Scale;
  f.ticks = () => {
    const ticks: number[] = [];
    for (let e = Math.ceil(Math.min(l0, l1)); e <= Math.floor(Math.max(l0, l1)); e++) {
      ticks.push(Math.pow(10, e));
    }
    if (ticks.length < 2) {
      // narrow range: fall back to a few geometric ticks
      const n = 4;
      for (let i = 0; i <= n; i++) {
        ticks.push(Math.pow(10, l0 + ((l1 - l0) * i) / n));
      }
      ticks.sort((a, b) => a - b);
    }
    return ticks;
  };
  return f;
}

export function niceTicks(lo: number, hi: number, count = 6): number[] {
  if (lo > hi) [lo, hi] = [hi, lo];
  const span = hi - lo;
  if (span === 0) return [lo];
  const step0 = Math.pow(10, Math.floor(Math.log10(span / count)));
  let step = step0;
  for (const m of [1, 2, 5, 10]) {
    step = m * step0;
    if (span / step <= count) break;
  }
  const start = Math.ceil(lo / step) * step;
  const out: number[] = [];
  for (let v = start; v <= hi + 1e-12 * span; v += step) {
    out.push(Math.abs(v) < 1e-12 * span ? 0 : v);
  }
  return out;
}

export function formatTick(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) return v.toExponential(0);
  return String(parseFloat(v.toPrecision(6)));
}
