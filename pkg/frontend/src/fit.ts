/** Ordinary least squares of log(y) against log(x). */
export function logLogSlope(xs: number[], ys: number[]): { slope: number; intercept: number } {
  if (xs.length !== ys.length || xs.length < 2) {
    throw new Error(`log-log fit needs >= 2 points, got ${xs.length}`);
  }
  const lx = xs.map(Math.log);
  const ly = ys.map(Math.log);
  const n = lx.length;
  const mx = lx.reduce((a, b) => a + b, 0) / n;
  const my = ly.reduce((a, b) => a + b, 0) / n;
  let sxx = 0;
  let sxy = 0;
  for (let i = 0; i < n; i++) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (sxx === 0) throw new Error("log-log fit is degenerate: all x equal");
  const slope = sxy / sxx;
  return { slope, intercept: my - slope * mx };
}
