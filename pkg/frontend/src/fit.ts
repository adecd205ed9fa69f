export interface LineFit {
  slope: number;
  intercept: number;
  r2: number;
}

/** Ordinary least-squares line through (x, y). */
export const fitLine = (x: number[], y: number[]): LineFit => {
  const n = x.length;
  if (n < 2 || y.length !== n) {
    throw new Error(`need at least two paired points, got ${n}/${y.length}`);
  }
  const mx = x.reduce((a, b) => a + b, 0) / n;
  const my = y.reduce((a, b) => a + b, 0) / n;
  let sxx = 0;
  let sxy = 0;
  let syy = 0;
  for (let i = 0; i < n; i++) {
    sxx += (x[i] - mx) ** 2;
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) ** 2;
  }
  if (sxx === 0) throw new Error("x values are all identical");
  const slope = sxy / sxx;
  const intercept = my - slope * mx;
  const r2 = syy === 0 ? 1 : (sxy * sxy) / (sxx * syy);
  return { slope, intercept, r2 };
};

export interface DecayFit extends LineFit {
  /** decay rate of y ~ C exp(-rate x), i.e. -slope of ln y */
  rate: number;
  /** points dropped because y <= 0 cannot sit on a log axis */
  droppedNonPositive: number;
}

/** Fit ln(y) ~ intercept + slope * x, filtering non-positive values. */
export const fitExponentialDecay = (x: number[], y: number[]): DecayFit => {
  const xs: number[] = [];
  const ys: number[] = [];
  let dropped = 0;
  for (let i = 0; i < x.length; i++) {
    if (y[i] > 0) {
      xs.push(x[i]);
      ys.push(Math.log(y[i]));
    } else {
      dropped += 1;
    }
  }
  const base = fitLine(xs, ys);
  return { ...base, rate: -base.slope, droppedNonPositive: dropped };
};
