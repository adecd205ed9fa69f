import { ArtifactCsv, twoColumns } from "./csv.js";
import { DecayFit, fitExponentialDecay } from "./fit.js";
import { addAnnotation, addLine, addScatter, defaultFrame, newPlot, render } from "./svg.js";

export interface DecayResult {
  svg: string;
  pointCount: number;
  filteredCount: number;
  fit: DecayFit | null;
  warnings: string[];
}

/** Semilog plot of (x, value) data with an optional exponential-decay fit.
 *  Non-positive values cannot sit on a log axis; they are filtered and the
 *  count is reported.  A single usable point skips the fit. */
export const plotDecay = (csv: ArtifactCsv, withFit: boolean): DecayResult => {
  const warnings: string[] = [];
  const cols = csv.rows.length > 0 ? twoColumns(csv) : { x: [], y: [] };
  const xs: number[] = [];
  const logy: number[] = [];
  for (let i = 0; i < cols.x.length; i++) {
    if (cols.y[i] > 0) {
      xs.push(cols.x[i]);
      logy.push(Math.log10(cols.y[i]));
    }
  }
  const filtered = cols.x.length - xs.length;
  if (filtered > 0) warnings.push(`${filtered} non-positive values dropped from the log axis`);

  const xExt = xs.length > 0 ? { lo: Math.min(...xs), hi: Math.max(...xs) } : { lo: 0, hi: 1 };
  const yExt = logy.length > 0 ? { lo: Math.min(...logy), hi: Math.max(...logy) } : { lo: -1, hi: 1 };
  if (yExt.hi === yExt.lo) {
    yExt.lo -= 1;
    yExt.hi += 1;
  }
  const plot = newPlot(defaultFrame(xExt, yExt), csv.header[0] ?? "x", `log10 ${csv.header[1] ?? "value"}`, "decay");
  addScatter(plot, xs, logy, 2.5);

  let fit: DecayFit | null = null;
  if (withFit && xs.length >= 2) {
    fit = fitExponentialDecay(cols.x, cols.y);
    const at = (x: number): number => (fit!.intercept + fit!.slope * x) / Math.LN10;
    addLine(plot, xExt.lo, at(xExt.lo), xExt.hi, at(xExt.hi));
    addAnnotation(plot, `fitted rate ${fit.rate.toFixed(4)} (r2 ${fit.r2.toFixed(3)})`, warnings.length);
  } else if (withFit) {
    warnings.push("fit skipped: fewer than two positive points");
  }
  for (const [i, w] of warnings.entries()) addAnnotation(plot, w, i);
  return { svg: render(plot), pointCount: xs.length, filteredCount: filtered, fit, warnings };
};
