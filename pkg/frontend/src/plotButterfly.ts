import { ArtifactCsv, twoColumns } from "./csv.js";
import { addAnnotation, addScatter, defaultFrame, newPlot, render } from "./svg.js";

const TWO_PI = 2 * Math.PI;

export interface ButterflyResult {
  svg: string;
  pointCount: number;
  wrappedCount: number;
  warnings: string[];
}

/** Scatter of energy against flux over one flux period [0, 2 pi).
 *  Values outside the period are wrapped in, with a warning. */
export const plotButterfly = (csv: ArtifactCsv): ButterflyResult => {
  const warnings: string[] = [];
  let xs: number[] = [];
  let ys: number[] = [];
  if (csv.rows.length > 0) {
    const cols = twoColumns(csv, csv.header.includes("flux") ? ["flux", "energy"] : null);
    let wrapped = 0;
    xs = cols.x.map((v) => {
      if (v >= 0 && v < TWO_PI) return v;
      wrapped += 1;
      let w = v % TWO_PI;
      if (w < 0) w += TWO_PI;
      return w;
    });
    ys = cols.y;
    if (wrapped > 0) warnings.push(`${wrapped} flux values wrapped into [0, 2pi)`);
    const plot = newPlot(
      defaultFrame({ lo: 0, hi: TWO_PI }, { lo: Math.min(...ys), hi: Math.max(...ys) }),
      "flux per plaquette",
      "energy",
      "spectrum vs flux",
    );
    addScatter(plot, xs, ys);
    for (const [i, w] of warnings.entries()) addAnnotation(plot, w, i);
    return { svg: render(plot), pointCount: xs.length, wrappedCount: wrapped, warnings };
  }
  const empty = newPlot(
    defaultFrame({ lo: 0, hi: TWO_PI }, { lo: -4, hi: 4 }),
    "flux per plaquette",
    "energy",
    "spectrum vs flux (no data)",
  );
  return { svg: render(empty), pointCount: 0, wrappedCount: 0, warnings };
};

/** Energies of the column at one flux value. */
export const energiesAt = (csv: ArtifactCsv, flux: number, tol = 1e-9): number[] => {
  const cols = twoColumns(csv, csv.header.includes("flux") ? ["flux", "energy"] : null);
  return cols.x
    .map((v, i) => ({ v, e: cols.y[i] }))
    .filter(({ v }) => Math.abs(v - flux) < tol)
    .map(({ e }) => e)
    .sort((a, b) => a - b);
};

/** Spectral density (states per unit energy) inside an interval: the
 *  band-splitting a butterfly figure shows is a depletion of this density
 *  inside the gaps relative to the bands. */
export const spectralDensity = (energies: number[], lo: number, hi: number): number =>
  energies.filter((e) => e > lo && e < hi).length / (hi - lo);
