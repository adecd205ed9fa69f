import { describe, expect, it } from "vitest";
import { parseArtifactCsv, readArtifactCsv, twoColumns } from "../src/csv.js";
import { energiesAt, plotButterfly, spectralDensity } from "../src/plotButterfly.js";
import { plotDecay } from "../src/plotDecay.js";

const SAMPLES = new URL("../samples/", import.meta.url).pathname;

describe("artifact csv", () => {
  it("parses metadata, header and rows", () => {
    const csv = parseArtifactCsv("# command=x\n# config_hash=abc\nflux,energy\n0.5,1.25\n");
    expect(csv.metadata.config_hash).toBe("abc");
    expect(csv.header).toEqual(["flux", "energy"]);
    expect(csv.rows).toEqual([[0.5, 1.25]]);
  });

  it("rejects malformed rows", () => {
    expect(() => parseArtifactCsv("a,b\n1,two\n")).toThrow();
    expect(() => parseArtifactCsv("a,b\n1\n")).toThrow();
  });

  it("rejects missing columns", () => {
    const csv = parseArtifactCsv("# meta=1\nonly\n1.0\n");
    expect(() => twoColumns(csv)).toThrow();
  });
});

describe("plotButterfly", () => {
  it("renders the shipped sample artifact", () => {
    const csv = readArtifactCsv(SAMPLES + "butterfly.csv");
    const res = plotButterfly(csv);
    expect(res.pointCount).toBeGreaterThan(1000);
    expect(res.svg).toContain("<svg");
    expect(res.svg).toContain("circle");
    expect(res.warnings).toEqual([]);
  });

  it("shows band splitting at fluxes 2 pi/3 and pi in the data", () => {
    const csv = readArtifactCsv(SAMPLES + "butterfly.csv");
    // three bands at 2 pi/3: the gap density is depleted >5x vs the bands
    const third = energiesAt(csv, (2 * Math.PI) / 3, 1e-6);
    expect(third.length).toBeGreaterThan(0);
    expect(spectralDensity(third, 0.9, 1.8)).toBeLessThan(0.2 * spectralDensity(third, 2.1, 2.6));
    // two lobes at half flux: density depleted around zero energy
    const half = energiesAt(csv, Math.PI, 1e-6);
    expect(spectralDensity(half, -0.3, 0.3)).toBeLessThan(0.2 * spectralDensity(half, 1.5, 2.2));
  });

  it("handles an empty artifact", () => {
    const res = plotButterfly(parseArtifactCsv("flux,energy\n"));
    expect(res.pointCount).toBe(0);
    expect(res.svg).toContain("no data");
  });

  it("wraps out-of-period flux values with a warning", () => {
    const res = plotButterfly(parseArtifactCsv("flux,energy\n7.0,1.0\n-0.5,0.5\n1.0,0.0\n"));
    expect(res.wrappedCount).toBe(2);
    expect(res.warnings.length).toBe(1);
  });

  it("is idempotent", () => {
    const csv = readArtifactCsv(SAMPLES + "butterfly.csv");
    expect(plotButterfly(csv).svg).toBe(plotButterfly(csv).svg);
  });
});

describe("plotDecay", () => {
  it("renders the shipped defect profile", () => {
    const csv = readArtifactCsv(SAMPLES + "defect.csv");
    const res = plotDecay(csv, true);
    expect(res.svg).toContain("fitted rate");
    expect(res.fit).not.toBeNull();
    expect(res.pointCount).toBeGreaterThan(10);
  });

  it("fits a positive rate on the near-edge half of the defect profile", () => {
    // the full strip profile is symmetric (the far boundary has its own
    // edge states); the decay lives in the near half
    const csv = readArtifactCsv(SAMPLES + "defect.csv");
    const half = { ...csv, rows: csv.rows.filter((r) => r[0] <= csv.rows.length / 2) };
    const res = plotDecay(half, true);
    expect(res.fit!.rate).toBeGreaterThan(0.1);
  });

  it("recovers a synthetic exponential rate within 1%", () => {
    const rate = 1.3;
    const rows = Array.from({ length: 30 }, (_, i) => `${i * 0.3},${5 * Math.exp(-rate * i * 0.3)}`);
    const csv = parseArtifactCsv("x,value\n" + rows.join("\n") + "\n");
    const res = plotDecay(csv, true);
    expect(Math.abs(res.fit!.rate - rate) / rate).toBeLessThan(0.01);
  });

  it("annotates a near-zero rate for constant data", () => {
    const csv = parseArtifactCsv("x,value\n0,2\n1,2\n2,2\n");
    const res = plotDecay(csv, true);
    expect(Math.abs(res.fit!.rate)).toBeLessThan(1e-12);
    expect(res.svg).toContain("fitted rate 0.0000");
  });

  it("skips the fit for a single usable point", () => {
    const csv = parseArtifactCsv("x,value\n0,2\n1,-1\n");
    const res = plotDecay(csv, true);
    expect(res.fit).toBeNull();
    expect(res.filteredCount).toBe(1);
    expect(res.svg).toContain("circle");
  });

  it("is idempotent", () => {
    const csv = readArtifactCsv(SAMPLES + "defect.csv");
    expect(plotDecay(csv, true).svg).toBe(plotDecay(csv, true).svg);
  });
});
