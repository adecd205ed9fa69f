import { describe, expect, it } from "vitest";
import { fitExponentialDecay, fitLine } from "../src/fit.js";

describe("fitLine", () => {
  it("recovers an exact line", () => {
    const x = [0, 1, 2, 3, 4];
    const y = x.map((v) => 2.5 * v - 1.0);
    const f = fitLine(x, y);
    expect(f.slope).toBeCloseTo(2.5, 12);
    expect(f.intercept).toBeCloseTo(-1.0, 12);
    expect(f.r2).toBeCloseTo(1.0, 12);
  });

  it("rejects degenerate input", () => {
    expect(() => fitLine([1], [2])).toThrow();
    expect(() => fitLine([1, 1], [0, 1])).toThrow();
  });
});

describe("fitExponentialDecay", () => {
  it("recovers the generating rate within 1%", () => {
    const rate = 0.7;
    const x = Array.from({ length: 40 }, (_, i) => i * 0.5);
    const y = x.map((v) => 3.0 * Math.exp(-rate * v));
    const f = fitExponentialDecay(x, y);
    expect(Math.abs(f.rate - rate) / rate).toBeLessThan(0.01);
    expect(f.droppedNonPositive).toBe(0);
  });

  it("reports near-zero rate for constant data", () => {
    const x = [0, 1, 2, 3];
    const y = [2, 2, 2, 2];
    const f = fitExponentialDecay(x, y);
    expect(Math.abs(f.rate)).toBeLessThan(1e-12);
  });

  it("filters non-positive values and counts them", () => {
    const x = [0, 1, 2, 3, 4];
    const y = [1.0, 0.0, 0.5, -0.1, 0.25];
    const f = fitExponentialDecay(x, y);
    expect(f.droppedNonPositive).toBe(2);
    expect(f.rate).toBeGreaterThan(0);
  });
});
