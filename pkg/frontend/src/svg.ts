/** Minimal deterministic SVG scatter plots: same data, same bytes. */

export interface Extent {
  lo: number;
  hi: number;
}

export interface PlotFrame {
  width: number;
  height: number;
  marginLeft: number;
  marginBottom: number;
  marginTop: number;
  marginRight: number;
  x: Extent;
  y: Extent;
}

export const defaultFrame = (x: Extent, y: Extent): PlotFrame => ({
  width: 720,
  height: 480,
  marginLeft: 64,
  marginBottom: 48,
  marginTop: 16,
  marginRight: 16,
  x,
  y,
});

const fmt = (v: number): string => {
  if (!Number.isFinite(v)) return "0";
  const s = v.toFixed(2);
  return s === "-0.00" ? "0.00" : s;
};

export const toPixelX = (f: PlotFrame, v: number): number => {
  const span = f.x.hi - f.x.lo || 1;
  return f.marginLeft + ((v - f.x.lo) / span) * (f.width - f.marginLeft - f.marginRight);
};

export const toPixelY = (f: PlotFrame, v: number): number => {
  const span = f.y.hi - f.y.lo || 1;
  return f.height - f.marginBottom - ((v - f.y.lo) / span) * (f.height - f.marginTop - f.marginBottom);
};

const ticks = (e: Extent, n = 5): number[] => {
  const span = e.hi - e.lo || 1;
  return Array.from({ length: n }, (_, i) => e.lo + (span * i) / (n - 1));
};

export interface SvgPlot {
  frame: PlotFrame;
  parts: string[];
}

export const newPlot = (f: PlotFrame, xLabel: string, yLabel: string, title: string): SvgPlot => {
  const parts: string[] = [];
  parts.push(
    `<rect x="${f.marginLeft}" y="${f.marginTop}" width="${f.width - f.marginLeft - f.marginRight}" ` +
      `height="${f.height - f.marginTop - f.marginBottom}" fill="white" stroke="black"/>`,
  );
  for (const t of ticks(f.x)) {
    const px = fmt(toPixelX(f, t));
    const py = f.height - f.marginBottom;
    parts.push(`<line x1="${px}" y1="${py}" x2="${px}" y2="${py + 5}" stroke="black"/>`);
    parts.push(
      `<text x="${px}" y="${py + 18}" font-size="11" text-anchor="middle" font-family="monospace">${fmt(t)}</text>`,
    );
  }
  for (const t of ticks(f.y)) {
    const px = f.marginLeft;
    const py = fmt(toPixelY(f, t));
    parts.push(`<line x1="${px - 5}" y1="${py}" x2="${px}" y2="${py}" stroke="black"/>`);
    parts.push(
      `<text x="${px - 8}" y="${py}" font-size="11" text-anchor="end" dominant-baseline="middle" font-family="monospace">${fmt(t)}</text>`,
    );
  }
  parts.push(
    `<text x="${fmt(f.width / 2)}" y="${f.height - 10}" font-size="13" text-anchor="middle" font-family="monospace">${xLabel}</text>`,
  );
  parts.push(
    `<text x="14" y="${fmt(f.height / 2)}" font-size="13" text-anchor="middle" font-family="monospace" ` +
      `transform="rotate(-90 14 ${fmt(f.height / 2)})">${yLabel}</text>`,
  );
  if (title.length > 0) {
    parts.push(
      `<text x="${fmt(f.width / 2)}" y="${f.marginTop + 14}" font-size="13" text-anchor="middle" font-family="monospace">${title}</text>`,
    );
  }
  return { frame: f, parts };
};

export const addScatter = (p: SvgPlot, xs: number[], ys: number[], radius = 1.2, color = "#1f3d7a"): void => {
  for (let i = 0; i < xs.length; i++) {
    const cx = fmt(toPixelX(p.frame, xs[i]));
    const cy = fmt(toPixelY(p.frame, ys[i]));
    p.parts.push(`<circle cx="${cx}" cy="${cy}" r="${radius}" fill="${color}"/>`);
  }
};

export const addLine = (p: SvgPlot, x0: number, y0: number, x1: number, y1: number, color = "#b3362b"): void => {
  p.parts.push(
    `<line x1="${fmt(toPixelX(p.frame, x0))}" y1="${fmt(toPixelY(p.frame, y0))}" ` +
      `x2="${fmt(toPixelX(p.frame, x1))}" y2="${fmt(toPixelY(p.frame, y1))}" stroke="${color}" stroke-width="1.5"/>`,
  );
};

export const addAnnotation = (p: SvgPlot, text: string, line = 0): void => {
  const x = p.frame.marginLeft + 10;
  const y = p.frame.marginTop + 30 + line * 16;
  p.parts.push(`<text x="${x}" y="${y}" font-size="12" font-family="monospace" fill="#333333">${text}</text>`);
};

export const render = (p: SvgPlot): string =>
  `<svg xmlns="http://www.w3.org/2000/svg" width="${p.frame.width}" height="${p.frame.height}" ` +
  `viewBox="0 0 ${p.frame.width} ${p.frame.height}">\n` +
  p.parts.join("\n") +
  "\n</svg>\n";
