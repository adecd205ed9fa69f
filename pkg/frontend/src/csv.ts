import { readFileSync } from "fs";

export interface ArtifactCsv {
  header: string[];
  rows: number[][];
  metadata: Record<string, string>;
}

/** Parse a magtb artifact CSV: '#'-prefixed key=value metadata, then a
 *  header row, then comma-separated numeric rows. */
export const parseArtifactCsv = (text: string): ArtifactCsv => {
  const metadata: Record<string, string> = {};
  let header: string[] | null = null;
  const rows: number[][] = [];
  for (const raw of text.split(/\r?\n/)) {
    const line = raw.trim();
    if (line.length === 0) continue;
    if (line.startsWith("#")) {
      const eq = line.indexOf("=");
      if (eq > 0) metadata[line.slice(1, eq).trim()] = line.slice(eq + 1).trim();
      continue;
    }
    if (header === null) {
      header = line.split(",").map((c) => c.trim());
      continue;
    }
    const cells = line.split(",").map(Number);
    if (cells.some((v) => Number.isNaN(v))) {
      throw new Error(`malformed numeric row: ${line}`);
    }
    if (cells.length !== header.length) {
      throw new Error(`row has ${cells.length} cells, header has ${header.length}`);
    }
    rows.push(cells);
  }
  return { header: header ?? [], rows, metadata };
};

export const readArtifactCsv = (path: string): ArtifactCsv =>
  parseArtifactCsv(readFileSync(path, "utf8"));

/** Pull two named (or positional) numeric columns. */
export const twoColumns = (
  csv: ArtifactCsv,
  names: [string, string] | null = null,
): { x: number[]; y: number[] } => {
  if (csv.header.length < 2) {
    throw new Error(`need two columns, artifact has header [${csv.header.join(", ")}]`);
  }
  let ix = 0;
  let iy = 1;
  if (names !== null) {
    ix = csv.header.indexOf(names[0]);
    iy = csv.header.indexOf(names[1]);
    if (ix < 0 || iy < 0) {
      throw new Error(`columns [${names.join(", ")}] not found in [${csv.header.join(", ")}]`);
    }
  }
  return { x: csv.rows.map((r) => r[ix]), y: csv.rows.map((r) => r[iy]) };
};
