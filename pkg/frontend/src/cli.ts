import { writeFileSync } from "fs";
import { readArtifactCsv } from "./csv.js";
import { plotButterfly } from "./plotButterfly.js";
import { plotDecay } from "./plotDecay.js";

const usage = `usage:
  cli.ts butterfly <in.csv> <out.svg>
  cli.ts decay <in.csv> <out.svg> [--fit]`;

export const main = (argv: string[]): number => {
  const [mode, input, output, ...rest] = argv;
  if (!mode || !input || !output) {
    console.error(usage);
    return 2;
  }
  try {
    const csv = readArtifactCsv(input);
    if (mode === "butterfly") {
      const res = plotButterfly(csv);
      writeFileSync(output, res.svg);
      for (const w of res.warnings) console.warn(`warning: ${w}`);
      console.log(`wrote ${output} (${res.pointCount} points)`);
      return 0;
    }
    if (mode === "decay") {
      const res = plotDecay(csv, rest.includes("--fit"));
      writeFileSync(output, res.svg);
      for (const w of res.warnings) console.warn(`warning: ${w}`);
      if (res.fit) console.log(`fitted rate ${res.fit.rate}`);
      console.log(`wrote ${output} (${res.pointCount} points)`);
      return 0;
    }
    console.error(usage);
    return 2;
  } catch (err) {
    console.error(`error: ${err instanceof Error ? err.message : err}`);
    return 1;
  }
};

const isDirectRun = process.argv[1]?.endsWith("cli.ts") || process.argv[1]?.endsWith("cli.js");
if (isDirectRun) {
  process.exit(main(process.argv.slice(2)));
}
