import { existsSync, readFileSync, writeFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { parseArgs } from "node:util";

import { run, usage } from "./cli_util.js";
import { buildHeatmap } from "./heatmap.js";

run(() => {
  const { values } = parseArgs({
    options: {
      in: { type: "string" },
      boundary: { type: "string" },
      out: { type: "string" },
    },
  });
  if (!values.in || !values.out) {
    usage("usage: plot-heatmap --in sweep.csv [--boundary boundary.csv] --out fig.svg");
  }
  const sweepPath = values.in as string;
  const boundaryPath = values.boundary ?? join(dirname(sweepPath), "boundary.csv");
  let boundaryText: string | null = null;
  if (existsSync(boundaryPath)) {
    boundaryText = readFileSync(boundaryPath, "utf8");
  } else {
    console.error(
      `warning: no boundary file at ${boundaryPath}, drawing heatmap only`
    );
  }
  const svg = buildHeatmap(readFileSync(sweepPath, "utf8"), boundaryText);
  writeFileSync(values.out as string, svg);
  console.log(values.out);
});
