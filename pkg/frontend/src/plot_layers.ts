import { readFileSync, writeFileSync } from "node:fs";
import { parseArgs } from "node:util";

import { run, usage } from "./cli_util.js";
import { buildLayers } from "./layers.js";

run(() => {
  const { values } = parseArgs({
    options: {
      in: { type: "string" },
      out: { type: "string" },
    },
  });
  if (!values.in || !values.out) {
    usage("usage: plot-layers --in trajectory.csv|scatter.csv --out fig.svg");
  }
  const svg = buildLayers(readFileSync(values.in as string, "utf8"));
  writeFileSync(values.out as string, svg);
  console.log(values.out);
});
