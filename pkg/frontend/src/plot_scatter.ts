import { readFileSync, writeFileSync } from "node:fs";
import { parseArgs } from "node:util";

import { run, usage } from "./cli_util.js";
import { buildScatter } from "./scatter.js";

run(() => {
  const { values } = parseArgs({
    options: {
      in: { type: "string" },
      out: { type: "string" },
      "log-log": { type: "boolean", default: false },
    },
  });
  if (!values.in || !values.out) {
    usage("usage: plot-scatter --in scatter.csv --out fig.svg [--log-log]");
  }
  const svg = buildScatter(
    readFileSync(values.in as string, "utf8"),
    values["log-log"] as boolean
  );
  writeFileSync(values.out as string, svg);
  console.log(values.out);
});
