import { CsvError, parseTable } from "./csv.js";
import { Frame, axes, document, fmt, tag, textEl, ticks, xPix, yPix } from "./svg.js";

export const TRAJECTORY_HEADER = ["t", "layer", "u", "v"];
export const SNAPSHOT_HEADER = ["node", "degree", "layer", "u", "v"];

const PALETTE = [
  "#1f77b4",
  "#ff7f0e",
  "#2ca02c",
  "#d62728",
  "#9467bd",
  "#8c564b",
  "#e377c2",
  "#7f7f7f",
  "#bcbd22",
  "#17becf",
];

/** Layer-resolved view of a run. Accepts either of the simulator's two
 * layered CSV shapes and picks the drawing by the header: a trajectory
 * file gives per-layer mean curves over time, a snapshot file gives a
 * per-node strip plot against the layer index. */
export function buildLayers(text: string): string {
  const head = text.split("\n", 1)[0].trim();
  if (head === TRAJECTORY_HEADER.join(",")) {
    return trajectoryFigure(text);
  }
  if (head === SNAPSHOT_HEADER.join(",")) {
    return snapshotFigure(text);
  }
  throw new CsvError(
    `bad header: got "${head}", expected "${TRAJECTORY_HEADER.join(",")}"` +
      ` or "${SNAPSHOT_HEADER.join(",")}"`
  );
}

function frame(xMin: number, xMax: number, yMin: number, yMax: number): Frame {
  if (xMax === xMin) xMax = xMin + 1;
  const padY = (yMax - yMin || 1) * 0.06;
  return {
    width: 520,
    height: 400,
    left: 58,
    right: 110,
    top: 16,
    bottom: 42,
    xMin,
    xMax,
    yMin: yMin - padY,
    yMax: yMax + padY,
  };
}

function trajectoryFigure(text: string): string {
  const table = parseTable(text, TRAJECTORY_HEADER);
  if (table.rows.length === 0) {
    throw new Error("trajectory file has no rows");
  }
  const layers = Array.from(new Set(table.rows.map((r) => r[1]))).sort(
    (a, b) => a - b
  );
  let tMax = 0;
  let yMin = Infinity;
  let yMax = -Infinity;
  for (const r of table.rows) {
    tMax = Math.max(tMax, r[0]);
    yMin = Math.min(yMin, r[2], r[3]);
    yMax = Math.max(yMax, r[2], r[3]);
  }
  const f = frame(0, tMax, yMin, yMax);

  const parts: string[] = [];
  layers.forEach((layer, idx) => {
    const rows = table.rows
      .filter((r) => r[1] === layer)
      .sort((a, b) => a[0] - b[0]);
    const color = PALETTE[idx % PALETTE.length];
    for (const col of [2, 3]) {
      const pts = rows
        .map((r) => `${fmt(xPix(f, r[0]))},${fmt(yPix(f, r[col]))}`)
        .join(" ");
      parts.push(
        tag("polyline", {
          points: pts,
          fill: "none",
          stroke: color,
          "stroke-width": col === 2 ? 1.8 : 1.2,
          ...(col === 3 ? { "stroke-dasharray": "4 3" } : {}),
        })
      );
    }
    const ly = f.top + 14 + idx * 15;
    const lx = f.width - f.right + 12;
    parts.push(
      tag("line", {
        x1: lx,
        y1: ly - 4,
        x2: lx + 16,
        y2: ly - 4,
        stroke: color,
        "stroke-width": 2,
      }),
      textEl(lx + 20, ly, layer === 0 ? "control" : `layer ${layer}`, "start", 10)
    );
  });
  parts.push(
    textEl(f.width - f.right + 12, f.top + 14 + layers.length * 15 + 4,
      "solid u, dashed v", "start", 9)
  );
  parts.push(
    axes(f, "t", "state", ticks(f.xMin, f.xMax), ticks(f.yMin, f.yMax))
  );
  return document(f.width, f.height, parts.join("\n"));
}

function snapshotFigure(text: string): string {
  const table = parseTable(text, SNAPSHOT_HEADER);
  if (table.rows.length === 0) {
    throw new Error("snapshot file has no rows");
  }
  let layerMax = 0;
  let yMin = Infinity;
  let yMax = -Infinity;
  for (const r of table.rows) {
    layerMax = Math.max(layerMax, r[2]);
    yMin = Math.min(yMin, r[3]);
    yMax = Math.max(yMax, r[3]);
  }
  const f = frame(-0.5, layerMax + 0.5, yMin, yMax);
  f.right = 16;

  const parts: string[] = [];
  for (const r of table.rows) {
    // deterministic jitter off the node id keeps same-layer dots apart
    const jitter = (((r[0] * 2654435761) % 1000) / 1000 - 0.5) * 0.55;
    parts.push(
      tag("circle", {
        cx: xPix(f, r[2] + jitter),
        cy: yPix(f, r[3]),
        r: 2.2,
        fill: PALETTE[r[2] % PALETTE.length],
        "fill-opacity": "0.6",
      })
    );
  }
  const layerTicks = [];
  for (let l = 0; l <= layerMax; l++) layerTicks.push(l);
  parts.push(
    axes(f, "layer", "u", layerTicks, ticks(f.yMin, f.yMax))
  );
  return document(f.width, f.height, parts.join("\n"));
}
