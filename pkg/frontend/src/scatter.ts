import { parseTable } from "./csv.js";
import { Frame, axes, document, tag, ticks } from "./svg.js";

export const SCATTER_HEADER = ["node", "degree", "layer", "u", "v"];

/** Degree vs final activity, one dot per node. logLog switches both
 * axes to log10; rows a log axis cannot show (values <= 0) are dropped. */
export function buildScatter(text: string, logLog: boolean): string {
  const table = parseTable(text, SCATTER_HEADER);
  let points = table.rows.map((r) => [r[1], r[3]] as [number, number]);
  if (logLog) {
    points = points
      .filter(([d, u]) => d > 0 && u > 0)
      .map(([d, u]) => [Math.log10(d), Math.log10(u)]);
  }
  if (points.length === 0) {
    throw new Error("no plottable rows in scatter input");
  }

  let xMin = Infinity;
  let xMax = -Infinity;
  let yMin = Infinity;
  let yMax = -Infinity;
  for (const [x, y] of points) {
    xMin = Math.min(xMin, x);
    xMax = Math.max(xMax, x);
    yMin = Math.min(yMin, y);
    yMax = Math.max(yMax, y);
  }
  if (xMax === xMin) {
    xMin -= 0.5;
    xMax += 0.5;
  }
  if (yMax === yMin) {
    yMin -= 0.5;
    yMax += 0.5;
  }
  const padX = (xMax - xMin) * 0.05;
  const padY = (yMax - yMin) * 0.05;

  const f: Frame = {
    width: 480,
    height: 400,
    left: 58,
    right: 16,
    top: 16,
    bottom: 42,
    xMin: xMin - padX,
    xMax: xMax + padX,
    yMin: yMin - padY,
    yMax: yMax + padY,
  };

  const parts: string[] = [];
  const w = f.width - f.left - f.right;
  const h = f.height - f.top - f.bottom;
  for (const [x, y] of points) {
    const cx = f.left + ((x - f.xMin) / (f.xMax - f.xMin)) * w;
    const cy = f.height - f.bottom - ((y - f.yMin) / (f.yMax - f.yMin)) * h;
    parts.push(
      tag("circle", {
        cx,
        cy,
        r: 2.4,
        fill: "#1f77b4",
        "fill-opacity": "0.55",
      })
    );
  }

  const label = (base: string) => (logLog ? `log10(${base})` : base);
  parts.push(
    axes(
      f,
      label("degree"),
      label("u"),
      ticks(f.xMin, f.xMax),
      ticks(f.yMin, f.yMax)
    )
  );
  return document(f.width, f.height, parts.join("\n"));
}
