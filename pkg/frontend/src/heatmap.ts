import { axisValues, parseTable } from "./csv.js";
import { viridis } from "./colormap.js";
import {
  Frame,
  axes,
  document,
  fmt,
  tag,
  textEl,
  tickLabel,
  xPix,
  yPix,
} from "./svg.js";

export const SWEEP_HEADER = ["u_s", "v_s", "fraction", "failures"];
export const BOUNDARY_HEADER = ["angle", "radius", "u_s", "v_s"];

/** Cell edges framing each grid value: midpoints between neighbors,
 * extended by half a step at the ends. */
function edges(values: number[]): number[] {
  if (values.length === 1) {
    const half = values[0] === 0 ? 0.5 : Math.abs(values[0]) / 2;
    return [values[0] - half, values[0] + half];
  }
  const out = [values[0] - (values[1] - values[0]) / 2];
  for (let i = 0; i + 1 < values.length; i++) {
    out.push((values[i] + values[i + 1]) / 2);
  }
  const n = values.length;
  out.push(values[n - 1] + (values[n - 1] - values[n - 2]) / 2);
  return out;
}

export function buildHeatmap(
  sweepText: string,
  boundaryText: string | null
): string {
  const sweep = parseTable(sweepText, SWEEP_HEADER);
  const us = axisValues(sweep.rows, 0);
  const vs = axisValues(sweep.rows, 1);
  const fraction = new Map<string, number>();
  for (const row of sweep.rows) {
    fraction.set(`${row[0]}|${row[1]}`, row[2]);
  }
  if (fraction.size !== us.length * vs.length) {
    throw new Error(
      `sweep grid is ragged: ${fraction.size} cells for ` +
        `${us.length}x${vs.length} axes`
    );
  }

  let boundary: Array<[number, number]> = [];
  if (boundaryText !== null) {
    const btab = parseTable(boundaryText, BOUNDARY_HEADER);
    const rows = btab.rows.slice().sort((a, b) => a[0] - b[0]);
    boundary = rows.map((r) => [r[2], r[3]]);
    const uEdge = edges(us);
    const vEdge = edges(vs);
    for (const [u, v] of boundary) {
      if (
        u < uEdge[0] ||
        u > uEdge[uEdge.length - 1] ||
        v < vEdge[0] ||
        v > vEdge[vEdge.length - 1]
      ) {
        throw new Error(
          `axis mismatch: boundary point (${u}, ${v}) lies outside ` +
            `the sweep grid`
        );
      }
    }
  }

  const uEdge = edges(us);
  const vEdge = edges(vs);
  const f: Frame = {
    width: 520,
    height: 420,
    left: 52,
    right: 96,
    top: 18,
    bottom: 42,
    xMin: uEdge[0],
    xMax: uEdge[uEdge.length - 1],
    yMin: vEdge[0],
    yMax: vEdge[vEdge.length - 1],
  };

  const parts: string[] = [];
  for (let i = 0; i < us.length; i++) {
    for (let j = 0; j < vs.length; j++) {
      const x = xPix(f, uEdge[i]);
      const y = yPix(f, vEdge[j + 1]);
      const w = xPix(f, uEdge[i + 1]) - x;
      const h = yPix(f, vEdge[j]) - y;
      const frac = fraction.get(`${us[i]}|${vs[j]}`) as number;
      parts.push(
        tag("rect", { x, y, width: w, height: h, fill: viridis(frac) })
      );
    }
  }

  if (boundary.length >= 2) {
    const pts = boundary
      .map(([u, v]) => `${fmt(xPix(f, u))},${fmt(yPix(f, v))}`)
      .join(" ");
    parts.push(
      tag("polyline", {
        points: pts,
        fill: "none",
        stroke: "#d62728",
        "stroke-width": 2,
      })
    );
  }

  const showEvery = Math.max(1, Math.ceil(us.length / 11));
  const xT = us.filter((_, i) => i % showEvery === 0);
  const yT = vs.filter((_, i) => i % showEvery === 0);
  parts.push(
    axes(f, "u_s", "v_s", xT, yT, xT.map(tickLabel), yT.map(tickLabel))
  );

  // colorbar
  const barX = f.width - f.right + 30;
  const barTop = f.top + 10;
  const barH = f.height - f.top - f.bottom - 20;
  const strips = 40;
  for (let s = 0; s < strips; s++) {
    const y = barTop + barH - ((s + 1) * barH) / strips;
    parts.push(
      tag("rect", {
        x: barX,
        y,
        width: 14,
        height: barH / strips + 0.5,
        fill: viridis((s + 0.5) / strips),
      })
    );
  }
  for (const v of [0, 0.5, 1]) {
    parts.push(
      textEl(barX + 20, barTop + barH - v * barH + 4, tickLabel(v), "start", 10)
    );
  }
  parts.push(textEl(barX + 7, barTop - 4, "fraction", "middle", 10));

  return document(f.width, f.height, parts.join("\n"));
}
