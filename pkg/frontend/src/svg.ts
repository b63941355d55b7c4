/** Minimal SVG assembly. Every number is formatted through fmt() so a
 * rerun on the same inputs emits byte-identical markup. */

export function fmt(x: number): string {
  if (!Number.isFinite(x)) return "0";
  const s = x.toFixed(2);
  return s === "-0.00" ? "0.00" : s;
}

export function tag(
  name: string,
  attrs: Record<string, string | number>,
  body = ""
): string {
  const parts = Object.entries(attrs).map(
    ([k, v]) => `${k}="${typeof v === "number" ? fmt(v) : v}"`
  );
  const open = `<${name} ${parts.join(" ")}`;
  return body ? `${open}>${body}</${name}>` : `${open}/>`;
}

export function textEl(
  x: number,
  y: number,
  s: string,
  anchor = "middle",
  size = 11
): string {
  return tag(
    "text",
    {
      x,
      y,
      "text-anchor": anchor,
      "font-family": "sans-serif",
      "font-size": size,
      fill: "#222",
    },
    escapeText(s)
  );
}

export function escapeText(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export interface Frame {
  width: number;
  height: number;
  left: number;
  right: number;
  top: number;
  bottom: number;
  xMin: number;
  xMax: number;
  yMin: number;
  yMax: number;
}

export function xPix(f: Frame, x: number): number {
  const w = f.width - f.left - f.right;
  return f.left + ((x - f.xMin) / (f.xMax - f.xMin)) * w;
}

export function yPix(f: Frame, y: number): number {
  const h = f.height - f.top - f.bottom;
  return f.height - f.bottom - ((y - f.yMin) / (f.yMax - f.yMin)) * h;
}

/** Round tick positions covering [lo, hi]. */
export function ticks(lo: number, hi: number, want = 6): number[] {
  if (!(hi > lo)) return [lo];
  const rawStep = (hi - lo) / Math.max(1, want - 1);
  const mag = Math.pow(10, Math.floor(Math.log10(rawStep)));
  let step = mag;
  for (const m of [1, 2, 2.5, 5, 10]) {
    if (mag * m >= rawStep) {
      step = mag * m;
      break;
    }
  }
  const out: number[] = [];
  for (let v = Math.ceil(lo / step) * step; v <= hi + step * 1e-9; v += step) {
    out.push(Math.abs(v) < step * 1e-9 ? 0 : v);
  }
  return out;
}

export function tickLabel(v: number): string {
  if (v !== 0 && (Math.abs(v) >= 1e4 || Math.abs(v) < 1e-2)) {
    return v.toExponential(1);
  }
  const s = String(Math.round(v * 1000) / 1000);
  return s;
}

export function axes(
  f: Frame,
  xLabel: string,
  yLabel: string,
  xTicks: number[],
  yTicks: number[],
  xTickLabels?: string[],
  yTickLabels?: string[]
): string {
  const parts: string[] = [];
  const x0 = f.left;
  const x1 = f.width - f.right;
  const y0 = f.height - f.bottom;
  const y1 = f.top;
  parts.push(
    tag("line", { x1: x0, y1: y0, x2: x1, y2: y0, stroke: "#222" }),
    tag("line", { x1: x0, y1: y0, x2: x0, y2: y1, stroke: "#222" })
  );
  xTicks.forEach((v, i) => {
    const px = xPix(f, v);
    parts.push(
      tag("line", { x1: px, y1: y0, x2: px, y2: y0 + 4, stroke: "#222" }),
      textEl(px, y0 + 16, xTickLabels ? xTickLabels[i] : tickLabel(v))
    );
  });
  yTicks.forEach((v, i) => {
    const py = yPix(f, v);
    parts.push(
      tag("line", { x1: x0 - 4, y1: py, x2: x0, y2: py, stroke: "#222" }),
      textEl(x0 - 7, py + 4, yTickLabels ? yTickLabels[i] : tickLabel(v), "end")
    );
  });
  parts.push(textEl((x0 + x1) / 2, f.height - 6, xLabel));
  parts.push(
    `<text x="${fmt(14)}" y="${fmt((y0 + y1) / 2)}" text-anchor="middle" ` +
      `font-family="sans-serif" font-size="11" fill="#222" ` +
      `transform="rotate(-90 14 ${fmt((y0 + y1) / 2)})">` +
      `${escapeText(yLabel)}</text>`
  );
  return parts.join("\n");
}

export function document(width: number, height: number, body: string): string {
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" ` +
    `height="${height}" viewBox="0 0 ${width} ${height}">\n` +
    `<rect x="0" y="0" width="${width}" height="${height}" fill="white"/>\n` +
    body +
    "\n</svg>\n"
  );
}
