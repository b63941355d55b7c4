import { readFileSync } from "node:fs";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { buildHeatmap } from "../src/heatmap.js";
import { buildLayers } from "../src/layers.js";
import { buildScatter } from "../src/scatter.js";

const FIXTURES = join(__dirname, "..", "fixtures");
const sweepText = readFileSync(join(FIXTURES, "sweep.csv"), "utf8");
const boundaryText = readFileSync(join(FIXTURES, "boundary.csv"), "utf8");
const scatterText = readFileSync(join(FIXTURES, "scatter.csv"), "utf8");
const trajText = readFileSync(join(FIXTURES, "trajectory_reduced.csv"), "utf8");

function zeroSweep(nu: number, nv: number): string {
  const lines = ["u_s,v_s,fraction,failures"];
  for (let i = 0; i < nu; i++) {
    for (let j = 0; j < nv; j++) {
      lines.push(`${i}.0,${j}.0,0.0,0`);
    }
  }
  return lines.join("\n") + "\n";
}

describe("heatmap", () => {
  it("renders fixture sweep with boundary overlay", () => {
    const svg = buildHeatmap(sweepText, boundaryText);
    expect(svg).toContain("<svg");
    expect(svg).toContain("polyline");
    expect((svg.match(/<rect/g) || []).length).toBeGreaterThanOrEqual(36);
  });

  it("all-zero sweep comes out one color, no boundary", () => {
    const svg = buildHeatmap(zeroSweep(4, 4), null);
    const fills = Array.from(svg.matchAll(/rect x=.* fill="(rgb[^"]*)"/g)).map(
      (m) => m[1]
    );
    const cells = fills.slice(0, 16);
    expect(new Set(cells).size).toBe(1);
    expect(svg).not.toContain("polyline");
  });

  it("reruns are byte-identical", () => {
    const a = buildHeatmap(sweepText, boundaryText);
    const b = buildHeatmap(sweepText, boundaryText);
    expect(a).toBe(b);
  });

  it("rejects a boundary outside the sweep axes", () => {
    const far = "angle,radius,u_s,v_s\n0.5,9.0,8.5,4.2\n0.7,9.0,8.0,5.0\n";
    expect(() => buildHeatmap(sweepText, far)).toThrow(/axis mismatch/);
  });

  it("rejects a ragged sweep grid", () => {
    const ragged =
      "u_s,v_s,fraction,failures\n0.0,0.0,0.1,0\n0.0,1.0,0.2,0\n1.0,0.0,0.3,0\n";
    expect(() => buildHeatmap(ragged, null)).toThrow(/ragged/);
  });

  it("rejects a corrupt header", () => {
    expect(() => buildHeatmap("u,v,frac\n0,0,0\n", null)).toThrow(/header/);
  });
});

describe("scatter", () => {
  it("renders fixture nodes as circles", () => {
    const svg = buildScatter(scatterText, false);
    expect((svg.match(/<circle/g) || []).length).toBe(80);
  });

  it("log-log drops nonpositive rows instead of failing", () => {
    const text =
      "node,degree,layer,u,v\n0,8,1,0.0,0.0\n1,4,1,2.0,1.0\n2,16,2,4.0,1.0\n";
    const svg = buildScatter(text, true);
    expect((svg.match(/<circle/g) || []).length).toBe(2);
    expect(svg).toContain("log10(degree)");
  });

  it("errors when nothing is plottable", () => {
    expect(() => buildScatter("node,degree,layer,u,v\n", false)).toThrow(
      /no plottable rows/
    );
    expect(() =>
      buildScatter("node,degree,layer,u,v\n0,5,1,0.0,0.0\n", true)
    ).toThrow(/no plottable rows/);
  });

  it("uniform activity draws a flat band", () => {
    const rows = ["node,degree,layer,u,v"];
    for (let i = 0; i < 20; i++) rows.push(`${i},${5 + i},1,3.0,2.0`);
    const svg = buildScatter(rows.join("\n"), false);
    const ys = Array.from(svg.matchAll(/cy="([0-9.]+)"/g)).map((m) => m[1]);
    expect(new Set(ys).size).toBe(1);
  });
});

describe("layers", () => {
  it("trajectory file gives one curve pair per layer", () => {
    const svg = buildLayers(trajText);
    const layers = new Set(
      Array.from(trajText.matchAll(/^[0-9.]+,(\d+),/gm)).map((m) => m[1])
    );
    expect((svg.match(/<polyline/g) || []).length).toBe(2 * layers.size);
    expect(svg).toContain("control");
  });

  it("snapshot file gives one dot per node", () => {
    const svg = buildLayers(scatterText);
    expect((svg.match(/<circle/g) || []).length).toBe(80);
  });

  it("all-zero snapshot stays flat", () => {
    const rows = ["node,degree,layer,u,v"];
    for (let i = 0; i < 12; i++) rows.push(`${i},4,${i % 3},0.0,0.0`);
    const svg = buildLayers(rows.join("\n"));
    const ys = Array.from(svg.matchAll(/cy="([0-9.]+)"/g)).map((m) =>
      Number(m[1])
    );
    expect(new Set(ys).size).toBe(1);
  });

  it("rejects an unknown header", () => {
    expect(() => buildLayers("time,u\n0,1\n")).toThrow(/bad header/);
  });
});
