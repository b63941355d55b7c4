import { spawnSync } from "node:child_process";
import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

const ROOT = join(__dirname, "..");
const FIXTURES = join(ROOT, "fixtures");

function runScript(script: string, args: string[]) {
  return spawnSync(process.execPath, [join(ROOT, "dist", script), ...args], {
    encoding: "utf8",
  });
}

describe("figure scripts", () => {
  const out = mkdtempSync(join(tmpdir(), "figures-"));

  it("plot-heatmap writes an svg and finds the sibling boundary", () => {
    const fig = join(out, "heatmap.svg");
    const r = runScript("plot_heatmap.js", [
      "--in", join(FIXTURES, "sweep.csv"), "--out", fig,
    ]);
    expect(r.status).toBe(0);
    expect(r.stderr).toBe("");
    expect(readFileSync(fig, "utf8")).toContain("polyline");
  });

  it("missing boundary file warns but still draws", () => {
    const lonely = join(out, "lonely_sweep.csv");
    writeFileSync(lonely, readFileSync(join(FIXTURES, "sweep.csv")));
    const fig = join(out, "heatmap_plain.svg");
    const r = runScript("plot_heatmap.js", ["--in", lonely, "--out", fig]);
    expect(r.status).toBe(0);
    expect(r.stderr).toContain("warning");
    expect(readFileSync(fig, "utf8")).not.toContain("polyline");
  });

  it("reruns write byte-identical files", () => {
    const a = join(out, "a.svg");
    const b = join(out, "b.svg");
    for (const fig of [a, b]) {
      const r = runScript("plot_layers.js", [
        "--in", join(FIXTURES, "trajectory_reduced.csv"), "--out", fig,
      ]);
      expect(r.status).toBe(0);
    }
    expect(readFileSync(a, "utf8")).toBe(readFileSync(b, "utf8"));
  });

  it("plot-scatter handles the log-log flag", () => {
    const fig = join(out, "scatter.svg");
    const r = runScript("plot_scatter.js", [
      "--in", join(FIXTURES, "scatter.csv"), "--out", fig, "--log-log",
    ]);
    expect(r.status).toBe(0);
    expect(readFileSync(fig, "utf8")).toContain("log10(degree)");
  });

  it("corrupted header exits non-zero", () => {
    const bad = join(out, "bad.csv");
    const lines = readFileSync(join(FIXTURES, "sweep.csv"), "utf8").split("\n");
    lines[0] = "u_s,v_s,fraktion,failures";
    writeFileSync(bad, lines.join("\n"));
    for (const [script, extra] of [
      ["plot_heatmap.js", []],
      ["plot_layers.js", []],
    ] as Array<[string, string[]]>) {
      const r = runScript(script, [
        "--in", bad, "--out", join(out, "never.svg"), ...extra,
      ]);
      expect(r.status).not.toBe(0);
      expect(r.stderr).toContain("header");
    }
  });

  it("missing flags exit non-zero with usage", () => {
    const r = runScript("plot_scatter.js", []);
    expect(r.status).toBe(2);
    expect(r.stderr).toContain("usage");
  });
});
