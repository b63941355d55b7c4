import { describe, expect, it } from "vitest";

import { CsvError, axisValues, parseTable } from "../src/csv.js";

describe("parseTable", () => {
  it("parses rows into numbers", () => {
    const t = parseTable("a,b\n1,2\n3.5,-4\n", ["a", "b"]);
    expect(t.rows).toEqual([
      [1, 2],
      [3.5, -4],
    ]);
  });

  it("rejects a wrong header", () => {
    expect(() => parseTable("a,c\n1,2\n", ["a", "b"])).toThrow(CsvError);
  });

  it("rejects reordered columns", () => {
    expect(() => parseTable("b,a\n1,2\n", ["a", "b"])).toThrow(/bad header/);
  });

  it("rejects ragged rows", () => {
    expect(() => parseTable("a,b\n1,2,3\n", ["a", "b"])).toThrow(/row 2/);
  });

  it("rejects non-numeric cells", () => {
    expect(() => parseTable("a,b\n1,x\n", ["a", "b"])).toThrow(/non-numeric/);
  });

  it("rejects an empty file", () => {
    expect(() => parseTable("", ["a"])).toThrow(/empty/);
  });

  it("tolerates a missing trailing newline", () => {
    const t = parseTable("a,b\n1,2", ["a", "b"]);
    expect(t.rows.length).toBe(1);
  });
});

describe("axisValues", () => {
  it("returns sorted distinct values", () => {
    const rows = [
      [3, 0],
      [1, 0],
      [3, 1],
      [2, 1],
    ];
    expect(axisValues(rows, 0)).toEqual([1, 2, 3]);
  });
});
