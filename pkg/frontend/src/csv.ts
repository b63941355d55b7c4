/** CSV intake shared by the figure scripts. Inputs are the simulator's
 * own exports, so the dialect is plain: comma separators, no quoting,
 * one header line. Anything else is treated as a corrupt file. */

export class CsvError extends Error {}

export interface Table {
  header: string[];
  rows: number[][];
}

export function parseTable(text: string, expectedHeader: string[]): Table {
  const lines = text.split("\n").filter((l) => l.trim().length > 0);
  if (lines.length === 0) {
    throw new CsvError("empty file, expected a header line");
  }
  const header = lines[0].split(",").map((c) => c.trim());
  if (
    header.length !== expectedHeader.length ||
    header.some((c, i) => c !== expectedHeader[i])
  ) {
    throw new CsvError(
      `bad header: got "${lines[0]}", expected "${expectedHeader.join(",")}"`
    );
  }
  const rows: number[][] = [];
  for (let i = 1; i < lines.length; i++) {
    const cells = lines[i].split(",");
    if (cells.length !== header.length) {
      throw new CsvError(
        `row ${i + 1} has ${cells.length} cells, expected ${header.length}`
      );
    }
    const row = cells.map((c) => Number(c));
    if (row.some((x) => Number.isNaN(x))) {
      throw new CsvError(`row ${i + 1} has a non-numeric cell: "${lines[i]}"`);
    }
    rows.push(row);
  }
  return { header, rows };
}

/** Distinct values of one column, ascending. */
export function axisValues(rows: number[][], col: number): number[] {
  const seen = new Set<number>();
  for (const row of rows) seen.add(row[col]);
  return Array.from(seen).sort((a, b) => a - b);
}
