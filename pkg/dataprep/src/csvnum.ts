/** Numeric CSV parsing (comma-separated, optional single header row). */

import { FormatError } from "./errors.js";

export interface NumericCsv {
  header: string[] | null;
  rows: number[][];
}

export function parseNumericCsv(text: string): NumericCsv {
  const lines = text.split(/\r?\n/).filter((line) => line.trim().length > 0);
  if (lines.length === 0) {
    throw new FormatError("CSV: empty file");
  }
  let header: string[] | null = null;
  let start = 0;
  const firstCells = lines[0]!.split(",");
  if (firstCells.some((cell) => Number.isNaN(Number(cell.trim())))) {
    header = firstCells.map((cell) => cell.trim());
    start = 1;
  }
  const rows: number[][] = [];
  const width = header ? header.length : firstCells.length;
  for (let i = start; i < lines.length; i++) {
    const cells = lines[i]!.split(",");
    if (cells.length !== width) {
      throw new FormatError(
        `CSV: line ${i + 1} has ${cells.length} cells, expected ${width}`,
      );
    }
    const row = cells.map((cell) => {
      const value = Number(cell.trim());
      if (Number.isNaN(value)) {
        throw new FormatError(`CSV: non-numeric cell on line ${i + 1}`);
      }
      return value;
    });
    rows.push(row);
  }
  return { header, rows };
}
