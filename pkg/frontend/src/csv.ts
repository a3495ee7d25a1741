import { readFileSync } from "node:fs";
import Papa from "papaparse";

/** Raised for any input defect: unreadable file, empty file, header or
 * cell mismatch. The CLI maps it to a nonzero exit. */
export class ParseError extends Error {}

function readText(path: string): string {
  try {
    return readFileSync(path, "utf8");
  } catch (err) {
    const reason = err instanceof Error ? err.message : String(err);
    throw new ParseError(`cannot read ${path}: ${reason}`);
  }
}

/**
 * Read a CSV file and check its header against the documented one.
 * Returns the data rows as string cells; every row must have exactly
 * as many cells as the header.
 */
export function readTable(path: string, header: readonly string[]): string[][] {
  const text = readText(path);
  if (text.trim() === "") {
    throw new ParseError(`${path}: empty CSV`);
  }
  const parsed = Papa.parse<string[]>(text, { skipEmptyLines: true });
  if (parsed.errors.length > 0) {
    const first = parsed.errors[0];
    throw new ParseError(`${path}: malformed CSV: ${first.message}`);
  }
  const lines = parsed.data;
  const got = lines[0].map((cell) => cell.trim());
  if (got.join(",") !== header.join(",")) {
    throw new ParseError(
      `${path}: expected header "${header.join(",")}", got "${got.join(",")}"`,
    );
  }
  const rows = lines.slice(1);
  if (rows.length === 0) {
    throw new ParseError(`${path}: no data rows`);
  }
  rows.forEach((row, i) => {
    if (row.length !== header.length) {
      throw new ParseError(
        `${path}: data row ${i + 1} has ${row.length} cells, expected ${header.length}`,
      );
    }
  });
  return rows;
}

export interface NumOptions {
  allowNan?: boolean;
  integer?: boolean;
}

/** Parse one numeric cell with a descriptive failure message. */
export function num(
  path: string,
  rowIndex: number,
  column: string,
  raw: string,
  options: NumOptions = {},
): number {
  const text = raw.trim();
  const value = Number(text);
  if (text !== "" && Number.isNaN(value) && options.allowNan && text.toLowerCase() === "nan") {
    return NaN;
  }
  if (text === "" || !Number.isFinite(value)) {
    throw new ParseError(
      `${path}: data row ${rowIndex + 1}: column "${column}": expected a finite number, got "${raw}"`,
    );
  }
  if (options.integer && !Number.isInteger(value)) {
    throw new ParseError(
      `${path}: data row ${rowIndex + 1}: column "${column}": expected an integer, got "${raw}"`,
    );
  }
  return value;
}
