import { readFileSync } from "node:fs";
import Papa from "papaparse";

export interface CsvTable {
  path: string;
  columns: string[];
  rows: Record<string, string>[];
}

export class MissingColumnError extends Error {
  constructor(public column: string, public file: string) {
    super(`missing column "${column}" in ${file}`);
    this.name = "MissingColumnError";
  }
}

export function readCsv(path: string): CsvTable {
  const text = readFileSync(path, "utf8");
  const parsed = Papa.parse<Record<string, string>>(text.trim(), {
    header: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const first = parsed.errors[0];
    throw new Error(`cannot parse ${path}: ${first.message} (row ${first.row})`);
  }
  const columns = parsed.meta.fields ?? [];
  return { path, columns, rows: parsed.data };
}

export function requireColumns(table: CsvTable, columns: string[]): void {
  for (const column of columns) {
    if (!table.columns.includes(column)) {
      throw new MissingColumnError(column, table.path);
    }
  }
}

/** Parse a cell as a finite number; blank cells become null. */
export function num(row: Record<string, string>, column: string): number | null {
  const raw = row[column];
  if (raw === undefined || raw === "") return null;
  const value = Number(raw);
  return Number.isFinite(value) ? value : null;
}
