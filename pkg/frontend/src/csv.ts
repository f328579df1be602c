import { readFileSync } from "fs";

export interface Table {
  path: string;
  columns: string[];
  /** column name -> values, one entry per data row */
  data: Map<string, number[]>;
  rows: number;
}

export class MissingColumnError extends Error {
  constructor(column: string, path: string) {
    super(`column "${column}" not found in ${path}`);
    this.name = "MissingColumnError";
  }
}

export function parseCsv(text: string, path = "<string>"): Table {
  const lines = text.split(/\r?\n/).filter(l => l.length > 0);
  if (lines.length === 0) {
    throw new Error(`empty CSV: ${path}`);
  }
  const columns = lines[0].split(",").map(s => s.trim());
  if (lines.length === 1) {
    throw new Error(`CSV has a header but no data rows: ${path}`);
  }
  const data = new Map<string, number[]>();
  for (const c of columns) data.set(c, []);
  for (let i = 1; i < lines.length; i++) {
    const cells = lines[i].split(",");
    if (cells.length !== columns.length) {
      throw new Error(`row ${i} of ${path} has ${cells.length} cells, expected ${columns.length}`);
    }
    for (let j = 0; j < columns.length; j++) {
      const v = Number(cells[j]);
      if (!Number.isFinite(v)) {
        throw new Error(`row ${i}, column "${columns[j]}" of ${path} is not a finite number: ${cells[j]}`);
      }
      data.get(columns[j])!.push(v);
    }
  }
  return { path, columns, data, rows: lines.length - 1 };
}

export function readTable(path: string): Table {
  return parseCsv(readFileSync(path, "utf8"), path);
}

export function column(table: Table, name: string): number[] {
  const col = table.data.get(name);
  if (col === undefined) throw new MissingColumnError(name, table.path);
  return col;
}

export function requireColumns(table: Table, names: string[]): void {
  for (const n of names) column(table, n);
}

/** All column names matching `<prefix>sample_<k>`, in CSV order. */
export function sampleColumns(table: Table, prefix: string): string[] {
  const re = new RegExp(`^${prefix}sample_\\d+$`);
  return table.columns.filter(c => re.test(c));
}
