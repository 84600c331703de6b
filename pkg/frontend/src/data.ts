/**
 * Readers for the fairsel CLI's output files.
 *
 * CSV files may start with a single `# meta: {...}` comment line followed
 * by a header row; JSON files are `{ meta, records }` documents.  Cells
 * are coerced to numbers where possible; empty cells become null; the
 * literal strings "inf"/"-inf" become Infinities.
 */

import { readFileSync } from "fs";
import path from "path";

export interface RunMeta {
  tool?: string;
  version?: string;
  command?: string;
  config?: Record<string, unknown>;
  [key: string]: unknown;
}

export type Cell = number | string | boolean | null;
export type Row = Record<string, Cell>;

export interface DataFile {
  meta: RunMeta | null;
  rows: Row[];
  columns: string[];
  source: string;
}

const META_PREFIX = "# meta: ";

function coerceCell(raw: string): Cell {
  if (raw === "") return null;
  if (raw === "inf") return Infinity;
  if (raw === "-inf") return -Infinity;
  if (raw === "True" || raw === "true") return true;
  if (raw === "False" || raw === "false") return false;
  const num = Number(raw);
  return Number.isNaN(num) ? raw : num;
}

export function parseCsv(text: string, source = "<csv>"): DataFile {
  const lines = text.split(/\r?\n/).filter((ln) => ln.length > 0);
  let meta: RunMeta | null = null;
  let start = 0;
  while (start < lines.length && lines[start].startsWith("#")) {
    if (lines[start].startsWith(META_PREFIX)) {
      meta = JSON.parse(lines[start].slice(META_PREFIX.length)) as RunMeta;
    }
    start += 1;
  }
  if (start >= lines.length) {
    throw new Error(`${source}: no header row found`);
  }
  const columns = lines[start].split(",");
  const rows: Row[] = [];
  for (const line of lines.slice(start + 1)) {
    const cells = line.split(",");
    const row: Row = {};
    columns.forEach((col, i) => {
      row[col] = coerceCell(cells[i] ?? "");
    });
    rows.push(row);
  }
  return { meta, rows, columns, source };
}

export function parseJson(text: string, source = "<json>"): DataFile {
  const doc = JSON.parse(text) as { meta?: RunMeta; records?: Row[] };
  if (!Array.isArray(doc.records)) {
    throw new Error(`${source}: expected a "records" array`);
  }
  const rows = doc.records.map((rec) => {
    const row: Row = {};
    for (const [key, value] of Object.entries(rec)) {
      if (value === "inf") row[key] = Infinity;
      else if (value === "-inf") row[key] = -Infinity;
      else row[key] = value as Cell;
    }
    return row;
  });
  const columns: string[] = [];
  for (const row of rows) {
    for (const key of Object.keys(row)) {
      if (!columns.includes(key)) columns.push(key);
    }
  }
  return { meta: doc.meta ?? null, rows, columns, source };
}

export function readDataFile(filePath: string): DataFile {
  const text = readFileSync(filePath, "utf-8");
  const name = path.basename(filePath);
  return filePath.endsWith(".json") ? parseJson(text, name) : parseCsv(text, name);
}

/** Numeric value of a cell, or null when absent/non-numeric. */
export function asNumber(value: Cell | undefined): number | null {
  return typeof value === "number" ? value : null;
}
