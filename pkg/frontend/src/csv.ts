import { readFileSync } from 'fs';
import { parse } from 'papaparse';

export const LAW_COLUMNS = [
  'level', 'n', 'tau', 'a_hat', 'stderr', 'reference', 'deviation',
] as const;

export const NEIGHBORHOOD_COLUMNS = [
  'eps', 'mu_hat', 'stderr', 'reference',
] as const;

export interface LawRow extends Record<string, number> {
  level: number;
  n: number;
  tau: number;
  a_hat: number;
  stderr: number;
  reference: number;
  deviation: number;
}

export interface NeighborhoodRow extends Record<string, number> {
  eps: number;
  mu_hat: number;
  stderr: number;
  reference: number;
}

export class SchemaError extends Error {
  constructor(file: string, detail: string) {
    super(`schema mismatch in ${file}: ${detail}`);
    this.name = 'SchemaError';
  }
}

/**
 * Read one experiment CSV and check it against the expected column list.
 * The producer writes columns in a fixed order, so order is part of the
 * schema.  A header-only file is valid and returns zero rows.
 */
export function readTable(
  path: string, columns: readonly string[],
): Record<string, number>[] {
  const text = readFileSync(path, 'utf8');
  const parsed = parse(text, {
    header: true,
    dynamicTyping: true,
    skipEmptyLines: true,
  });
  const fields = parsed.meta.fields ?? [];

  for (const col of columns) {
    if (!fields.includes(col)) {
      throw new SchemaError(path, `missing column "${col}"`);
    }
  }
  for (const col of fields) {
    if (!columns.includes(col)) {
      throw new SchemaError(path, `unexpected column "${col}"`);
    }
  }
  // papaparse keeps the header order, so a full two-way inclusion check
  // only leaves order to verify.
  columns.forEach((col, i) => {
    if (fields[i] !== col) {
      throw new SchemaError(path, `column "${fields[i]}" out of order`);
    }
  });

  const rows = parsed.data as Record<string, unknown>[];
  rows.forEach((row, i) => {
    for (const col of columns) {
      const v = row[col];
      if (typeof v !== 'number' || !isFinite(v)) {
        throw new SchemaError(
          path, `column "${col}" has non-numeric value ${JSON.stringify(v)} in data row ${i + 1}`,
        );
      }
    }
  });
  return rows as Record<string, number>[];
}

export function readLaw(path: string): LawRow[] {
  return readTable(path, LAW_COLUMNS) as unknown as LawRow[];
}

export function readNeighborhood(path: string): NeighborhoodRow[] {
  return readTable(path, NEIGHBORHOOD_COLUMNS) as unknown as NeighborhoodRow[];
}
