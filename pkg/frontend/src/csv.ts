/**
 * CSV access for the pipeline's solver and convergence tables.
 */

import Papa from "papaparse";

export interface CsvTable {
  header: string[];
  rows: Record<string, string>[];
}

export function parseCsv(text: string): CsvTable {
  const parsed = Papa.parse<Record<string, string>>(text.trim(), {
    header: true,
    skipEmptyLines: true,
  });
  const hard = parsed.errors.filter((e) => e.code !== "TooFewFields");
  if (hard.length > 0) {
    const first = hard[0];
    throw new Error(`CSV parse error at row ${first.row}: ${first.message}`);
  }
  return { header: parsed.meta.fields ?? [], rows: parsed.data };
}

/** Throw if any of the named columns is absent from the header. */
export function requireColumns(
  table: CsvTable,
  names: string[],
  context: string,
): void {
  const missing = names.filter((name) => !table.header.includes(name));
  if (missing.length > 0) {
    throw new Error(`${context} is missing column(s): ${missing.join(", ")}`);
  }
}
