/**
 * Shared pieces for the line charts: the family palette and grouping of
 * CSV rows into per-family series over the degeneration parameter.
 */

import type { CsvTable } from "./csv.js";
import { line, text } from "./svg.js";

/** Fixed assignment keeps colors stable across runs and plots. */
export const FAMILY_COLORS: Record<string, string> = {
  comb: "#1f77b4",
  convexity: "#ff7f0e",
  isotropy: "#2ca02c",
  maze: "#d62728",
  nsided: "#9467bd",
  star: "#8c564b",
  ulike: "#e377c2",
  zeta: "#7f7f7f",
};

const FALLBACK_COLORS = ["#17becf", "#bcbd22", "#aec7e8", "#ffbb78"];

export function familyColor(family: string, index: number): string {
  return FAMILY_COLORS[family] ?? FALLBACK_COLORS[index % FALLBACK_COLORS.length];
}

export type Series = Map<string, [number, number][]>;

/**
 * Group rows into family -> [(t, value)] sorted by t. Rows without a
 * parseable t (the random family) or a finite value are dropped.
 */
export function seriesByFamily(
  rows: Record<string, string>[],
  valueColumn: string,
): Series {
  const out: Series = new Map();
  for (const row of rows) {
    const t = Number.parseFloat(row.t);
    const v = Number.parseFloat(row[valueColumn]);
    if (!Number.isFinite(t) || !Number.isFinite(v)) continue;
    const family = row.family;
    if (!out.has(family)) out.set(family, []);
    out.get(family)!.push([t, v]);
  }
  for (const points of out.values()) {
    points.sort((a, b) => a[0] - b[0]);
  }
  return new Map([...out.entries()].sort((a, b) => a[0].localeCompare(b[0])));
}

export function hasColumn(table: CsvTable, name: string): boolean {
  return table.header.includes(name);
}

/** Color-keyed family legend, wrapping to a new row before maxX. */
export function drawLegend(
  body: string[],
  families: string[],
  x0: number,
  y0: number,
  maxX: number,
): void {
  let lx = x0;
  let ly = y0;
  families.forEach((family, index) => {
    const itemWidth = 20 + 6.2 * family.length + 22;
    if (lx + itemWidth > maxX && lx > x0) {
      lx = x0;
      ly += 16;
    }
    body.push(line(lx, ly, lx + 16, ly, familyColor(family, index), 2));
    body.push(text(lx + 20, ly + 4, family, { size: 10 }));
    lx += itemWidth;
  });
}
