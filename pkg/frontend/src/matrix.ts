/**
 * Correlation matrix JSON as written by the pipeline's analyze step:
 * metric labels, the coefficient grid, and the per-entry class bucket.
 */

export const BUCKETS = ["strong+", "weak+", "none", "weak-", "strong-"] as const;

export type Bucket = (typeof BUCKETS)[number];

export interface CorrelationMatrix {
  labels: string[];
  rho: number[][];
  class: Bucket[][];
}

function isStringArray(v: unknown): v is string[] {
  return Array.isArray(v) && v.every((x) => typeof x === "string");
}

function isSquareOf<T>(
  v: unknown,
  n: number,
  cell: (x: unknown) => x is T,
): v is T[][] {
  return (
    Array.isArray(v) &&
    v.length === n &&
    v.every((row) => Array.isArray(row) && row.length === n && row.every(cell))
  );
}

const isFiniteNumber = (x: unknown): x is number =>
  typeof x === "number" && Number.isFinite(x);

const isBucket = (x: unknown): x is Bucket =>
  typeof x === "string" && (BUCKETS as readonly string[]).includes(x);

/**
 * Parse and validate a matrix JSON document.
 *
 * @param text - raw file contents
 * @throws Error describing the first structural problem found
 */
export function parseMatrix(text: string): CorrelationMatrix {
  let doc: unknown;
  try {
    doc = JSON.parse(text);
  } catch (err) {
    throw new Error(`matrix file is not valid JSON: ${(err as Error).message}`);
  }
  if (typeof doc !== "object" || doc === null) {
    throw new Error("matrix JSON must be an object with labels/rho/class");
  }
  const obj = doc as Record<string, unknown>;
  if (!isStringArray(obj.labels) || obj.labels.length === 0) {
    throw new Error("matrix JSON needs a non-empty 'labels' string array");
  }
  const n = obj.labels.length;
  if (!isSquareOf(obj.rho, n, isFiniteNumber)) {
    throw new Error(`matrix JSON needs a ${n}x${n} numeric 'rho' grid`);
  }
  if (obj.rho.some((row) => row.some((x) => Math.abs(x) > 1 + 1e-12))) {
    throw new Error("correlation coefficients must lie in [-1, 1]");
  }
  if (!isSquareOf(obj.class, n, isBucket)) {
    throw new Error(
      `matrix JSON needs a ${n}x${n} 'class' grid of ${BUCKETS.join("/")}`,
    );
  }
  return { labels: obj.labels, rho: obj.rho, class: obj.class };
}
