/**
 * Color-coded square correlation matrix with per-cell class annotations.
 */

import type { Bucket, CorrelationMatrix } from "./matrix.js";
import { document, esc, px, text } from "./svg.js";

const CELL = 64;
const LEFT = 70;
const TOP = 34;
const LEGEND_H = 46;

const COLOR: Record<Bucket, string> = {
  "strong+": "#08519c",
  "weak+": "#9ecae1",
  none: "#f0f0f0",
  "weak-": "#fcae91",
  "strong-": "#a50f15",
};

const LEGEND_NOTE: Record<Bucket, string> = {
  "strong+": "(0.7, 1]",
  "weak+": "(0.3, 0.7]",
  none: "[-0.3, 0.3]",
  "weak-": "[-0.7, -0.3)",
  "strong-": "[-1, -0.7)",
};

const DARK: Bucket[] = ["strong+", "strong-"];

const legendItemWidth = (bucket: Bucket): number =>
  18 + 6.2 * (bucket.length + 1 + LEGEND_NOTE[bucket].length) + 22;

export function renderHeatmap(matrix: CorrelationMatrix): string {
  const n = matrix.labels.length;
  const buckets = Object.keys(COLOR) as Bucket[];
  const legendWidth = buckets.reduce((w, b) => w + legendItemWidth(b), 0);
  const width = Math.max(LEFT + n * CELL + 16, LEFT + legendWidth);
  const height = TOP + n * CELL + LEGEND_H + 16;
  const body: string[] = [];

  for (let j = 0; j < n; j++) {
    const cx = LEFT + j * CELL + CELL / 2;
    body.push(text(cx, TOP - 10, matrix.labels[j], { anchor: "middle" }));
  }
  for (let i = 0; i < n; i++) {
    const cy = TOP + i * CELL + CELL / 2 + 4;
    body.push(text(LEFT - 8, cy, matrix.labels[i], { anchor: "end" }));
  }

  for (let i = 0; i < n; i++) {
    for (let j = 0; j < n; j++) {
      const bucket = matrix.class[i][j];
      const x = LEFT + j * CELL;
      const y = TOP + i * CELL;
      body.push(
        `<rect x="${px(x)}" y="${px(y)}" width="${px(CELL)}" height="${px(CELL)}"` +
          ` fill="${COLOR[bucket]}" stroke="#ffffff" stroke-width="1.00"` +
          ` data-row="${esc(matrix.labels[i])}" data-col="${esc(matrix.labels[j])}"` +
          ` data-bucket="${esc(bucket)}"/>`,
      );
      body.push(
        text(x + CELL / 2, y + CELL / 2 + 4, matrix.rho[i][j].toFixed(2), {
          anchor: "middle",
          fill: DARK.includes(bucket) ? "#ffffff" : "#222222",
        }),
      );
    }
  }

  const ly = TOP + n * CELL + 22;
  let lx = LEFT;
  for (const bucket of buckets) {
    body.push(
      `<rect x="${px(lx)}" y="${px(ly)}" width="14.00" height="14.00"` +
        ` fill="${COLOR[bucket]}" stroke="#888888" stroke-width="0.50"/>`,
    );
    body.push(
      text(lx + 18, ly + 11, `${bucket} ${LEGEND_NOTE[bucket]}`, { size: 10 }),
    );
    lx += legendItemWidth(bucket);
  }

  return document(width, height, body);
}
