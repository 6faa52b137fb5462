/**
 * Fitted convergence order per family over the degeneration parameter,
 * with the second-order reference line.
 */

import { parseCsv, requireColumns } from "./csv.js";
import { drawLegend, familyColor, seriesByFamily } from "./chart.js";
import { document, line, polyline, px, text } from "./svg.js";

const WIDTH = 620;
const HEIGHT = 400;
const AX_LEFT = 64;
const AX_BOTTOM = 96;
const AX_TOP = 30;
const AX_RIGHT = 20;

export function renderConvergence(csvText: string): string {
  const table = parseCsv(csvText);
  requireColumns(table, ["family", "t", "C", "p", "residual"], "convergence CSV");
  const series = seriesByFamily(table.rows, "p");

  const values: number[] = [];
  for (const points of series.values()) {
    for (const [, p] of points) values.push(p);
  }
  values.push(2);
  let lo = Math.min(...values);
  let hi = Math.max(...values);
  const pad = Math.max(0.1, 0.08 * (hi - lo));
  lo -= pad;
  hi += pad;

  const plotX = AX_LEFT;
  const plotY = AX_TOP;
  const plotW = WIDTH - AX_LEFT - AX_RIGHT;
  const plotH = HEIGHT - AX_TOP - AX_BOTTOM;
  const sx = (t: number) => plotX + t * plotW;
  const sy = (p: number) => plotY + (hi - p) * (plotH / (hi - lo));

  const body: string[] = [];
  body.push(text(WIDTH / 2, 18, "fitted convergence order", { anchor: "middle" }));

  for (const t of [0, 0.25, 0.5, 0.75, 1]) {
    body.push(line(sx(t), plotY + plotH, sx(t), plotY + plotH + 4, "#444444"));
    body.push(
      text(sx(t), plotY + plotH + 16, t.toFixed(2), { anchor: "middle", size: 10 }),
    );
  }
  body.push(text(plotX + plotW / 2, plotY + plotH + 30, "t", { anchor: "middle", size: 10 }));

  const stepCount = 6;
  for (let k = 0; k <= stepCount; k++) {
    const p = lo + (k * (hi - lo)) / stepCount;
    body.push(line(plotX, sy(p), plotX + plotW, sy(p), "#e0e0e0", 0.5));
    body.push(text(plotX - 6, sy(p) + 3, p.toFixed(2), { anchor: "end", size: 10 }));
  }
  body.push(line(plotX, plotY, plotX, plotY + plotH, "#444444"));
  body.push(line(plotX, plotY + plotH, plotX + plotW, plotY + plotH, "#444444"));

  body.push(
    `<line x1="${px(sx(0))}" y1="${px(sy(2))}" x2="${px(sx(1))}" y2="${px(sy(2))}"` +
      ` stroke="#666666" stroke-width="1.00" stroke-dasharray="6 4"/>`,
  );
  body.push(text(sx(1) - 4, sy(2) - 6, "p = 2", { anchor: "end", size: 10, fill: "#666666" }));

  let index = 0;
  for (const [family, points] of series) {
    body.push(polyline(points.map(([t, p]) => [sx(t), sy(p)]), familyColor(family, index)));
    index += 1;
  }

  drawLegend(body, [...series.keys()], AX_LEFT, HEIGHT - 52, WIDTH - 10);

  return document(WIDTH, HEIGHT, body);
}
