/**
 * Per-family solver-metric trends over the degeneration parameter t.
 *
 * One panel per solver column, one line per parametric family, log10 on
 * the y axis throughout: the condition number and the three error norms
 * all span decades as the meshes degenerate.
 */

import { parseCsv, requireColumns } from "./csv.js";
import { drawLegend, familyColor, seriesByFamily, type Series } from "./chart.js";
import { document, line, polyline, text } from "./svg.js";

const PANELS: [string, string][] = [
  ["kappa1", "condition number"],
  ["eps_inf", "max nodal error"],
  ["eps_2", "discrete L2 error"],
  ["eps_S", "energy error"],
];

const PANEL_W = 360;
const PANEL_H = 240;
const GAP = 26;
const AX_LEFT = 62;
const AX_BOTTOM = 34;
const AX_TOP = 26;
const AX_RIGHT = 12;
const LEGEND_H = 40;

interface Frame {
  x0: number;
  y0: number;
}

function drawPanel(
  body: string[],
  frame: Frame,
  title: string,
  series: Series,
): void {
  const plotX = frame.x0 + AX_LEFT;
  const plotY = frame.y0 + AX_TOP;
  const plotW = PANEL_W - AX_LEFT - AX_RIGHT;
  const plotH = PANEL_H - AX_TOP - AX_BOTTOM;

  body.push(text(frame.x0 + PANEL_W / 2, frame.y0 + 16, title, { anchor: "middle" }));

  const logs: number[] = [];
  for (const points of series.values()) {
    for (const [, v] of points) {
      if (v > 0) logs.push(Math.log10(v));
    }
  }
  let lo = logs.length > 0 ? Math.min(...logs) : 0;
  let hi = logs.length > 0 ? Math.max(...logs) : 1;
  if (hi - lo < 1e-9) {
    lo -= 0.5;
    hi += 0.5;
  }
  const sx = (t: number) => plotX + t * plotW;
  const sy = (logV: number) => plotY + (hi - logV) * (plotH / (hi - lo));

  for (const t of [0, 0.25, 0.5, 0.75, 1]) {
    body.push(line(sx(t), plotY + plotH, sx(t), plotY + plotH + 4, "#444444"));
    body.push(
      text(sx(t), plotY + plotH + 16, t.toFixed(2), { anchor: "middle", size: 10 }),
    );
  }
  body.push(text(plotX + plotW / 2, plotY + plotH + 30, "t", { anchor: "middle", size: 10 }));

  const span = hi - lo;
  const step = Math.max(1, Math.ceil(span / 6));
  for (let e = Math.ceil(lo); e <= Math.floor(hi); e += step) {
    body.push(line(plotX, sy(e), plotX + plotW, sy(e), "#e0e0e0", 0.5));
    body.push(text(plotX - 6, sy(e) + 3, `1e${e}`, { anchor: "end", size: 10 }));
  }
  body.push(line(plotX, plotY, plotX, plotY + plotH, "#444444"));
  body.push(line(plotX, plotY + plotH, plotX + plotW, plotY + plotH, "#444444"));

  let index = 0;
  for (const [family, points] of series) {
    const coords: [number, number][] = [];
    for (const [t, v] of points) {
      if (v > 0) coords.push([sx(t), sy(Math.log10(v))]);
    }
    if (coords.length > 0) {
      body.push(polyline(coords, familyColor(family, index)));
    }
    index += 1;
  }
}

/**
 * Render the solver CSV to a four-panel SVG.
 *
 * @param csvText - contents of solver.csv
 * @param level - hierarchy level to plot (default 0, the canvas meshes)
 */
export function renderTrends(csvText: string, level = 0): string {
  const table = parseCsv(csvText);
  requireColumns(
    table,
    ["family", "t", "level", "status", ...PANELS.map(([c]) => c)],
    "solver CSV",
  );
  const rows = table.rows.filter(
    (row) => row.status === "ok" && Number.parseInt(row.level, 10) === level,
  );

  const width = 2 * PANEL_W + GAP + 2 * 16;
  const height = 2 * PANEL_H + GAP + LEGEND_H + 2 * 16;
  const body: string[] = [];

  const allFamilies = new Set<string>();
  PANELS.forEach(([column], k) => {
    const series = seriesByFamily(rows, column);
    for (const family of series.keys()) allFamilies.add(family);
    const frame: Frame = {
      x0: 16 + (k % 2) * (PANEL_W + GAP),
      y0: 16 + Math.floor(k / 2) * (PANEL_H + GAP),
    };
    drawPanel(body, frame, PANELS[k][1], series);
  });

  const families = [...allFamilies].sort();
  drawLegend(body, families, 16 + AX_LEFT, 16 + 2 * PANEL_H + GAP + 18, width - 10);

  return document(width, height, body);
}
