/**
 * viz argument handling: render pipeline outputs to SVG.
 *
 * Usage:
 *   viz heatmap <matrix.json> -o <out.svg>
 *   viz trends <solver.csv> -o <out.svg> [--level N]
 *   viz convergence <convergence.csv> -o <out.svg>
 */

import { readFileSync, writeFileSync } from "node:fs";
import { parseArgs } from "node:util";

import { parseMatrix } from "./matrix.js";
import { renderHeatmap } from "./heatmap.js";
import { renderTrends } from "./trends.js";
import { renderConvergence } from "./convergence.js";

const USAGE = `usage:
  viz heatmap <matrix.json> -o <out.svg>
  viz trends <solver.csv> -o <out.svg> [--level N]
  viz convergence <convergence.csv> -o <out.svg>`;

export function run(argv: string[]): number {
  let parsed;
  try {
    parsed = parseArgs({
      args: argv,
      allowPositionals: true,
      options: {
        output: { type: "string", short: "o" },
        level: { type: "string" },
        help: { type: "boolean", short: "h" },
      },
    });
  } catch (err) {
    console.error((err as Error).message);
    console.error(USAGE);
    return 2;
  }
  if (parsed.values.help) {
    console.log(USAGE);
    return 0;
  }
  const [kind, input] = parsed.positionals;
  const output = parsed.values.output;
  if (!kind || !input || !output) {
    console.error(USAGE);
    return 2;
  }
  if (!["heatmap", "trends", "convergence"].includes(kind)) {
    console.error(`unknown plot kind ${kind}`);
    console.error(USAGE);
    return 2;
  }

  let content: string;
  try {
    content = readFileSync(input, "utf-8");
  } catch (err) {
    console.error(`cannot read ${input}: ${(err as Error).message}`);
    return 1;
  }

  let svg: string;
  try {
    switch (kind) {
      case "heatmap":
        svg = renderHeatmap(parseMatrix(content));
        break;
      case "trends": {
        const level = parsed.values.level ?? "0";
        const parsedLevel = Number.parseInt(level, 10);
        if (!Number.isFinite(parsedLevel) || parsedLevel < 0) {
          console.error(`--level must be a non-negative integer, got ${level}`);
          return 2;
        }
        svg = renderTrends(content, parsedLevel);
        break;
      }
      default:
        svg = renderConvergence(content);
        break;
    }
  } catch (err) {
    console.error((err as Error).message);
    return 1;
  }

  writeFileSync(output, svg, "utf-8");
  return 0;
}
