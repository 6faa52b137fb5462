import { describe, expect, it } from "vitest";
import { renderHeatmap } from "../src/heatmap.js";
import { parseMatrix, type CorrelationMatrix } from "../src/matrix.js";

const identity2: CorrelationMatrix = {
  labels: ["x", "y"],
  rho: [
    [1.0, 0.0],
    [0.0, 1.0],
  ],
  class: [
    ["strong+", "none"],
    ["none", "strong+"],
  ],
};

function cellTag(svg: string, row: string, col: string): string {
  const match = svg.match(
    new RegExp(`<rect[^>]*data-row="${row}"[^>]*data-col="${col}"[^>]*>`),
  );
  expect(match).not.toBeNull();
  return match![0];
}

describe("renderHeatmap", () => {
  it("marks the identity diagonal as strong+", () => {
    const svg = renderHeatmap(identity2);
    expect(svg.match(/data-bucket=/g)).toHaveLength(4);
    expect(cellTag(svg, "x", "x")).toContain('data-bucket="strong+"');
    expect(cellTag(svg, "y", "y")).toContain('data-bucket="strong+"');
    expect(cellTag(svg, "x", "y")).toContain('data-bucket="none"');
  });

  it("keeps the boundary coefficient 0.7 in the weak+ bucket", () => {
    const doc = {
      labels: ["a", "b"],
      rho: [
        [1.0, 0.7],
        [0.7, 1.0],
      ],
      class: [
        ["strong+", "weak+"],
        ["weak+", "strong+"],
      ],
    };
    const svg = renderHeatmap(parseMatrix(JSON.stringify(doc)));
    expect(cellTag(svg, "a", "b")).toContain('data-bucket="weak+"');
    expect(svg).toContain(">0.70<");
  });

  it("emits one annotated cell per matrix entry", () => {
    const n = 6;
    const labels = ["CR", "KAR", "PAR", "MA", "ER", "NPD"];
    const m: CorrelationMatrix = {
      labels,
      rho: labels.map((_, i) => labels.map((_, j) => (i === j ? 1.0 : 0.2))),
      class: labels.map((_, i) =>
        labels.map((_, j) => (i === j ? "strong+" : "none")),
      ),
    };
    const svg = renderHeatmap(m);
    expect(svg.match(/data-bucket=/g)).toHaveLength(n * n);
    for (const label of labels) {
      expect(svg).toContain(label);
    }
  });

  it("re-renders byte-identically", () => {
    expect(renderHeatmap(identity2)).toBe(renderHeatmap(identity2));
  });
});
