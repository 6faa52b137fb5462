import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { describe, expect, it, vi } from "vitest";
import { run } from "../src/main.js";

function workdir(): string {
  return mkdtempSync(join(tmpdir(), "viz-"));
}

const matrix = JSON.stringify({
  labels: ["a", "b"],
  rho: [
    [1.0, 0.7],
    [0.7, 1.0],
  ],
  class: [
    ["strong+", "weak+"],
    ["weak+", "strong+"],
  ],
});

describe("run", () => {
  it("renders a heatmap end to end", () => {
    const dir = workdir();
    const input = join(dir, "m.json");
    const output = join(dir, "m.svg");
    writeFileSync(input, matrix);
    expect(run(["heatmap", input, "-o", output])).toBe(0);
    expect(readFileSync(output, "utf-8")).toContain('data-bucket="weak+"');
  });

  it("fails with a message on malformed JSON", () => {
    const dir = workdir();
    const input = join(dir, "bad.json");
    writeFileSync(input, "{broken");
    const stderr = vi.spyOn(console, "error").mockImplementation(() => {});
    expect(run(["heatmap", input, "-o", join(dir, "out.svg")])).toBe(1);
    expect(stderr.mock.calls.flat().join(" ")).toMatch(/not valid JSON/);
    stderr.mockRestore();
  });

  it("fails on an unreadable input path", () => {
    const dir = workdir();
    const stderr = vi.spyOn(console, "error").mockImplementation(() => {});
    expect(run(["trends", join(dir, "absent.csv"), "-o", join(dir, "o.svg")])).toBe(1);
    stderr.mockRestore();
  });

  it("rejects unknown plot kinds and missing arguments", () => {
    const stderr = vi.spyOn(console, "error").mockImplementation(() => {});
    expect(run(["sparkline", "x", "-o", "y"])).toBe(2);
    expect(run([])).toBe(2);
    expect(run(["trends", "x.csv"])).toBe(2);
    stderr.mockRestore();
  });

  it("rejects a malformed --level", () => {
    const dir = workdir();
    const input = join(dir, "s.csv");
    writeFileSync(input, "mesh_id,family,t,level\n");
    const stderr = vi.spyOn(console, "error").mockImplementation(() => {});
    expect(run(["trends", input, "-o", join(dir, "o.svg"), "--level", "-3"])).toBe(2);
    stderr.mockRestore();
  });
});
