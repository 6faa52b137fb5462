/**
 * Minimal SVG assembly. Coordinates are fixed to two decimals so a
 * re-render of the same inputs is byte-identical.
 */

export function esc(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function px(v: number): string {
  return v.toFixed(2);
}

export interface TextOptions {
  anchor?: "start" | "middle" | "end";
  size?: number;
  fill?: string;
  rotate?: number;
}

export function text(x: number, y: number, s: string, opt: TextOptions = {}): string {
  const anchor = opt.anchor ?? "start";
  const size = opt.size ?? 12;
  const fill = opt.fill ?? "#222222";
  const transform =
    opt.rotate !== undefined
      ? ` transform="rotate(${px(opt.rotate)} ${px(x)} ${px(y)})"`
      : "";
  return (
    `<text x="${px(x)}" y="${px(y)}" font-size="${px(size)}"` +
    ` font-family="Helvetica, Arial, sans-serif" text-anchor="${anchor}"` +
    ` fill="${fill}"${transform}>${esc(s)}</text>`
  );
}

export function line(
  x1: number,
  y1: number,
  x2: number,
  y2: number,
  stroke: string,
  width = 1,
): string {
  return (
    `<line x1="${px(x1)}" y1="${px(y1)}" x2="${px(x2)}" y2="${px(y2)}"` +
    ` stroke="${stroke}" stroke-width="${px(width)}"/>`
  );
}

export function polyline(points: [number, number][], stroke: string, width = 1.5): string {
  const pts = points.map(([x, y]) => `${px(x)},${px(y)}`).join(" ");
  return (
    `<polyline points="${pts}" fill="none" stroke="${stroke}"` +
    ` stroke-width="${px(width)}"/>`
  );
}

export function document(width: number, height: number, body: string[]): string {
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${px(width)}"` +
    ` height="${px(height)}" viewBox="0 0 ${px(width)} ${px(height)}">\n` +
    `<rect x="0" y="0" width="${px(width)}" height="${px(height)}" fill="#ffffff"/>\n` +
    body.join("\n") +
    "\n</svg>\n"
  );
}
