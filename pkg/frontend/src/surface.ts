/**
 * Drawing surface shared by the SVG and PNG backends. Coordinates are in
 * pixels with the origin at the top-left, matching both targets.
 */

export interface StrokeOpts {
  stroke?: string;
  width?: number;
  dash?: number[];
}

export interface TextOpts {
  size?: number;
  anchor?: "start" | "middle" | "end";
  color?: string;
  rotate?: number; // degrees, about the text position
}

export interface Surface {
  readonly width: number;
  readonly height: number;
  line(x1: number, y1: number, x2: number, y2: number, opts?: StrokeOpts): void;
  polyline(points: Array<[number, number]>, opts?: StrokeOpts): void;
  circle(x: number, y: number, r: number, fill: string): void;
  rect(x: number, y: number, w: number, h: number, fill: string): void;
  text(x: number, y: number, content: string, opts?: TextOpts): void;
  toBuffer(): Buffer;
}

const FONT_FAMILY = "sans-serif";

function escapeXml(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function fmt(v: number): string {
  return String(Math.round(v * 100) / 100);
}

export class SvgSurface implements Surface {
  private parts: string[] = [];

  constructor(public readonly width: number, public readonly height: number) {
    this.parts.push(
      `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
        `viewBox="0 0 ${width} ${height}">`
    );
    this.parts.push(`<rect x="0" y="0" width="${width}" height="${height}" fill="#ffffff"/>`);
  }

  private strokeAttrs(opts?: StrokeOpts): string {
    const stroke = opts?.stroke ?? "#000000";
    const width = opts?.width ?? 1;
    const dash = opts?.dash ? ` stroke-dasharray="${opts.dash.join(",")}"` : "";
    return `stroke="${stroke}" stroke-width="${width}" fill="none"${dash}`;
  }

  line(x1: number, y1: number, x2: number, y2: number, opts?: StrokeOpts): void {
    this.parts.push(
      `<line x1="${fmt(x1)}" y1="${fmt(y1)}" x2="${fmt(x2)}" y2="${fmt(y2)}" ${this.strokeAttrs(opts)}/>`
    );
  }

  polyline(points: Array<[number, number]>, opts?: StrokeOpts): void {
    const pts = points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
    this.parts.push(`<polyline points="${pts}" ${this.strokeAttrs(opts)}/>`);
  }

  circle(x: number, y: number, r: number, fill: string): void {
    this.parts.push(`<circle cx="${fmt(x)}" cy="${fmt(y)}" r="${fmt(r)}" fill="${fill}"/>`);
  }

  rect(x: number, y: number, w: number, h: number, fill: string): void {
    this.parts.push(
      `<rect x="${fmt(x)}" y="${fmt(y)}" width="${fmt(w)}" height="${fmt(h)}" fill="${fill}"/>`
    );
  }

  text(x: number, y: number, content: string, opts?: TextOpts): void {
    const size = opts?.size ?? 12;
    const anchor = opts?.anchor ?? "start";
    const color = opts?.color ?? "#000000";
    const rotate = opts?.rotate
      ? ` transform="rotate(${opts.rotate} ${fmt(x)} ${fmt(y)})"`
      : "";
    this.parts.push(
      `<text x="${fmt(x)}" y="${fmt(y)}" font-family="${FONT_FAMILY}" font-size="${size}" ` +
        `text-anchor="${anchor}" fill="${color}"${rotate}>${escapeXml(content)}</text>`
    );
  }

  toBuffer(): Buffer {
    return Buffer.from(this.parts.join("\n") + "\n</svg>\n", "utf8");
  }
}

type Canvas2D = {
  getContext(kind: "2d"): CanvasCtx;
  toBuffer(mime: "image/png"): Buffer;
};

type CanvasCtx = {
  fillStyle: string;
  strokeStyle: string;
  lineWidth: number;
  font: string;
  textAlign: string;
  textBaseline: string;
  setLineDash(d: number[]): void;
  beginPath(): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  stroke(): void;
  fill(): void;
  fillRect(x: number, y: number, w: number, h: number): void;
  fillText(s: string, x: number, y: number): void;
  save(): void;
  restore(): void;
  translate(x: number, y: number): void;
  rotate(rad: number): void;
};

export class CanvasSurface implements Surface {
  private ctx: CanvasCtx;
  private canvas: Canvas2D;

  constructor(public readonly width: number, public readonly height: number) {
    // lazy require keeps SVG-only use free of the native dependency
    const { createCanvas } = require("@napi-rs/canvas");
    this.canvas = createCanvas(width, height);
    this.ctx = this.canvas.getContext("2d");
    this.ctx.fillStyle = "#ffffff";
    this.ctx.fillRect(0, 0, width, height);
  }

  private applyStroke(opts?: StrokeOpts): void {
    this.ctx.strokeStyle = opts?.stroke ?? "#000000";
    this.ctx.lineWidth = opts?.width ?? 1;
    this.ctx.setLineDash(opts?.dash ?? []);
  }

  line(x1: number, y1: number, x2: number, y2: number, opts?: StrokeOpts): void {
    this.applyStroke(opts);
    this.ctx.beginPath();
    this.ctx.moveTo(x1, y1);
    this.ctx.lineTo(x2, y2);
    this.ctx.stroke();
  }

  polyline(points: Array<[number, number]>, opts?: StrokeOpts): void {
    if (points.length < 2) return;
    this.applyStroke(opts);
    this.ctx.beginPath();
    this.ctx.moveTo(points[0][0], points[0][1]);
    for (const [x, y] of points.slice(1)) this.ctx.lineTo(x, y);
    this.ctx.stroke();
  }

  circle(x: number, y: number, r: number, fill: string): void {
    this.ctx.fillStyle = fill;
    this.ctx.beginPath();
    this.ctx.arc(x, y, r, 0, 2 * Math.PI);
    this.ctx.fill();
  }

  rect(x: number, y: number, w: number, h: number, fill: string): void {
    this.ctx.fillStyle = fill;
    this.ctx.fillRect(x, y, w, h);
  }

  text(x: number, y: number, content: string, opts?: TextOpts): void {
    const size = opts?.size ?? 12;
    this.ctx.fillStyle = opts?.color ?? "#000000";
    this.ctx.font = `${size}px ${FONT_FAMILY}`;
    this.ctx.textAlign =
      opts?.anchor === "middle" ? "center" : opts?.anchor === "end" ? "right" : "left";
    this.ctx.textBaseline = "alphabetic";
    if (opts?.rotate) {
      this.ctx.save();
      this.ctx.translate(x, y);
      this.ctx.rotate((opts.rotate * Math.PI) / 180);
      this.ctx.fillText(content, 0, 0);
      this.ctx.restore();
    } else {
      this.ctx.fillText(content, x, y);
    }
  }

  toBuffer(): Buffer {
    return this.canvas.toBuffer("image/png");
  }
}

export function surfaceForPath(path: string, width: number, height: number): Surface {
  if (path.toLowerCase().endsWith(".svg")) return new SvgSurface(width, height);
  if (path.toLowerCase().endsWith(".png")) return new CanvasSurface(width, height);
  throw new Error(`unsupported output extension (use .svg or .png): ${path}`);
}
