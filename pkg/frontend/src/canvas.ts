/** Top-down SVG rendering of a layout.
 *
 * Deliberately dumb about geometry: object rectangles are drawn with SVG
 * translate/rotate transforms straight from the service's numbers (the
 * whole scene sits inside one y-flip group so world coordinates go in
 * verbatim, +y up).  Which objects get highlighted comes from the
 * service's validation report name-for-name — this module never measures
 * overlap or containment itself.
 *
 * Output is a pure string function of (layout, report, options): same
 * input, same bytes.
 */

import type { LayoutDoc, ObjectDoc, ReportDoc } from "./types.js";

export class CanvasError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "CanvasError";
  }
}

export interface CanvasOptions {
  /** apply report highlights (studio default: on) */
  overlay?: boolean;
  /** instance id to mark selected, if any */
  selectedId?: string | null;
  /** extra metres of breathing room around the floor */
  margin?: number;
  /** CSS pixel width of the <svg>; height follows the aspect ratio */
  pixelWidth?: number;
}

/** Attribute formatting: 0.1 mm display precision, stable across calls. */
export const fmt = (v: number): string => String(Math.round(v * 1e4) / 1e4);

const escapeXml = (s: string): string =>
  s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");

function checkLayout(layout: LayoutDoc): void {
  if (!layout || typeof layout !== "object") throw new CanvasError("layout payload is not an object");
  const verts = layout.floor?.vertices;
  if (!Array.isArray(verts) || verts.length < 3) {
    throw new CanvasError("layout floor needs at least 3 vertices");
  }
  for (const v of verts) {
    if (!Array.isArray(v) || v.length !== 2 || !v.every(Number.isFinite)) {
      throw new CanvasError("layout floor vertices must be [x, y] number pairs");
    }
  }
  if (!Array.isArray(layout.objects)) throw new CanvasError("layout objects must be an array");
  layout.objects.forEach((obj: ObjectDoc, i: number) => {
    const numbers = [
      obj?.bbox?.width,
      obj?.bbox?.depth,
      obj?.coordinates?.x,
      obj?.coordinates?.y,
      obj?.rotate?.angle,
    ];
    if (typeof obj?.instance_id !== "string" || !numbers.every(Number.isFinite)) {
      throw new CanvasError(`layout object ${i} is missing its placement fields`);
    }
  });
}

/** The ids the report names, split by what it blames them for. */
export function flaggedIds(report: ReportDoc | null): { overlap: Set<string>; oob: Set<string> } {
  const overlap = new Set<string>();
  const oob = new Set<string>();
  if (report) {
    for (const pair of report.pair_overlaps ?? []) {
      overlap.add(pair.first);
      overlap.add(pair.second);
    }
    for (const violation of report.boundary_violations ?? []) {
      oob.add(violation.instance_id);
    }
  }
  return { overlap, oob };
}

export function renderCanvas(
  layout: LayoutDoc,
  report: ReportDoc | null,
  options: CanvasOptions = {},
): string {
  checkLayout(layout);
  const overlay = options.overlay ?? true;
  const margin = options.margin ?? 0.5;
  const pixelWidth = options.pixelWidth ?? 640;
  const flags = overlay ? flaggedIds(report) : { overlap: new Set<string>(), oob: new Set<string>() };

  const xs = layout.floor.vertices.map((v) => v[0]);
  const ys = layout.floor.vertices.map((v) => v[1]);
  const minX = Math.min(...xs) - margin;
  const maxX = Math.max(...xs) + margin;
  const minY = Math.min(...ys) - margin;
  const maxY = Math.max(...ys) + margin;
  const width = maxX - minX;
  const height = maxY - minY;
  const pixelHeight = Math.round((pixelWidth * height) / width);

  const lines: string[] = [];
  lines.push(
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="${fmt(minX)} ${fmt(minY)} ${fmt(width)} ${fmt(height)}" width="${pixelWidth}" height="${pixelHeight}" class="studio-canvas">`,
  );
  // everything below is in world coordinates; this flip makes +y point up
  lines.push(`<g transform="translate(0 ${fmt(minY + maxY)}) scale(1 -1)">`);

  const floorPoints = layout.floor.vertices.map((v) => `${fmt(v[0])},${fmt(v[1])}`).join(" ");
  lines.push(`<polygon class="floor" points="${floorPoints}"/>`);

  for (const obj of layout.objects) {
    const classes = ["object"];
    if (flags.overlap.has(obj.instance_id)) classes.push("overlap");
    if (flags.oob.has(obj.instance_id)) classes.push("oob");
    if (options.selectedId != null && obj.instance_id === options.selectedId) classes.push("selected");

    const { x, y } = obj.coordinates;
    const deg = (obj.rotate.angle * 180) / Math.PI;
    const w = obj.bbox.width;
    const d = obj.bbox.depth;
    const tooltip =
      `${obj.description} — (${fmt(x)}, ${fmt(y)}) rot ${fmt(obj.rotate.angle)} rad`;

    lines.push(
      `<g class="${classes.join(" ")}" data-id="${escapeXml(obj.instance_id)}" ` +
        `transform="translate(${fmt(x)} ${fmt(y)}) rotate(${fmt(deg)})">`,
    );
    lines.push(`<title>${escapeXml(tooltip)}</title>`);
    lines.push(
      `<rect x="${fmt(-w / 2)}" y="${fmt(-d / 2)}" width="${fmt(w)}" height="${fmt(d)}"/>`,
    );
    // facing direction: +y in the object's own frame
    lines.push(`<line class="heading" x1="0" y1="0" x2="0" y2="${fmt(d / 2)}"/>`);
    lines.push(`</g>`);
  }

  lines.push(`</g>`);
  lines.push(`</svg>`);
  return lines.join("\n");
}

/** Shown in place of the canvas when a payload cannot be drawn. */
export function errorPanelHtml(message: string): string {
  return `<div class="error-panel" role="alert">${escapeXml(message)}</div>`;
}
