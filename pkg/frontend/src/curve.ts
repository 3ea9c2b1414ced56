/** Pure geometry for drawing a server-exported density curve.
 *
 * The server ships each curve as an ordered list of [x, y] points; this
 * module only maps those points into pixel space. It never evaluates a
 * density or interpolates new samples, so the rendered point set is always
 * the export verbatim.
 */

export type CurvePoint = [number, number];

export interface Viewport {
  width: number;
  height: number;
  /** Inner padding in pixels on every side. */
  padding: number;
}

export interface RenderedCurve {
  /** The exact points that were rendered, unchanged from the payload. */
  points: CurvePoint[];
  /** SVG path data for the curve polyline. */
  path: string;
  /** Pixel x positions for the p15/p85 markers (null when unfitted). */
  markers: { p15: number | null; p85: number | null };
  xDomain: [number, number];
  yDomain: [number, number];
}

export interface CurveScale {
  toPixelX(x: number): number;
  toPixelY(y: number): number;
}

function domainOf(values: number[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  if (lo === Infinity) return [0, 1];
  if (lo === hi) return [lo - 0.5, hi + 0.5];
  return [lo, hi];
}

export function makeScale(
  xDomain: [number, number],
  yDomain: [number, number],
  viewport: Viewport,
): CurveScale {
  const innerW = viewport.width - 2 * viewport.padding;
  const innerH = viewport.height - 2 * viewport.padding;
  const [x0, x1] = xDomain;
  const [y0, y1] = yDomain;
  return {
    toPixelX: (x) => viewport.padding + ((x - x0) / (x1 - x0)) * innerW,
    // SVG y grows downward
    toPixelY: (y) => viewport.padding + (1 - (y - y0) / (y1 - y0)) * innerH,
  };
}

export function renderCurve(
  points: CurvePoint[],
  viewport: Viewport,
  p15: number | null,
  p85: number | null,
): RenderedCurve {
  const xDomain = domainOf(points.map((p) => p[0]));
  const yDomain: [number, number] = [0, domainOf(points.map((p) => p[1]))[1]];
  const scale = makeScale(xDomain, yDomain, viewport);
  const path = points
    .map(([x, y], i) => `${i === 0 ? "M" : "L"}${scale.toPixelX(x)},${scale.toPixelY(y)}`)
    .join(" ");
  return {
    points,
    path,
    markers: {
      p15: p15 === null ? null : scale.toPixelX(p15),
      p85: p85 === null ? null : scale.toPixelX(p85),
    },
    xDomain,
    yDomain,
  };
}

/** Render both panels of a comparison over one shared x domain so the two
 * curves overlay point-for-point when the players are identical. */
export function renderOverlay(
  a: { curve: CurvePoint[]; p15: number | null; p85: number | null },
  b: { curve: CurvePoint[]; p15: number | null; p85: number | null },
  viewport: Viewport,
): { a: RenderedCurve; b: RenderedCurve } {
  const all = [...a.curve, ...b.curve];
  const xDomain = domainOf(all.map((p) => p[0]));
  const yDomain: [number, number] = [0, domainOf(all.map((p) => p[1]))[1]];
  const scale = makeScale(xDomain, yDomain, viewport);
  const draw = (side: {
    curve: CurvePoint[];
    p15: number | null;
    p85: number | null;
  }): RenderedCurve => ({
    points: side.curve,
    path: side.curve
      .map(([x, y], i) => `${i === 0 ? "M" : "L"}${scale.toPixelX(x)},${scale.toPixelY(y)}`)
      .join(" "),
    markers: {
      p15: side.p15 === null ? null : scale.toPixelX(side.p15),
      p85: side.p85 === null ? null : scale.toPixelX(side.p85),
    },
    xDomain,
    yDomain,
  });
  return { a: draw(a), b: draw(b) };
}
