import { describe, expect, it } from "vitest";

import { makeScale, renderCurve, renderOverlay, Viewport } from "../src/curve";
import { CURVE_POINTS, fixtureCurve } from "./fixtures";

const VIEWPORT: Viewport = { width: 640, height: 260, padding: 24 };

describe("renderCurve", () => {
  const payload = fixtureCurve(10, 2, 2, 18);

  it("renders the server export verbatim", () => {
    const rendered = renderCurve(payload, VIEWPORT, 5, 20);
    // the very same array, not a recomputation
    expect(rendered.points).toBe(payload);
    expect(rendered.points).toHaveLength(CURVE_POINTS);
  });

  it("emits one path command per point", () => {
    const rendered = renderCurve(payload, VIEWPORT, null, null);
    const commands = rendered.path.split(" ");
    expect(commands).toHaveLength(CURVE_POINTS);
    expect(commands[0]!.startsWith("M")).toBe(true);
    expect(commands.slice(1).every((c) => c.startsWith("L"))).toBe(true);
  });

  it("places percentile markers by direct binding", () => {
    const rendered = renderCurve(payload, VIEWPORT, 5, 20);
    const scale = makeScale(rendered.xDomain, rendered.yDomain, VIEWPORT);
    expect(rendered.markers.p15).toBe(scale.toPixelX(5));
    expect(rendered.markers.p85).toBe(scale.toPixelX(20));
  });

  it("omits markers when the insight is unfitted", () => {
    const rendered = renderCurve(payload, VIEWPORT, null, null);
    expect(rendered.markers).toEqual({ p15: null, p85: null });
  });

  it("maps the domain edges onto the padded viewport", () => {
    const rendered = renderCurve(payload, VIEWPORT, null, null);
    const scale = makeScale(rendered.xDomain, rendered.yDomain, VIEWPORT);
    expect(scale.toPixelX(rendered.xDomain[0])).toBeCloseTo(VIEWPORT.padding, 10);
    expect(scale.toPixelX(rendered.xDomain[1])).toBeCloseTo(VIEWPORT.width - VIEWPORT.padding, 10);
    expect(scale.toPixelY(0)).toBeCloseTo(VIEWPORT.height - VIEWPORT.padding, 10);
  });
});

describe("renderOverlay", () => {
  it("identical inputs produce identical paths", () => {
    const curve = fixtureCurve(10, 2, 2, 18);
    const side = { curve, p15: 8, p85: 12 };
    const { a, b } = renderOverlay(side, { ...side }, VIEWPORT);
    expect(a.path).toBe(b.path);
    expect(a.markers).toEqual(b.markers);
  });

  it("shares one x domain across both panels", () => {
    const a = { curve: fixtureCurve(8, 2, 0, 16), p15: null, p85: null };
    const b = { curve: fixtureCurve(14, 2, 6, 22), p15: null, p85: null };
    const overlay = renderOverlay(a, b, VIEWPORT);
    expect(overlay.a.xDomain).toEqual([0, 22]);
    expect(overlay.b.xDomain).toEqual(overlay.a.xDomain);
  });
});
