import { describe, expect, it } from "vitest";

import {
  IDENTITY,
  cssTransform,
  matrixAttr,
  pan,
  toImage,
  toScreen,
  zoomAt,
} from "../src/viewport";

describe("viewport transforms", () => {
  it("round-trips screen and image coordinates", () => {
    const v = { scale: 2.5, tx: -40, ty: 12 };
    const p: [number, number] = [123.4, 56.7];
    const back = toImage(v, toScreen(v, p));
    expect(back[0]).toBeCloseTo(p[0], 10);
    expect(back[1]).toBeCloseTo(p[1], 10);
  });

  it("zoomAt keeps the anchor's image point fixed on screen", () => {
    let v = { ...IDENTITY };
    const anchor: [number, number] = [320, 240];
    const imageUnderAnchor = toImage(v, anchor);
    v = zoomAt(v, 1.75, anchor[0], anchor[1]);
    const after = toScreen(v, imageUnderAnchor);
    expect(after[0]).toBeCloseTo(anchor[0], 9);
    expect(after[1]).toBeCloseTo(anchor[1], 9);
    expect(v.scale).toBeCloseTo(1.75);
  });

  it("zoom clamps to sane bounds", () => {
    let v = { ...IDENTITY };
    for (let i = 0; i < 100; i++) v = zoomAt(v, 10, 0, 0);
    expect(v.scale).toBeLessThanOrEqual(64);
    for (let i = 0; i < 100; i++) v = zoomAt(v, 0.01, 0, 0);
    expect(v.scale).toBeGreaterThanOrEqual(0.05);
  });

  it("pan composes additively", () => {
    const v = pan(pan(IDENTITY, 5, -3), -2, 10);
    expect(v.tx).toBe(3);
    expect(v.ty).toBe(7);
    expect(v.scale).toBe(1);
  });

  it("emits matching svg and css transforms", () => {
    const v = { scale: 2, tx: 10, ty: -5 };
    expect(matrixAttr(v)).toBe("matrix(2,0,0,2,10,-5)");
    expect(cssTransform(v)).toBe("translate(10px, -5px) scale(2)");
  });
});
