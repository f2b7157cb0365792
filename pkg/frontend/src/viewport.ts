/**
 * Zoom/pan state per image pane. Screen = scale * image + offset; the
 * image <img> and the SVG overlay group share one matrix, so overlays
 * stay registered to pixels at any zoom.
 */

export interface View {
  scale: number;
  tx: number;
  ty: number;
}

export const IDENTITY: View = { scale: 1, tx: 0, ty: 0 };

export function toScreen(v: View, p: [number, number]): [number, number] {
  return [v.scale * p[0] + v.tx, v.scale * p[1] + v.ty];
}

export function toImage(v: View, p: [number, number]): [number, number] {
  return [(p[0] - v.tx) / v.scale, (p[1] - v.ty) / v.scale];
}

/** Zoom by `factor` keeping the image point under (sx, sy) fixed. */
export function zoomAt(v: View, factor: number, sx: number, sy: number): View {
  const scale = Math.min(Math.max(v.scale * factor, 0.05), 64);
  const k = scale / v.scale;
  return {
    scale,
    tx: sx - k * (sx - v.tx),
    ty: sy - k * (sy - v.ty),
  };
}

export function pan(v: View, dx: number, dy: number): View {
  return { scale: v.scale, tx: v.tx + dx, ty: v.ty + dy };
}

export function matrixAttr(v: View): string {
  return `matrix(${v.scale},0,0,${v.scale},${v.tx},${v.ty})`;
}

export function cssTransform(v: View): string {
  return `translate(${v.tx}px, ${v.ty}px) scale(${v.scale})`;
}
