/**
 * SVG overlay rendering. Everything drawn here came from the solver API
 * or from the user's own marks; nothing is computed from the geometry.
 *
 * Overlay elements carry stable classes (conic-branch, epipole-marker,
 * epipolar-line, banner, ...) that the tests assert on.
 */

import { colorFor, type Pair } from "./session";
import type { SolveResponse } from "./types";

const SVG_NS = "http://www.w3.org/2000/svg";

function el<K extends keyof SVGElementTagNameMap>(
  doc: Document,
  tag: K,
  attrs: Record<string, string>,
): SVGElementTagNameMap[K] {
  const node = doc.createElementNS(SVG_NS, tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  return node;
}

export function clearGroup(g: SVGGElement): void {
  while (g.firstChild) g.removeChild(g.firstChild);
}

export function starPath(cx: number, cy: number, r: number): string {
  const pts: string[] = [];
  for (let i = 0; i < 10; i++) {
    const rad = i % 2 === 0 ? r : 0.42 * r;
    const a = (Math.PI / 5) * i - Math.PI / 2;
    pts.push(`${cx + rad * Math.cos(a)},${cy + rad * Math.sin(a)}`);
  }
  return `M${pts.join("L")}Z`;
}

/** Dehomogenize a 3-vector from the API; null for (near-)ideal points. */
export function pixelOf(h: number[]): [number, number] | null {
  const n = Math.hypot(h[0], h[1], h[2]);
  if (!(n > 0) || Math.abs(h[2]) < 1e-9 * n) return null;
  return [h[0] / h[2], h[1] / h[2]];
}

/** Clip the line ax + by + c = 0 to a w x h pixel rectangle. */
export function clipLineToRect(
  line: number[],
  w: number,
  h: number,
): [[number, number], [number, number]] | null {
  const [a, b, c] = line;
  const hits: [number, number][] = [];
  const push = (x: number, y: number) => {
    if (x >= -1e-9 && x <= w + 1e-9 && y >= -1e-9 && y <= h + 1e-9) {
      if (!hits.some(([hx, hy]) => Math.hypot(hx - x, hy - y) < 1e-6)) {
        hits.push([x, y]);
      }
    }
  };
  if (Math.abs(b) > 1e-12) {
    push(0, -c / b);
    push(w, -(c + a * w) / b);
  }
  if (Math.abs(a) > 1e-12) {
    push(-c / a, 0);
    push(-(c + b * h) / a, h);
  }
  if (hits.length < 2) return null;
  return [hits[0], hits[1]];
}

export interface OverlayOptions {
  stale?: boolean;
  markerRadius?: number;
}

/** Draw the user's own marks (pairs + known epipole/line) in one pane. */
export function renderMarks(
  g: SVGGElement,
  pairs: Pair[],
  which: 1 | 2,
  known: { epipole1: number[] | null; epiline1: number[] | null },
  imageSize: [number, number] | null,
  markerRadius = 5,
): void {
  const doc = g.ownerDocument;
  for (const pair of pairs) {
    const p = which === 1 ? pair.p1 : pair.p2;
    const dot = el(doc, "circle", {
      cx: String(p[0]),
      cy: String(p[1]),
      r: String(markerRadius),
      class: "pair-marker",
      fill: colorFor(pair.id),
      "data-pair-id": String(pair.id),
      "data-which": String(which),
    });
    g.appendChild(dot);
  }
  if (which === 1 && known.epipole1) {
    g.appendChild(
      el(doc, "path", {
        d: starPath(known.epipole1[0], known.epipole1[1], 2.2 * markerRadius),
        class: "known-epipole",
        "data-role": "known-epipole",
      }),
    );
  }
  if (which === 1 && known.epiline1 && imageSize) {
    const seg = clipLineToRect(known.epiline1, imageSize[0], imageSize[1]);
    if (seg) {
      g.appendChild(
        el(doc, "line", {
          x1: String(seg[0][0]),
          y1: String(seg[0][1]),
          x2: String(seg[1][0]),
          y2: String(seg[1][1]),
          class: "known-epiline",
        }),
      );
    }
  }
}

/** Draw the solver's answer over image 2 (and image 1 for 6-point). */
export function renderSolveOverlay(
  g1: SVGGElement,
  g2: SVGGElement,
  resp: SolveResponse | null,
  opts: OverlayOptions = {},
): void {
  const doc = g2.ownerDocument;
  for (const g of [g1, g2]) {
    g.classList.toggle("stale", Boolean(opts.stale));
  }
  if (!resp) return;
  const r = opts.markerRadius ?? 5;
  if (resp.method === "four_conic") {
    for (const branch of resp.branches) {
      if (!branch.length) continue;
      g2.appendChild(
        el(doc, "polyline", {
          points: branch.map(([x, y]) => `${x},${y}`).join(" "),
          class: "conic-branch",
          fill: "none",
        }),
      );
    }
    return;
  }
  if (resp.method === "five_cremona") {
    const at = pixelOf(resp.epipole);
    if (at) {
      g2.appendChild(
        el(doc, "path", {
          d: starPath(at[0], at[1], 2.6 * r),
          class: "epipole-marker",
          "data-role": "epipole",
        }),
      );
    }
    for (const alt of resp.alternates) {
      const p = pixelOf(alt);
      if (p) {
        g2.appendChild(
          el(doc, "circle", {
            cx: String(p[0]),
            cy: String(p[1]),
            r: String(r),
            class: "alternate-marker",
            fill: "none",
          }),
        );
      }
    }
    return;
  }
  resp.candidates.forEach((cand, rank) => {
    const p2 = pixelOf(cand.epipole2);
    if (p2) {
      g2.appendChild(
        el(doc, "path", {
          d: starPath(p2[0], p2[1], 2.6 * r),
          class: `epipole-marker candidate rank-${rank}`,
          "data-rank": String(rank),
        }),
      );
    }
    const p1 = pixelOf(cand.epipole1);
    if (p1) {
      g1.appendChild(
        el(doc, "path", {
          d: starPath(p1[0], p1[1], 2.6 * r),
          class: `epipole-marker candidate rank-${rank}`,
          "data-rank": String(rank),
        }),
      );
    }
  });
}

/** Draw epipolar lines returned by /api/fmatrix. */
export function renderEpipolarLines(
  g: SVGGElement,
  lines: number[][],
  imageSize: [number, number],
  cls = "epipolar-line",
): void {
  const doc = g.ownerDocument;
  lines.forEach((line, i) => {
    const seg = clipLineToRect(line, imageSize[0], imageSize[1]);
    if (!seg) return;
    g.appendChild(
      el(doc, "line", {
        x1: String(seg[0][0]),
        y1: String(seg[0][1]),
        x2: String(seg[1][0]),
        y2: String(seg[1][1]),
        class: cls,
        "data-line-index": String(i),
      }),
    );
  });
}

/** The residual badge summarizing the last solver response. */
export function renderBadge(
  badge: HTMLElement,
  resp: SolveResponse | null,
  stale: boolean,
): void {
  badge.classList.toggle("stale", stale);
  if (!resp) {
    badge.textContent = "";
    badge.classList.remove("visible");
    return;
  }
  badge.classList.add("visible");
  if (resp.method === "four_conic") {
    badge.textContent = `conic locus (${resp.classification})`;
  } else if (resp.method === "five_cremona") {
    badge.textContent = `epipole found · residual ${resp.residual_rms.toExponential(2)}`;
  } else {
    const best = resp.candidates[0];
    badge.textContent =
      `${resp.candidates.length} candidate pair(s) · best residual ` +
      best.residual_rms.toExponential(2);
  }
}

/** Non-blocking banner for solver degeneracies (HTTP 422) and errors. */
export function renderBanner(banner: HTMLElement, message: string | null): void {
  if (message) {
    banner.textContent = message;
    banner.classList.add("visible");
  } else {
    banner.textContent = "";
    banner.classList.remove("visible");
  }
}
