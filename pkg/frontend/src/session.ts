/**
 * Annotation session state: ordered correspondence pairs, the known mark
 * in image 1 (epipole point or epipolar line), and an undo history.
 *
 * The session never computes geometry; it only assembles solver requests.
 * Request JSON is canonical (fixed key order, no whitespace) so a replayed
 * session reproduces the captured request byte for byte.
 */

import type { Pixel, ProblemFile } from "./types";

export interface Pair {
  id: number;
  p1: Pixel;
  p2: Pixel;
}

export interface Session {
  imageSize1: [number, number] | null;
  imageSize2: [number, number] | null;
  pairs: Pair[];
  epipole1: Pixel | null;
  epiline1: [number, number, number] | null;
  nextId: number;
}

export function newSession(): Session {
  return {
    imageSize1: null,
    imageSize2: null,
    pairs: [],
    epipole1: null,
    epiline1: null,
    nextId: 0,
  };
}

/** Marker colors are bound to pair identity, so edits never recolor. */
const PALETTE = [
  "#e6194b", "#3cb44b", "#ffe119", "#4363d8", "#f58231", "#911eb4",
  "#46f0f0", "#f032e6", "#bcf60c", "#fabebe", "#008080", "#e6beff",
];

export function colorFor(pairId: number): string {
  return PALETTE[((pairId % PALETTE.length) + PALETTE.length) % PALETTE.length];
}

/** Clicks quantize to 1/100 px so serialized coordinates stay short. */
export function quantize(v: number): number {
  return Math.round(v * 100) / 100;
}

function quantizePoint(p: Pixel): Pixel {
  return [quantize(p[0]), quantize(p[1])];
}

export function clone(s: Session): Session {
  return {
    imageSize1: s.imageSize1 ? [...s.imageSize1] : null,
    imageSize2: s.imageSize2 ? [...s.imageSize2] : null,
    pairs: s.pairs.map((p) => ({ id: p.id, p1: [...p.p1], p2: [...p.p2] })),
    epipole1: s.epipole1 ? [...s.epipole1] : null,
    epiline1: s.epiline1 ? [...s.epiline1] : null,
    nextId: s.nextId,
  };
}

export function addPair(s: Session, p1: Pixel, p2: Pixel): Session {
  const out = clone(s);
  out.pairs.push({ id: out.nextId, p1: quantizePoint(p1), p2: quantizePoint(p2) });
  out.nextId += 1;
  return out;
}

export function movePoint(
  s: Session,
  pairId: number,
  which: 1 | 2,
  to: Pixel,
): Session {
  const out = clone(s);
  const pair = out.pairs.find((p) => p.id === pairId);
  if (!pair) throw new Error(`no pair with id ${pairId}`);
  if (which === 1) pair.p1 = quantizePoint(to);
  else pair.p2 = quantizePoint(to);
  return out;
}

export function deletePair(s: Session, pairId: number): Session {
  const out = clone(s);
  const n = out.pairs.length;
  out.pairs = out.pairs.filter((p) => p.id !== pairId);
  if (out.pairs.length === n) throw new Error(`no pair with id ${pairId}`);
  return out;
}

export function setEpipole(s: Session, at: Pixel): Session {
  const out = clone(s);
  out.epipole1 = quantizePoint(at);
  out.epiline1 = null;
  return out;
}

/**
 * The epipolar-line mark comes from two clicked points; encoding them as
 * line coefficients is input packing for the wire format, not displayed
 * geometry (everything drawn still round-trips through the API).
 */
export function setEpilineThrough(s: Session, a: Pixel, b: Pixel): Session {
  const qa = quantizePoint(a);
  const qb = quantizePoint(b);
  const coeffs: [number, number, number] = [
    qa[1] - qb[1],
    qb[0] - qa[0],
    qa[0] * qb[1] - qb[0] * qa[1],
  ];
  const norm = Math.hypot(coeffs[0], coeffs[1]);
  if (norm < 1e-9) throw new Error("epipolar-line marks must be distinct points");
  const out = clone(s);
  out.epiline1 = [
    quantize((coeffs[0] / norm) * 100) / 100,
    quantize((coeffs[1] / norm) * 100) / 100,
    quantize((coeffs[2] / norm) * 100) / 100,
  ];
  out.epipole1 = null;
  return out;
}

export function setEpiline(
  s: Session,
  line: [number, number, number],
): Session {
  const out = clone(s);
  out.epiline1 = [...line];
  out.epipole1 = null;
  return out;
}

export function clearMarks(s: Session): Session {
  const out = clone(s);
  out.epipole1 = null;
  out.epiline1 = null;
  return out;
}

/**
 * The solver request for the current marks, or null while the session is
 * not solvable (fewer than 4 / more than 6 pairs, or the known input that
 * matches the pair count is missing).
 */
export function buildSolveRequest(s: Session): ProblemFile | null {
  const n = s.pairs.length;
  if (n < 4 || n > 6) return null;
  if ((n === 4 || n === 5) && !s.epipole1) return null;
  if (n === 6 && !s.epiline1) return null;
  const req: ProblemFile = {
    points1: s.pairs.map((p) => [...p.p1] as Pixel),
    points2: s.pairs.map((p) => [...p.p2] as Pixel),
  };
  if (n === 6) req.epiline1 = [...s.epiline1!];
  else req.epipole1 = [...s.epipole1!];
  if (s.imageSize1) req.image_size1 = [...s.imageSize1];
  if (s.imageSize2) req.image_size2 = [...s.imageSize2];
  return req;
}

/** Canonical bytes of the solver request (fixed key order, no spaces). */
export function solveRequestJson(s: Session): string | null {
  const req = buildSolveRequest(s);
  return req === null ? null : JSON.stringify(req);
}

/**
 * Session files are the solver request fields (so they stay compatible
 * with problem files) plus a "ui" block of annotation metadata.
 */
export function exportSession(s: Session): string {
  const body: Record<string, unknown> = {
    points1: s.pairs.map((p) => p.p1),
    points2: s.pairs.map((p) => p.p2),
  };
  if (s.epipole1) body.epipole1 = s.epipole1;
  if (s.epiline1) body.epiline1 = s.epiline1;
  if (s.imageSize1) body.image_size1 = s.imageSize1;
  if (s.imageSize2) body.image_size2 = s.imageSize2;
  body.ui = { version: 1, pair_ids: s.pairs.map((p) => p.id), next_id: s.nextId };
  return JSON.stringify(body);
}

export function importSession(text: string): Session {
  const raw = JSON.parse(text);
  const points1 = raw.points1 as Pixel[] | undefined;
  const points2 = raw.points2 as Pixel[] | undefined;
  if (!Array.isArray(points1) || !Array.isArray(points2)) {
    throw new Error("session file needs points1 and points2");
  }
  if (points1.length !== points2.length) {
    throw new Error("session file has mismatched point lists");
  }
  const ui = raw.ui ?? {};
  const ids: number[] = Array.isArray(ui.pair_ids) ? ui.pair_ids : [];
  const s = newSession();
  points1.forEach((p1, i) => {
    s.pairs.push({
      id: typeof ids[i] === "number" ? ids[i] : i,
      p1: [p1[0], p1[1]],
      p2: [points2[i][0], points2[i][1]],
    });
  });
  s.nextId =
    typeof ui.next_id === "number"
      ? ui.next_id
      : s.pairs.reduce((m, p) => Math.max(m, p.id + 1), 0);
  s.epipole1 = raw.epipole1 ? [raw.epipole1[0], raw.epipole1[1]] : null;
  s.epiline1 = raw.epiline1
    ? [raw.epiline1[0], raw.epiline1[1], raw.epiline1[2]]
    : null;
  s.imageSize1 = raw.image_size1 ? [raw.image_size1[0], raw.image_size1[1]] : null;
  s.imageSize2 = raw.image_size2 ? [raw.image_size2[0], raw.image_size2[1]] : null;
  return s;
}

/** Mutation wrapper holding the undo history and response staleness. */
export class SessionStore {
  private history: Session[] = [];
  current: Session = newSession();
  /** True when marks changed after the last solver response arrived. */
  stale = false;

  private commit(next: Session): void {
    this.history.push(this.current);
    if (this.history.length > 200) this.history.shift();
    this.current = next;
    this.stale = true;
  }

  apply(step: (s: Session) => Session): void {
    this.commit(step(this.current));
  }

  /** Mutate without a history entry (live drags commit once at start). */
  replace(step: (s: Session) => Session): void {
    this.current = step(this.current);
    this.stale = true;
  }

  undo(): boolean {
    const prev = this.history.pop();
    if (!prev) return false;
    this.current = prev;
    this.stale = true;
    return true;
  }

  canUndo(): boolean {
    return this.history.length > 0;
  }

  markFresh(): void {
    this.stale = false;
  }
}
