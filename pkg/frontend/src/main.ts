/**
 * Buddy-search annotator: load two photos taken toward each other, mark
 * where the other camera appears in image 1 (or a line it must be on),
 * click correspondences in pairs, and watch the search space tighten -
 * a curve to scan at 4 pairs, a located point at 5, candidate pairs at 6.
 *
 * Images never leave the browser; only pixel coordinates are posted.
 */

import { SolverClient, type SolveOutcome } from "./api";
import {
  renderBadge,
  renderBanner,
  renderEpipolarLines,
  renderMarks,
  renderSolveOverlay,
} from "./overlay";
import {
  SessionStore,
  addPair,
  deletePair,
  exportSession,
  importSession,
  movePoint,
  setEpipole,
  setEpilineThrough,
  solveRequestJson,
  type Session,
} from "./session";
import type { FmatrixResponse, SolveResponse } from "./types";
import {
  IDENTITY,
  cssTransform,
  matrixAttr,
  pan,
  toImage,
  zoomAt,
  type View,
} from "./viewport";

type Mode = "pair" | "epipole" | "line" | "inspect";

interface Pane {
  which: 1 | 2;
  stage: HTMLElement;
  img: HTMLImageElement;
  svg: SVGSVGElement;
  content: SVGGElement;
  view: View;
}

const store = new SessionStore();
const client = new SolverClient("");

let mode: Mode = "pair";
let pendingP1: [number, number] | null = null;
let pendingLineA: [number, number] | null = null;
let lastResponse: SolveResponse | null = null;
let lastFmatrix: FmatrixResponse | null = null;
let drag: { pane: Pane; pairId: number; moved: boolean } | null = null;

function byId<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

function makePane(which: 1 | 2): Pane {
  const stage = byId<HTMLElement>(`stage${which}`);
  const img = byId<HTMLImageElement>(`img${which}`);
  const svg = stage.querySelector("svg") as SVGSVGElement;
  const content = svg.querySelector("g.content") as SVGGElement;
  return { which, stage, img, svg, content, view: { ...IDENTITY } };
}

const panes: [Pane, Pane] = [makePane(1), makePane(2)];
const badge = byId<HTMLElement>("badge");
const banner = byId<HTMLElement>("banner");
const hint = byId<HTMLElement>("hint");

function applyView(pane: Pane): void {
  pane.img.style.transform = cssTransform(pane.view);
  pane.content.setAttribute("transform", matrixAttr(pane.view));
}

function sessionSizes(s: Session): void {
  s.imageSize1 = panes[0].img.naturalWidth
    ? [panes[0].img.naturalWidth, panes[0].img.naturalHeight]
    : s.imageSize1;
  s.imageSize2 = panes[1].img.naturalWidth
    ? [panes[1].img.naturalWidth, panes[1].img.naturalHeight]
    : s.imageSize2;
}

function hintText(): string {
  const s = store.current;
  const n = s.pairs.length;
  if (!panes[0].img.src || !panes[1].img.src) return "Load both images to begin.";
  if (mode === "epipole") return "Click your buddy's camera in image 1.";
  if (mode === "line") {
    return pendingLineA
      ? "Click a second point of the epipolar line in image 1."
      : "Click two points of the known epipolar line in image 1.";
  }
  if (mode === "inspect") {
    return lastFmatrix
      ? "Click anywhere in image 1 to see its epipolar line in image 2."
      : "Solve with 5 pairs first, then inspect epipolar lines.";
  }
  if (pendingP1) return "Now click the matching point in image 2.";
  if (n < 4) {
    const missing = s.epipole1 || s.epiline1 ? "" : " and mark the epipole";
    return `Click matching points (image 1 then image 2); ${4 - n} more pair(s)${missing} to start solving.`;
  }
  if (n === 4) return "4 pairs: search along the curve. Add a 5th pair to pin the point.";
  if (n === 5) return "5 pairs: epipole located. A 6th pair switches to line-input mode.";
  return "6 pairs: mark an epipolar line in image 1 (line mode) to solve for both epipoles.";
}

function redraw(): void {
  const s = store.current;
  for (const pane of panes) {
    while (pane.content.firstChild) pane.content.removeChild(pane.content.firstChild);
    applyView(pane);
  }
  const size1 = s.imageSize1 ?? [panes[0].img.naturalWidth, panes[0].img.naturalHeight];
  renderMarks(
    panes[0].content, s.pairs, 1,
    { epipole1: s.epipole1, epiline1: s.epiline1 },
    size1 as [number, number],
  );
  renderMarks(panes[1].content, s.pairs, 2, { epipole1: null, epiline1: null }, null);
  if (pendingP1) {
    const ghost = document.createElementNS("http://www.w3.org/2000/svg", "circle");
    ghost.setAttribute("cx", String(pendingP1[0]));
    ghost.setAttribute("cy", String(pendingP1[1]));
    ghost.setAttribute("r", "5");
    ghost.setAttribute("class", "pair-marker pending");
    panes[0].content.appendChild(ghost);
  }
  renderSolveOverlay(panes[0].content, panes[1].content, lastResponse, {
    stale: store.stale,
  });
  if (lastFmatrix) {
    const sz1 = (s.imageSize1 ?? [640, 480]) as [number, number];
    const sz2 = (s.imageSize2 ?? [640, 480]) as [number, number];
    renderEpipolarLines(panes[0].content, lastFmatrix.lines1, sz1);
    renderEpipolarLines(panes[1].content, lastFmatrix.lines2, sz2);
    if (lastFmatrix.probe_lines2) {
      renderEpipolarLines(panes[1].content, lastFmatrix.probe_lines2, sz2, "epipolar-line probe");
    }
  }
  renderBadge(badge, lastResponse, store.stale);
  hint.textContent = hintText();
  byId<HTMLButtonElement>("undo").disabled = !store.canUndo();
}

function handleOutcome(outcome: SolveOutcome): void {
  if (outcome.kind === "superseded") return;
  if (outcome.kind === "ok") {
    lastResponse = outcome.body;
    store.markFresh();
    renderBanner(banner, null);
  } else if (outcome.kind === "degenerate") {
    lastResponse = null;
    lastFmatrix = null;
    renderBanner(
      banner,
      `Degenerate configuration: ${outcome.error.error.message} - try a different point.`,
    );
  } else if (outcome.kind === "invalid") {
    lastResponse = null;
    renderBanner(banner, `Rejected request: ${outcome.error.error.message}`);
  } else {
    renderBanner(banner, `Network problem: ${outcome.message}`);
  }
  redraw();
}

function maybeSolve(): void {
  const json = solveRequestJson(store.current);
  if (json === null) {
    lastResponse = null;
    lastFmatrix = null;
    client.cancelPending();
    renderBanner(banner, null);
    redraw();
    return;
  }
  client.scheduleSolve(json, handleOutcome);
  redraw();
}

function mutate(step: (s: Session) => Session): void {
  store.apply((s) => {
    const next = step(s);
    sessionSizes(next);
    return next;
  });
  lastFmatrix = null;
  maybeSolve();
}

function markerHit(pane: Pane, sx: number, sy: number): number | null {
  const [ix, iy] = toImage(pane.view, [sx, sy]);
  const tol = 8 / pane.view.scale;
  for (const pair of store.current.pairs) {
    const p = pane.which === 1 ? pair.p1 : pair.p2;
    if (Math.hypot(p[0] - ix, p[1] - iy) <= tol) return pair.id;
  }
  return null;
}

async function inspectClick(at: [number, number]): Promise<void> {
  const s = store.current;
  if (!s.epipole1 || !lastResponse || lastResponse.method !== "five_cremona") return;
  const out = await client.fmatrix({
    points1: s.pairs.map((p) => p.p1),
    points2: s.pairs.map((p) => p.p2),
    epipole1: s.epipole1,
    epipole2: lastResponse.epipole,
    probe_points1: [at],
  });
  if ("error" in out) {
    renderBanner(banner, `Epipolar-line request failed: ${out.error.message}`);
    return;
  }
  lastFmatrix = out;
  redraw();
}

function paneClick(pane: Pane, sx: number, sy: number): void {
  const at = toImage(pane.view, [sx, sy]);
  if (mode === "epipole") {
    if (pane.which !== 1) return;
    mutate((s) => setEpipole(s, at));
    mode = "pair";
    syncModeButtons();
    return;
  }
  if (mode === "line") {
    if (pane.which !== 1) return;
    if (!pendingLineA) {
      pendingLineA = at;
      redraw();
      return;
    }
    const a = pendingLineA;
    pendingLineA = null;
    mutate((s) => setEpilineThrough(s, a, at));
    mode = "pair";
    syncModeButtons();
    return;
  }
  if (mode === "inspect") {
    if (pane.which === 1) void inspectClick(at);
    return;
  }
  // pair mode: image 1 click starts a pair, image 2 click completes it
  if (pane.which === 1 && !pendingP1) {
    pendingP1 = at;
    redraw();
    return;
  }
  if (pane.which === 2 && pendingP1) {
    const p1 = pendingP1;
    pendingP1 = null;
    mutate((s) => addPair(s, p1, at));
  }
}

function attachPane(pane: Pane): void {
  pane.stage.addEventListener("pointerdown", (ev) => {
    const rect = pane.stage.getBoundingClientRect();
    const sx = ev.clientX - rect.left;
    const sy = ev.clientY - rect.top;
    if (ev.button === 2) return;
    if (ev.shiftKey) {
      // shift-drag pans
      const start = { x: sx, y: sy, view: pane.view };
      const move = (m: PointerEvent) => {
        const mx = m.clientX - rect.left;
        const my = m.clientY - rect.top;
        pane.view = pan(start.view, mx - start.x, my - start.y);
        applyView(pane);
      };
      const up = () => {
        window.removeEventListener("pointermove", move);
        window.removeEventListener("pointerup", up);
      };
      window.addEventListener("pointermove", move);
      window.addEventListener("pointerup", up);
      return;
    }
    const hit = mode === "pair" ? markerHit(pane, sx, sy) : null;
    if (hit !== null) {
      // one undo entry per drag; the moves themselves replace in place
      store.apply((s) => s);
      drag = { pane, pairId: hit, moved: false };
      return;
    }
    paneClick(pane, sx, sy);
  });

  pane.stage.addEventListener("pointermove", (ev) => {
    if (!drag || drag.pane !== pane) return;
    const rect = pane.stage.getBoundingClientRect();
    const at = toImage(pane.view, [ev.clientX - rect.left, ev.clientY - rect.top]);
    drag.moved = true;
    store.replace((s) => movePoint(s, drag!.pairId, pane.which, at));
    lastFmatrix = null;
    maybeSolve();
  });

  window.addEventListener("pointerup", () => {
    drag = null;
  });

  pane.stage.addEventListener("contextmenu", (ev) => {
    ev.preventDefault();
    const rect = pane.stage.getBoundingClientRect();
    const hit = markerHit(pane, ev.clientX - rect.left, ev.clientY - rect.top);
    if (hit !== null) mutate((s) => deletePair(s, hit));
  });

  pane.stage.addEventListener(
    "wheel",
    (ev) => {
      ev.preventDefault();
      const rect = pane.stage.getBoundingClientRect();
      const factor = ev.deltaY < 0 ? 1.15 : 1 / 1.15;
      pane.view = zoomAt(
        pane.view,
        factor,
        ev.clientX - rect.left,
        ev.clientY - rect.top,
      );
      applyView(pane);
    },
    { passive: false },
  );
}

function loadImage(pane: Pane, file: File): void {
  const url = URL.createObjectURL(file);
  pane.img.onload = () => {
    pane.svg.setAttribute(
      "viewBox",
      `0 0 ${pane.stage.clientWidth} ${pane.stage.clientHeight}`,
    );
    pane.view = { ...IDENTITY };
    store.apply((s) => {
      const next = { ...s };
      sessionSizes(next);
      return next;
    });
    redraw();
  };
  pane.img.src = url;
}

function syncModeButtons(): void {
  for (const m of ["pair", "epipole", "line", "inspect"] as Mode[]) {
    byId<HTMLButtonElement>(`mode-${m}`).classList.toggle("active", mode === m);
  }
  hint.textContent = hintText();
}

function wireUi(): void {
  byId<HTMLInputElement>("file1").addEventListener("change", (ev) => {
    const f = (ev.target as HTMLInputElement).files?.[0];
    if (f) loadImage(panes[0], f);
  });
  byId<HTMLInputElement>("file2").addEventListener("change", (ev) => {
    const f = (ev.target as HTMLInputElement).files?.[0];
    if (f) loadImage(panes[1], f);
  });
  for (const m of ["pair", "epipole", "line", "inspect"] as Mode[]) {
    byId<HTMLButtonElement>(`mode-${m}`).addEventListener("click", () => {
      mode = m;
      pendingP1 = null;
      pendingLineA = null;
      syncModeButtons();
      redraw();
    });
  }
  byId<HTMLButtonElement>("undo").addEventListener("click", () => {
    if (store.undo()) {
      lastFmatrix = null;
      maybeSolve();
    }
  });
  window.addEventListener("keydown", (ev) => {
    if ((ev.ctrlKey || ev.metaKey) && ev.key === "z") {
      ev.preventDefault();
      if (store.undo()) {
        lastFmatrix = null;
        maybeSolve();
      }
    }
  });
  byId<HTMLButtonElement>("export").addEventListener("click", () => {
    const blob = new Blob([exportSession(store.current)], {
      type: "application/json",
    });
    const a = document.createElement("a");
    a.href = URL.createObjectURL(blob);
    a.download = "session.json";
    a.click();
  });
  byId<HTMLInputElement>("import").addEventListener("change", async (ev) => {
    const f = (ev.target as HTMLInputElement).files?.[0];
    if (!f) return;
    const text = await f.text();
    try {
      const imported = importSession(text);
      store.apply(() => imported);
      lastResponse = null;
      lastFmatrix = null;
      maybeSolve();
    } catch (err) {
      renderBanner(banner, `Could not import session: ${String(err)}`);
    }
  });
  for (const pane of panes) attachPane(pane);
  syncModeButtons();
  redraw();
}

wireUi();
