/**
 * Solver client: debounced dispatch with at most one request in flight;
 * a newer request aborts and supersedes an older one, so the UI never
 * renders an answer for marks that no longer exist.
 */

import type { ApiError, FmatrixRequest, FmatrixResponse, SolveResponse } from "./types";

export type SolveOutcome =
  | { kind: "ok"; body: SolveResponse }
  | { kind: "degenerate"; error: ApiError }
  | { kind: "invalid"; error: ApiError }
  | { kind: "superseded" }
  | { kind: "network"; message: string };

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class SolverClient {
  private timer: ReturnType<typeof setTimeout> | null = null;
  private inflight: AbortController | null = null;
  private generation = 0;

  constructor(
    private readonly base = "",
    readonly debounceMs = 150,
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  /** Debounced solve; only the trailing call within the window fires. */
  scheduleSolve(requestJson: string, cb: (outcome: SolveOutcome) => void): void {
    if (this.timer !== null) clearTimeout(this.timer);
    this.timer = setTimeout(() => {
      this.timer = null;
      void this.solveNow(requestJson).then(cb);
    }, this.debounceMs);
  }

  cancelPending(): void {
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
    this.inflight?.abort();
  }

  async solveNow(requestJson: string): Promise<SolveOutcome> {
    this.inflight?.abort();
    const controller = new AbortController();
    this.inflight = controller;
    const generation = ++this.generation;
    let resp: Response;
    try {
      resp = await this.fetchImpl(`${this.base}/api/solve`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: requestJson,
        signal: controller.signal,
      });
    } catch (err) {
      if (controller.signal.aborted || generation !== this.generation) {
        return { kind: "superseded" };
      }
      return { kind: "network", message: String(err) };
    }
    if (generation !== this.generation) return { kind: "superseded" };
    if (resp.ok) {
      return { kind: "ok", body: (await resp.json()) as SolveResponse };
    }
    const error = (await resp.json()) as ApiError;
    return resp.status === 422
      ? { kind: "degenerate", error }
      : { kind: "invalid", error };
  }

  async fmatrix(req: FmatrixRequest): Promise<FmatrixResponse | ApiError> {
    const resp = await this.fetchImpl(`${this.base}/api/fmatrix`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(req),
    });
    return (await resp.json()) as FmatrixResponse | ApiError;
  }
}
