import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { SolverClient, type SolveOutcome } from "../src/api";

function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

const OK_BODY = {
  method: "five_cremona",
  epipole: [1, 2, 1],
  residual_rms: 0,
  alternates: [],
};

describe("SolverClient", () => {
  beforeEach(() => {
    vi.useFakeTimers();
  });
  afterEach(() => {
    vi.useRealTimers();
  });

  it("debounces rapid schedules into one request after 150 ms", async () => {
    const calls: string[] = [];
    const client = new SolverClient("", 150, async (_url, init) => {
      calls.push(String(init?.body));
      return jsonResponse(OK_BODY);
    });
    const outcomes: SolveOutcome[] = [];
    client.scheduleSolve('{"v":1}', (o) => outcomes.push(o));
    vi.advanceTimersByTime(80);
    client.scheduleSolve('{"v":2}', (o) => outcomes.push(o));
    vi.advanceTimersByTime(80);
    client.scheduleSolve('{"v":3}', (o) => outcomes.push(o));
    expect(calls).toHaveLength(0);
    await vi.advanceTimersByTimeAsync(150);
    expect(calls).toEqual(['{"v":3}']);
    expect(outcomes).toHaveLength(1);
    expect(outcomes[0].kind).toBe("ok");
  });

  it("a newer request supersedes an older in-flight one", async () => {
    let release: (() => void) | null = null;
    let aborted = false;
    const client = new SolverClient("", 0, (_url, init) => {
      return new Promise((resolve, reject) => {
        init?.signal?.addEventListener("abort", () => {
          aborted = true;
          reject(new DOMException("aborted", "AbortError"));
        });
        release = () => resolve(jsonResponse(OK_BODY));
      });
    });
    const first = client.solveNow('{"v":1}');
    const second = client.solveNow('{"v":2}');
    expect(aborted).toBe(true);
    release!();
    const secondOutcome = await second;
    expect(secondOutcome.kind).toBe("ok");
    const firstOutcome = await first;
    expect(firstOutcome.kind).toBe("superseded");
  });

  it("maps 422 to degenerate and 400 to invalid", async () => {
    const degenerate = new SolverClient("", 0, async () =>
      jsonResponse({ error: { code: "coincident_solution", message: "x" } }, 422),
    );
    expect((await degenerate.solveNow("{}")).kind).toBe("degenerate");
    const invalid = new SolverClient("", 0, async () =>
      jsonResponse({ error: { code: "invalid_input", message: "x" } }, 400),
    );
    expect((await invalid.solveNow("{}")).kind).toBe("invalid");
  });

  it("reports network failures distinctly", async () => {
    const client = new SolverClient("", 0, async () => {
      throw new TypeError("connection refused");
    });
    const outcome = await client.solveNow("{}");
    expect(outcome.kind).toBe("network");
  });
});
