import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api";
import { submitAndFollow } from "../src/follow";
import { renderStatusTimeline, renderTurn } from "../src/render";
import { isTimelineNonDecreasing } from "../src/state";
import { instantSleep, MockServer, readyResult } from "./mockserver";

const FIVE_STATES = [
  "loading",
  "generating_query",
  "executing_query",
  "translating",
  "ready",
] as const;

function client(server: MockServer): ApiClient {
  return new ApiClient("", "test-token", server.fetch);
}

describe("submitAndFollow", () => {
  it("renders all five lifecycle states in order on the happy path", async () => {
    const server = new MockServer({
      jobId: "job-1",
      statuses: [
        "loading",
        "loading",
        "generating_query",
        "executing_query",
        "executing_query",
        "translating",
        "ready",
      ],
      result: readyResult(),
    });
    const turn = await submitAndFollow(client(server), "how many actives?", "en", {
      sleep: instantSleep,
    });
    expect(turn.timeline).toEqual([...FIVE_STATES]);
    expect(turn.result?.rows).toEqual([["26"]]);
    expect(turn.errorBanner).toBeNull();
    const html = renderStatusTimeline(turn.timeline);
    const positions = FIVE_STATES.map((s) => html.indexOf(`>${s}<`));
    expect(positions.every((p) => p >= 0)).toBe(true);
    expect([...positions].sort((a, b) => a - b)).toEqual(positions);
  });

  it("renders the refusal bubble and no table for a policy-blocked question", async () => {
    const refusalText =
      "The server said no to this one; rendered verbatim from the response.";
    const server = new MockServer({
      jobId: "job-2",
      statuses: ["loading", "error"],
      result: readyResult({
        status: "error",
        refusal: refusalText,
        generated_sql: null,
        verdict_code: "reject_policy",
        error_category: "policy_blocked",
        headers: [],
        rows: [],
        row_count: 0,
      }),
    });
    const turn = await submitAndFollow(client(server), "forbidden?", "en", {
      sleep: instantSleep,
    });
    const html = renderTurn(turn);
    expect(html).toContain("refusal-bubble");
    expect(html).toContain(refusalText);
    expect(html).not.toContain("<table");
  });

  it("shows the truncation notice when the server capped rows", async () => {
    const rows = Array.from({ length: 1000 }, (_, i) => [`E${i}`]);
    const server = new MockServer({
      jobId: "job-3",
      statuses: [...FIVE_STATES],
      result: readyResult({
        headers: [{ label: "record_id", type: "identifier" }],
        rows,
        row_count: 1000,
        truncated: true,
      }),
    });
    const turn = await submitAndFollow(client(server), "list everyone", "en", {
      sleep: instantSleep,
    });
    const html = renderTurn(turn);
    expect(html).toContain("truncation-notice");
    expect(html).toContain("1000 rows");
  });

  it("retries transient failures with backoff and recovers", async () => {
    const server = new MockServer({
      jobId: "job-4",
      statuses: [...FIVE_STATES],
      result: readyResult(),
      networkFailures: 2,
    });
    const waits: number[] = [];
    const turn = await submitAndFollow(client(server), "q", "en", {
      sleep: async (ms) => {
        waits.push(ms);
      },
      pollIntervalMs: 100,
    });
    expect(turn.errorBanner).toBeNull();
    expect(turn.result?.status).toBe("ready");
    // Backoff doubles per consecutive failure.
    expect(waits.slice(0, 2)).toEqual([200, 400]);
  });

  it("surfaces an error banner after three consecutive network failures", async () => {
    const server = new MockServer({
      jobId: "job-5",
      statuses: [...FIVE_STATES],
      result: readyResult(),
      networkFailures: 10,
    });
    const turn = await submitAndFollow(client(server), "q", "en", {
      sleep: instantSleep,
    });
    expect(turn.errorBanner).toMatch(/Lost contact/);
    expect(renderTurn(turn)).toContain("error-banner");
  });

  it("keeps every observed sequence non-decreasing, even with stale polls", async () => {
    const server = new MockServer({
      jobId: "job-6",
      // A stale cache replays generating_query after executing_query.
      statuses: [
        "loading",
        "generating_query",
        "executing_query",
        "generating_query",
        "translating",
        "ready",
      ] as never,
      result: readyResult(),
    });
    const turn = await submitAndFollow(client(server), "q", "en", {
      sleep: instantSleep,
    });
    expect(isTimelineNonDecreasing(turn.timeline)).toBe(true);
    expect(turn.timeline).toEqual([...FIVE_STATES]);
  });

  it("polls /status until terminal and fetches /result exactly once", async () => {
    const server = new MockServer({
      jobId: "job-7",
      statuses: [...FIVE_STATES],
      result: readyResult(),
    });
    await submitAndFollow(client(server), "q", "en", { sleep: instantSleep });
    const resultCalls = server.calls.filter((c) => c.includes("/result/"));
    expect(resultCalls).toHaveLength(1);
    expect(server.calls[0]).toBe("POST /query");
  });
});
