/** Scripted fetch double replaying recorded server traces. */

import type {
  FetchLike,
  HistoryEntry,
  LifecycleStatus,
  ResultResponse,
} from "../src/types";

export interface RecordedTrace {
  jobId: string;
  /** Status responses in the order polling observes them; the last repeats. */
  statuses: LifecycleStatus[];
  result: ResultResponse;
  history?: HistoryEntry[];
  /** Fail the first N /status requests with a network error. */
  networkFailures?: number;
}

export class MockServer {
  calls: string[] = [];
  private statusCursor = 0;
  private failuresLeft: number;

  constructor(private readonly trace: RecordedTrace) {
    this.failuresLeft = trace.networkFailures ?? 0;
  }

  fetch: FetchLike = async (url, init) => {
    this.calls.push(`${init?.method ?? "GET"} ${url}`);
    const respond = (payload: unknown) => ({
      ok: true,
      status: 200,
      json: async () => payload,
    });

    if (url.endsWith("/query") && init?.method === "POST") {
      return respond({ job_id: this.trace.jobId });
    }
    if (url.includes("/status/")) {
      if (this.failuresLeft > 0) {
        this.failuresLeft -= 1;
        throw new Error("connection reset");
      }
      const index = Math.min(this.statusCursor, this.trace.statuses.length - 1);
      this.statusCursor += 1;
      return respond({
        job_id: this.trace.jobId,
        status: this.trace.statuses[index],
        timings: {},
        transitions: [],
      });
    }
    if (url.includes("/result/")) {
      return respond(this.trace.result);
    }
    if (url.includes("/history")) {
      return respond(this.trace.history ?? []);
    }
    return { ok: false, status: 404, json: async () => ({ detail: "not found" }) };
  };
}

export function readyResult(overrides: Partial<ResultResponse> = {}): ResultResponse {
  return {
    job_id: "job-1",
    status: "ready",
    generated_sql:
      "SELECT COUNT(*) FROM employees WHERE employee_status = 'true'",
    verdict_code: "pass",
    refusal: null,
    error_category: null,
    error_message: null,
    headers: [{ label: "COUNT(*)", type: "integer" }],
    rows: [["26"]],
    row_count: 1,
    truncated: false,
    ...overrides,
  };
}

export const instantSleep = async (_ms: number): Promise<void> => {};
