/** UI contract acceptance: recorded server traces drive the full chat view. */

import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api";
import { submitAndFollow } from "../src/follow";
import { historyEntryToTurn, renderHistoryPanel, renderTurn } from "../src/render";
import type { HistoryEntry } from "../src/types";
import { instantSleep, MockServer, readyResult } from "./mockserver";

const FIVE_STATES = [
  "loading",
  "generating_query",
  "executing_query",
  "translating",
  "ready",
] as const;

describe("UI contract acceptance", () => {
  it("lifecycle, refusal, truncation, and history restore against recorded traces", async () => {
    // 1. All five lifecycle states render in order.
    const lifecycle = new MockServer({
      jobId: "acc-1",
      statuses: [
        "loading",
        "loading",
        "generating_query",
        "executing_query",
        "translating",
        "translating",
        "ready",
      ],
      result: readyResult(),
    });
    const happy = await submitAndFollow(
      new ApiClient("", "t", lifecycle.fetch),
      "how many actives?",
      "en",
      { sleep: instantSleep },
    );
    expect(happy.timeline).toEqual([...FIVE_STATES]);
    const happyHtml = renderTurn(happy);
    let cursor = -1;
    for (const status of FIVE_STATES) {
      const at = happyHtml.indexOf(`>${status}<`, cursor + 1);
      expect(at, `state ${status} missing or out of order`).toBeGreaterThan(cursor);
      cursor = at;
    }

    // 2. Refusal path: bubble, no table.
    const refusalText = "Refusal text exactly as the server sent it.";
    const refusal = new MockServer({
      jobId: "acc-2",
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
    const refused = await submitAndFollow(
      new ApiClient("", "t", refusal.fetch),
      "blocked question",
      "tr",
      { sleep: instantSleep },
    );
    const refusedHtml = renderTurn(refused);
    expect(refusedHtml).toContain("refusal-bubble");
    expect(refusedHtml).toContain(refusalText);
    expect(refusedHtml).not.toContain("<table");

    // 3. Truncation notice for a capped result.
    const truncated = new MockServer({
      jobId: "acc-3",
      statuses: [...FIVE_STATES],
      result: readyResult({
        headers: [{ label: "record_id", type: "identifier" }],
        rows: Array.from({ length: 1000 }, (_, i) => [`E${i}`]),
        row_count: 1000,
        truncated: true,
      }),
    });
    const capped = await submitAndFollow(
      new ApiClient("", "t", truncated.fetch),
      "list everyone",
      "en",
      { sleep: instantSleep },
    );
    expect(renderTurn(capped)).toContain("truncation-notice");

    // 4. History restore: the SQL panel matches the stored SQL byte-exactly.
    const storedSql =
      "SELECT COUNT(*) FROM employees WHERE role_eng = 'Civil Engineer' " +
      "AND c_project_eng = 'GPP' AND actual_working_city = 'Moscow' " +
      "AND is_payroll = 'true' AND employee_status = 'true'";
    const entry: HistoryEntry = {
      job_id: "acc-4",
      question: "How many civil engineers are working on the GPP project in Moscow?",
      status: "ready",
      detected_language: "en",
      generated_sql: storedSql,
      verdict_code: "pass",
      refusal: null,
      error_category: null,
      created_at: "2024-06-01T09:00:00",
      result_preview: {
        headers: [["COUNT(*)", "integer"]],
        rows: [["4"]],
        truncated: false,
      },
    };
    expect(renderHistoryPanel([entry])).toContain('data-job-id="acc-4"');
    const restored = historyEntryToTurn(entry);
    expect(restored.result?.generated_sql).toBe(storedSql);
    const restoredHtml = renderTurn(restored);
    expect(restoredHtml).toContain("sql-panel");
    expect(restoredHtml).toContain("&#39;GPP&#39;");
    expect(restoredHtml).toContain("<td>4</td>");
  });
});
