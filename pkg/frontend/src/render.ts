/** Pure HTML renderers for the chat view.
 *
 * Everything displayed here comes from server responses: the refusal text,
 * the verdict, the generated SQL, and the redacted cells are rendered
 * verbatim, never synthesized client-side.
 */

import type { ConversationTurn } from "./state";
import type { HistoryEntry, ResultResponse } from "./types";

export function escapeHtml(value: string): string {
  return value
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;")
    .replaceAll("'", "&#39;");
}

export function renderStatusTimeline(timeline: string[]): string {
  if (timeline.length === 0) {
    return '<ol class="timeline"></ol>';
  }
  const items = timeline
    .map((status) => `<li class="status status-${escapeHtml(status)}">${escapeHtml(status)}</li>`)
    .join("");
  return `<ol class="timeline">${items}</ol>`;
}

export function renderResultTable(result: ResultResponse): string {
  const head = result.headers
    .map((h) => `<th>${escapeHtml(h.label)}</th>`)
    .join("");
  const body = result.rows
    .map(
      (row) =>
        `<tr>${row.map((cell) => `<td>${escapeHtml(cell)}</td>`).join("")}</tr>`,
    )
    .join("");
  const notice = result.truncated
    ? '<p class="truncation-notice">Results truncated by the server row cap.</p>'
    : "";
  return (
    `<table class="result-table"><thead><tr>${head}</tr></thead>` +
    `<tbody>${body}</tbody></table>` +
    `<p class="row-count">${result.row_count} rows</p>` +
    notice
  );
}

export function renderRefusal(refusal: string): string {
  return `<div class="refusal-bubble">${escapeHtml(refusal)}</div>`;
}

export function renderSqlPanel(sql: string | null): string {
  if (!sql) {
    return "";
  }
  return (
    '<details class="sql-panel" open>' +
    "<summary>Generated SQL</summary>" +
    `<pre class="sql-text">${escapeHtml(sql)}</pre>` +
    '<button class="copy-sql" data-action="copy-sql">Copy</button>' +
    "</details>"
  );
}

export function renderErrorBanner(message: string | null): string {
  if (!message) {
    return "";
  }
  return `<div class="error-banner">${escapeHtml(message)}</div>`;
}

export function renderTurn(turn: ConversationTurn): string {
  const parts = [
    `<div class="question">${escapeHtml(turn.question)}</div>`,
    renderStatusTimeline(turn.timeline),
  ];
  if (turn.result) {
    parts.push(renderSqlPanel(turn.result.generated_sql));
    if (turn.result.refusal) {
      parts.push(renderRefusal(turn.result.refusal));
    } else if (turn.result.status === "ready") {
      parts.push(renderResultTable(turn.result));
    } else if (turn.result.error_message) {
      parts.push(renderErrorBanner(turn.result.error_message));
    }
  }
  parts.push(renderErrorBanner(turn.errorBanner));
  const restored = turn.restoredFromHistory ? " restored" : "";
  return `<article class="turn${restored}">${parts.join("")}</article>`;
}

export function renderHistoryPanel(entries: HistoryEntry[]): string {
  if (entries.length === 0) {
    return '<div class="history empty">No previous questions yet.</div>';
  }
  const items = entries
    .map(
      (entry) =>
        `<li class="history-entry" data-job-id="${escapeHtml(entry.job_id)}">` +
        `<span class="history-question">${escapeHtml(entry.question)}</span>` +
        `<span class="history-status">${escapeHtml(entry.status)}</span>` +
        "</li>",
    )
    .join("");
  return `<ul class="history">${items}</ul>`;
}

/** A history click restores the stored question, SQL, and result preview. */
export function historyEntryToTurn(entry: HistoryEntry): ConversationTurn {
  const preview = entry.result_preview;
  const result: ResultResponse = {
    job_id: entry.job_id,
    status: entry.status,
    generated_sql: entry.generated_sql,
    verdict_code: entry.verdict_code,
    refusal: entry.refusal,
    error_category: entry.error_category,
    error_message: null,
    headers: preview ? preview.headers.map(([label, type]) => ({ label, type })) : [],
    rows: preview ? preview.rows : [],
    row_count: preview ? preview.rows.length : 0,
    truncated: preview ? preview.truncated : false,
  };
  return {
    jobId: entry.job_id,
    question: entry.question,
    language: "en",
    timeline: [entry.status],
    result,
    errorBanner: null,
    restoredFromHistory: true,
  };
}
