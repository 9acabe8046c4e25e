/** Wire types for the query service HTTP API. */

export type LifecycleStatus =
  | "loading"
  | "generating_query"
  | "executing_query"
  | "translating"
  | "ready"
  | "error";

export const LIFECYCLE_ORDER: Record<LifecycleStatus, number> = {
  loading: 0,
  generating_query: 1,
  executing_query: 2,
  translating: 3,
  ready: 4,
  error: 5,
};

export type Language = "tr" | "ru" | "en";

export interface SubmitResponse {
  job_id: string;
}

export interface StatusResponse {
  job_id: string;
  status: LifecycleStatus;
  timings: Record<string, number>;
  transitions: [string, string][];
}

export interface ResultHeader {
  label: string;
  type: string;
}

export interface ResultResponse {
  job_id: string;
  status: LifecycleStatus;
  generated_sql: string | null;
  verdict_code: string;
  refusal: string | null;
  error_category: string | null;
  error_message: string | null;
  headers: ResultHeader[];
  rows: string[][];
  row_count: number;
  truncated: boolean;
}

export interface HistoryPreview {
  headers: [string, string][];
  rows: string[][];
  truncated: boolean;
}

export interface HistoryEntry {
  job_id: string;
  question: string;
  status: LifecycleStatus;
  detected_language: string;
  generated_sql: string | null;
  verdict_code: string;
  refusal: string | null;
  error_category: string | null;
  created_at: string;
  result_preview: HistoryPreview | null;
}

/** Minimal fetch shape so tests can inject scripted servers. */
export type FetchLike = (
  url: string,
  init?: { method?: string; headers?: Record<string, string>; body?: string },
) => Promise<{ ok: boolean; status: number; json(): Promise<unknown> }>;
