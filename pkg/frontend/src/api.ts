/** Thin client over the query service endpoints; fetch is injectable. */

import type {
  FetchLike,
  HistoryEntry,
  ResultResponse,
  StatusResponse,
  SubmitResponse,
} from "./types";

export class ApiError extends Error {
  constructor(
    message: string,
    readonly status: number,
  ) {
    super(message);
  }
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly token: string,
    private readonly fetchFn: FetchLike = fetch as unknown as FetchLike,
  ) {}

  private headers(): Record<string, string> {
    return {
      Authorization: `Bearer ${this.token}`,
      "Content-Type": "application/json",
    };
  }

  private async request<T>(path: string, init?: { method?: string; body?: string }): Promise<T> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`, {
      ...init,
      headers: this.headers(),
    });
    if (!response.ok) {
      throw new ApiError(`${path} failed`, response.status);
    }
    return (await response.json()) as T;
  }

  submitQuery(question: string, language: string | null): Promise<SubmitResponse> {
    return this.request<SubmitResponse>("/query", {
      method: "POST",
      body: JSON.stringify({ question, language }),
    });
  }

  getStatus(jobId: string): Promise<StatusResponse> {
    return this.request<StatusResponse>(`/status/${jobId}`);
  }

  getResult(jobId: string): Promise<ResultResponse> {
    return this.request<ResultResponse>(`/result/${jobId}`);
  }

  getHistory(limit = 20): Promise<HistoryEntry[]> {
    return this.request<HistoryEntry[]>(`/history?limit=${limit}`);
  }
}
