import type {
  Override,
  ProblemDocument,
  Report,
  SensitivityResponse,
  ServiceError,
  WhatIfResponse,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

/** Thin client over the service; a custom fetch can be injected for tests. */
export class ApiClient {
  constructor(
    private readonly base: string,
    private readonly fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const res = await this.fetchImpl(`${this.base}${path}`, init);
    const body = await res.json();
    if (!res.ok) {
      const err = body as ServiceError;
      throw new ApiError(
        res.status,
        err.error?.code ?? "unknown",
        err.error?.message ?? `request failed with ${res.status}`,
      );
    }
    return body as T;
  }

  private post<T>(path: string, payload: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(payload),
    });
  }

  listProblems(): Promise<{ problems: { id: string; name: string; hash: string }[] }> {
    return this.request("/v1/problems");
  }

  getProblem(id: string): Promise<{ problem_hash: string; document: ProblemDocument }> {
    return this.request(`/v1/problems/${id}`);
  }

  assess(id: string, method = "both", trace = false): Promise<Report> {
    return this.post(`/v1/problems/${id}/assess`, { method, trace });
  }

  whatIf(
    id: string,
    overrides: Override[],
    baseHash: string,
    method = "both",
  ): Promise<WhatIfResponse> {
    return this.post(`/v1/problems/${id}/whatif`, {
      overrides,
      method,
      base_hash: baseHash,
    });
  }

  sensitivity(
    id: string,
    target: string,
    values: unknown[],
    candidate: string,
    method: string,
  ): Promise<SensitivityResponse> {
    return this.post(`/v1/problems/${id}/sensitivity`, {
      target,
      values,
      candidate,
      method,
    });
  }
}
