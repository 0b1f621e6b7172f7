// Typed client for the workbench API. Single source of truth: the UI shows
// these payloads verbatim.

import type {
  CandidatesPayload,
  ConstraintsPayload,
  ErrorPayload,
  GraphPayload,
  ImpactDirection,
  ImpactReportPayload,
  SelectionPayload,
  TracePayload,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public payload: ErrorPayload | null,
  ) {
    super(payload?.error.message ?? `API request failed with status ${status}`);
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class WorkbenchClient {
  constructor(
    private baseUrl: string,
    private fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(this.baseUrl + path, init);
    if (!response.ok) {
      let payload: ErrorPayload | null = null;
      try {
        payload = (await response.json()) as ErrorPayload;
      } catch {
        payload = null;
      }
      throw new ApiError(response.status, payload);
    }
    return (await response.json()) as T;
  }

  getGraph(): Promise<GraphPayload> {
    return this.request<GraphPayload>("/graph");
  }

  getCandidates(weights?: string, strategy: string = "exact"): Promise<CandidatesPayload> {
    const params = new URLSearchParams({ strategy });
    if (weights) params.set("w", weights);
    return this.request<CandidatesPayload>(`/candidates?${params.toString()}`);
  }

  postImpact(entity: string, direction: ImpactDirection, asKind?: string): Promise<ImpactReportPayload> {
    const body: Record<string, string> = { entity, direction };
    if (asKind) body.as = asKind;
    return this.request<ImpactReportPayload>("/impact", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  postSelection(constraints: ConstraintsPayload, weights?: string): Promise<SelectionPayload> {
    const body: Record<string, unknown> = { constraints };
    if (weights) body.weights = weights;
    return this.request<SelectionPayload>("/selection", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  getTrace(entityId: string, direction?: "forward" | "backward"): Promise<TracePayload> {
    const suffix = direction ? `?direction=${direction}` : "";
    return this.request<TracePayload>(`/trace/${encodeURIComponent(entityId)}${suffix}`);
  }
}
