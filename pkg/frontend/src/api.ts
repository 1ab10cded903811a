// Typed client over the service's documented endpoints — nothing else is
// ever called, and every mutation carries the stakeholder token.

export interface RevisionMeta {
  number: number;
  author: string;
  message: string;
  timestamp: string;
  content_hash: string;
}

export interface RevisionWithText extends RevisionMeta {
  gsn: string;
}

export interface GrowthPoint {
  revision: number;
  goals: number;
  strategies: number;
  evidences: number;
  contexts: number;
  rebuttals: number;
  total: number;
}

export interface GoalStatus {
  goal: string;
  at: number;
  status: "undeveloped" | "claimed" | "rebutted" | "agreed-residual" | "approved";
  responsibility: string[];
}

export interface ErrorBody {
  error: string;
  message: string;
  open_rebuttals?: string[];
  violations?: { element_id: string; code: string; message: string }[];
  line?: number;
}

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly body: ErrorBody,
  ) {
    super(`${status}: ${body.message ?? body.error}`);
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    public token: string | null = null,
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const headers: Record<string, string> = {};
    if (body !== undefined) headers["Content-Type"] = "application/json";
    if (this.token) headers["X-Stakeholder-Token"] = this.token;
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, {
      method,
      headers,
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const contentType = response.headers.get("content-type") ?? "";
    const payload = contentType.includes("application/json")
      ? await response.json()
      : await response.text();
    if (!response.ok) {
      const errorBody: ErrorBody =
        typeof payload === "object" && payload !== null
          ? (payload as ErrorBody)
          : { error: "http-error", message: String(payload) };
      throw new ApiError(response.status, errorBody);
    }
    return payload as T;
  }

  listRevisions(): Promise<RevisionMeta[]> {
    return this.request("GET", "/api/doc/revisions");
  }

  getRevision(n: number): Promise<RevisionWithText> {
    return this.request("GET", `/api/doc/revisions/${n}`);
  }

  commitRevision(base: number, message: string, gsn: string): Promise<{ number: number }> {
    return this.request("POST", "/api/doc/revisions", { base, message, gsn });
  }

  submitRebuttal(target: string, text: string): Promise<{ id: string; revision: number }> {
    return this.request("POST", "/api/doc/rebuttals", { target, text });
  }

  resolveRebuttal(
    id: string,
    decision: "fixed" | "withdrawn" | "residual-risk",
    note: string,
  ): Promise<{ id: string; status: string; revision: number }> {
    return this.request("POST", `/api/doc/rebuttals/${encodeURIComponent(id)}/resolution`, {
      decision,
      note,
    });
  }

  goalStatus(id: string, at?: number): Promise<GoalStatus> {
    const suffix = at === undefined ? "" : `?at=${at}`;
    return this.request("GET", `/api/doc/goals/${encodeURIComponent(id)}/status${suffix}`);
  }

  openReview(name: string, phase: string, participants: string[]): Promise<unknown> {
    return this.request("POST", "/api/doc/reviews", { name, phase, participants });
  }

  closeReview(name: string): Promise<{ name: string; status: string; closed_at: number }> {
    return this.request("POST", `/api/doc/reviews/${encodeURIComponent(name)}/close`, {});
  }

  growth(): Promise<GrowthPoint[]> {
    return this.request("GET", "/api/doc/metrics/growth");
  }

  async renderSvg(n: number, relabelRisk: boolean): Promise<string> {
    const relabel = relabelRisk ? "&relabel=risk" : "";
    return this.request("GET", `/api/doc/render/${n}?format=svg${relabel}`);
  }
}
