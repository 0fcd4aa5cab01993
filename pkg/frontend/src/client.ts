import type {
  DocumentResponse,
  GazeSamplePayload,
  LayoutDocument,
  ScoreResponse,
  SimplifyResponse,
  TrainReport,
} from "./types.js";

export class ApiError extends Error {
  constructor(public readonly status: number, detail: string) {
    super(`HTTP ${status}: ${detail}`);
  }
}

/** Thin fetch wrapper over the session service; the UI computes nothing itself. */
export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: typeof fetch = fetch,
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const res = await this.fetchFn(`${this.baseUrl}${path}`, {
      method,
      headers: { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const data = await res.json();
    if (!res.ok) {
      throw new ApiError(res.status, typeof data?.detail === "string" ? data.detail : JSON.stringify(data));
    }
    return data as T;
  }

  async createSession(userId: string, layout: LayoutDocument): Promise<string> {
    const out = await this.request<{ session_id: string }>("POST", "/sessions", {
      user_id: userId,
      layout,
    });
    return out.session_id;
  }

  async sendGaze(sessionId: string, samples: GazeSamplePayload[]): Promise<number> {
    const out = await this.request<{ accepted: number }>(
      "POST",
      `/sessions/${sessionId}/gaze`,
      { samples },
    );
    return out.accepted;
  }

  score(sessionId: string): Promise<ScoreResponse> {
    return this.request("POST", `/sessions/${sessionId}/score`);
  }

  simplify(sessionId: string): Promise<SimplifyResponse> {
    return this.request("POST", `/sessions/${sessionId}/simplify`);
  }

  async submitMarks(sessionId: string, marks: boolean[]): Promise<number> {
    const out = await this.request<{ accepted: number }>(
      "POST",
      `/sessions/${sessionId}/marks`,
      { marks },
    );
    return out.accepted;
  }

  getDocument(sessionId: string): Promise<DocumentResponse> {
    return this.request("GET", `/sessions/${sessionId}/document`);
  }

  train(userId: string, seed?: number): Promise<TrainReport> {
    return this.request("POST", `/users/${userId}/train`, seed === undefined ? {} : { seed });
  }

  report(userId: string): Promise<TrainReport> {
    return this.request("GET", `/users/${userId}/report`);
  }
}
