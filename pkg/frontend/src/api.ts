/** Thin client over the session endpoints; carries overrides only when set. */

import type { ApiErrorBody, Overrides, TurnResponse } from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
  }
}

async function parseError(resp: Response): Promise<ApiError> {
  try {
    const body = (await resp.json()) as ApiErrorBody;
    return new ApiError(resp.status, body.error.code, body.error.message);
  } catch {
    return new ApiError(resp.status, "unknown", resp.statusText);
  }
}

export class ApiClient {
  constructor(private base: string = "") {}

  private async post<T>(path: string, body: unknown): Promise<T> {
    const resp = await fetch(`${this.base}${path}`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!resp.ok) {
      throw await parseError(resp);
    }
    return (await resp.json()) as T;
  }

  async createSession(): Promise<string> {
    const body = await this.post<{ session_id: string }>("/sessions", {});
    return body.session_id;
  }

  async sendMessage(
    sessionId: string,
    text: string,
    overrides: Overrides | null,
  ): Promise<TurnResponse> {
    const body: { text: string; overrides?: Overrides } = { text };
    if (overrides && Object.keys(overrides).length > 0) {
      body.overrides = overrides;
    }
    return this.post<TurnResponse>(`/sessions/${sessionId}/messages`, body);
  }

  async confirmCandidate(sessionId: string, candidateId: string): Promise<TurnResponse> {
    return this.post<TurnResponse>(`/sessions/${sessionId}/disambiguate`, {
      candidate_id: candidateId,
    });
  }
}
