/** Thin typed client for the session service.
 *
 * One request per call, ever: edits especially are NOT retried here — an
 * edit that times out may still have landed, and replaying it would apply
 * the instruction twice.  Callers recover by consulting history, not by
 * resending.
 */

import type { HistoryEntryDoc, LayoutAndReport, LayoutDoc, TaskDoc } from "./types.js";

/** Non-2xx reply, decoded from the service's uniform error envelope. */
export class ServiceError extends Error {
  readonly status: number;
  readonly code: string;

  constructor(status: number, code: string, message: string) {
    super(message);
    this.name = "ServiceError";
    this.status = status;
    this.code = code;
  }
}

async function throwFromResponse(resp: Response): Promise<never> {
  let code = "unknown";
  let message = `HTTP ${resp.status}`;
  try {
    const body = await resp.json();
    if (body && typeof body.code === "string") code = body.code;
    if (body && typeof body.message === "string") message = body.message;
  } catch {
    // non-JSON error body; keep the fallback message
  }
  throw new ServiceError(resp.status, code, message);
}

export class StudioApi {
  readonly baseUrl: string;

  constructor(baseUrl: string) {
    // normalize so path concatenation below is mechanical
    this.baseUrl = baseUrl.replace(/\/+$/, "");
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.headers = { "Content-Type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const resp = await fetch(this.baseUrl + path, init);
    if (!resp.ok) await throwFromResponse(resp);
    return (await resp.json()) as T;
  }

  async createSession(task: TaskDoc): Promise<string> {
    const out = await this.request<{ session_id: string }>("POST", "/sessions", { task });
    return out.session_id;
  }

  generate(sessionId: string): Promise<LayoutAndReport> {
    return this.request("POST", `/sessions/${sessionId}/generate`);
  }

  edit(sessionId: string, instruction: string): Promise<LayoutAndReport> {
    return this.request("POST", `/sessions/${sessionId}/edit`, { instruction });
  }

  layout(sessionId: string): Promise<LayoutDoc> {
    return this.request("GET", `/sessions/${sessionId}/layout`);
  }

  async history(sessionId: string): Promise<HistoryEntryDoc[]> {
    const out = await this.request<{ history: HistoryEntryDoc[] }>(
      "GET",
      `/sessions/${sessionId}/history`,
    );
    return out.history;
  }

  /** URL of the service-side SVG rendering (used for export links). */
  renderUrl(sessionId: string): string {
    return `${this.baseUrl}/sessions/${sessionId}/render.svg`;
  }
}
