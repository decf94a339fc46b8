/**
 * Typed client for the /v1 HTTP API. One base URL is the only
 * configuration; everything else is in the path.
 */

import type {
  NextResponse,
  Outcome,
  RankingResponse,
  SessionStats,
  SubmitResponse,
} from "./types.js";

export class ApiError extends Error {
  readonly status: number;
  readonly code: string;
  readonly details: Record<string, unknown>;

  constructor(status: number, code: string, message: string, details?: Record<string, unknown>) {
    super(message);
    this.name = "ApiError";
    this.status = status;
    this.code = code;
    this.details = details ?? {};
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export interface ApiClient {
  next(sessionId: string): Promise<NextResponse>;
  submit(sessionId: string, requestId: number, outcome: Outcome): Promise<SubmitResponse>;
  stats(sessionId: string): Promise<SessionStats>;
  ranking(sessionId: string): Promise<RankingResponse>;
  /** Absolute URL for an item's image (the server may 307 to an external ref). */
  imageUrl(sessionId: string, relativeImageUrl: string): string;
  /** Absolute URL of an item's image, addressed by item id. */
  itemImageUrl(sessionId: string, itemId: string): string;
  /** Absolute URL of the session's full JSON export. */
  exportUrl(sessionId: string): string;
}

async function decode<T>(resp: Response): Promise<T> {
  if (resp.ok) {
    return (await resp.json()) as T;
  }
  // the service wraps every handled failure in {code, message, details};
  // anything else (proxy errors, HTML) still needs a sane ApiError
  let code = "http_error";
  let message = `HTTP ${resp.status}`;
  let details: Record<string, unknown> | undefined;
  try {
    const body = (await resp.json()) as { code?: string; message?: string; details?: Record<string, unknown> };
    if (body && typeof body.code === "string") {
      code = body.code;
      message = body.message ?? message;
      details = body.details;
    }
  } catch {
    // non-JSON error body: keep the generic message
  }
  throw new ApiError(resp.status, code, message, details);
}

export class HttpApiClient implements ApiClient {
  private readonly base: string;
  private readonly fetchImpl: FetchLike;

  constructor(baseUrl: string, fetchImpl?: FetchLike) {
    this.base = baseUrl.replace(/\/+$/, "");
    // browsers require fetch to be called on window; bind, don't alias
    this.fetchImpl = fetchImpl ?? ((url, init) => fetch(url, init));
  }

  next(sessionId: string): Promise<NextResponse> {
    return this.get(`/v1/sessions/${encodeURIComponent(sessionId)}/next`);
  }

  async submit(sessionId: string, requestId: number, outcome: Outcome): Promise<SubmitResponse> {
    const resp = await this.fetchImpl(
      `${this.base}/v1/sessions/${encodeURIComponent(sessionId)}/judgments`,
      {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ request_id: requestId, outcome }),
      },
    );
    return decode<SubmitResponse>(resp);
  }

  stats(sessionId: string): Promise<SessionStats> {
    return this.get(`/v1/sessions/${encodeURIComponent(sessionId)}/stats`);
  }

  ranking(sessionId: string): Promise<RankingResponse> {
    return this.get(`/v1/sessions/${encodeURIComponent(sessionId)}/ranking`);
  }

  imageUrl(_sessionId: string, relativeImageUrl: string): string {
    return `${this.base}${relativeImageUrl}`;
  }

  itemImageUrl(sessionId: string, itemId: string): string {
    const sid = encodeURIComponent(sessionId);
    return `${this.base}/v1/sessions/${sid}/items/${encodeURIComponent(itemId)}/image`;
  }

  exportUrl(sessionId: string): string {
    return `${this.base}/v1/sessions/${encodeURIComponent(sessionId)}/export`;
  }

  private async get<T>(path: string): Promise<T> {
    const resp = await this.fetchImpl(`${this.base}${path}`);
    return decode<T>(resp);
  }
}
