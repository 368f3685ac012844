// Typed client for the annotation service. Every mutation carries the
// session version the caller last read; the server answers stale versions
// with a version_conflict error that callers must surface as a reload
// prompt, never retry blindly.

import type {
  CorrectionPayload,
  SequenceDocument,
  SessionState,
  SessionSummary,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
    readonly extra: Record<string, unknown> = {},
  ) {
    super(message);
    this.name = "ApiError";
  }

  get isVersionConflict(): boolean {
    return this.code === "version_conflict";
  }
}

interface CreateOpts {
  source_id?: string;
  label?: string;
  width?: number;
  height?: number;
  images_dir?: string;
  detections_dir?: string;
}

interface CorrectOpts {
  goal_index?: number | null;
  blocking_joint?: string | null;
  iterations?: number | null;
  tolerance?: number | null;
}

export class Client {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: typeof fetch = fetch,
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const res = await this.fetchImpl(this.baseUrl + path, {
      method,
      headers: body === undefined ? undefined : { "content-type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!res.ok) {
      let code = "http_error";
      let message = `${method} ${path} failed with ${res.status}`;
      let extra: Record<string, unknown> = {};
      try {
        const payload = (await res.json()) as { detail?: Record<string, unknown> };
        const detail = payload.detail;
        if (detail && typeof detail === "object") {
          const { code: c, message: m, ...rest } = detail as {
            code?: string;
            message?: string;
          } & Record<string, unknown>;
          if (typeof c === "string") code = c;
          if (typeof m === "string") message = m;
          extra = rest;
        }
      } catch {
        // non-JSON error body; keep the generic message
      }
      throw new ApiError(res.status, code, message, extra);
    }
    return (await res.json()) as T;
  }

  listSessions(): Promise<{ sessions: SessionSummary[] }> {
    return this.request("GET", "/api/v1/sessions");
  }

  createSession(opts: CreateOpts): Promise<SessionState> {
    return this.request("POST", "/api/v1/sessions", opts);
  }

  getSession(sid: string): Promise<SessionState> {
    return this.request("GET", `/api/v1/sessions/${sid}`);
  }

  frameImageUrl(sid: string, index: number): string {
    return `${this.baseUrl}/api/v1/sessions/${sid}/frames/${index}/image`;
  }

  accept(sid: string, index: number, version: number): Promise<SessionState> {
    return this.request("POST", `/api/v1/sessions/${sid}/frames/${index}/accept`, { version });
  }

  reject(sid: string, index: number, version: number): Promise<SessionState> {
    return this.request("POST", `/api/v1/sessions/${sid}/frames/${index}/reject`, { version });
  }

  setBall(
    sid: string,
    index: number,
    pixel: [number, number],
    version: number,
  ): Promise<SessionState> {
    return this.request("POST", `/api/v1/sessions/${sid}/frames/${index}/ball`, {
      pixel,
      version,
    });
  }

  placeJoint(
    sid: string,
    index: number,
    joint: string,
    pixel: [number, number],
    version: number,
  ): Promise<SessionState> {
    return this.request("POST", `/api/v1/sessions/${sid}/frames/${index}/joints`, {
      joint,
      pixel,
      version,
    });
  }

  undoJoint(sid: string, index: number, joint: string, version: number): Promise<SessionState> {
    return this.request("POST", `/api/v1/sessions/${sid}/frames/${index}/joints/undo`, {
      joint,
      version,
    });
  }

  setOverrides(
    sid: string,
    overrides: { goal_index?: number | null; blocking_joint?: string | null },
    version: number,
  ): Promise<SessionState> {
    return this.request("PUT", `/api/v1/sessions/${sid}/overrides`, {
      ...overrides,
      version,
    });
  }

  correct(sid: string, opts: CorrectOpts, version: number): Promise<CorrectionPayload> {
    return this.request("POST", `/api/v1/sessions/${sid}/correct`, { ...opts, version });
  }

  corrected(sid: string): Promise<CorrectionPayload> {
    return this.request("GET", `/api/v1/sessions/${sid}/corrected`);
  }

  exportDocument(sid: string): Promise<SequenceDocument> {
    return this.request("GET", `/api/v1/sessions/${sid}/export`);
  }
}
