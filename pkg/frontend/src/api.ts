// Thin HTTP client plus the NDJSON snapshot stream reader. The console
// consumes /api/key, /api/state, /api/config and /api/stream, nothing else.

import type { ApiKey, ConnectionState, KeyAction } from "./types";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
  }
}

export interface KeyResponse {
  ok?: boolean;
  snapshot?: unknown;
}

const defaultFetch: FetchLike = (url, init) => globalThis.fetch(url, init);

export class ApiClient {
  constructor(
    private readonly base: string = "",
    private readonly fetchFn: FetchLike = defaultFetch,
  ) {}

  private async getJson(path: string): Promise<unknown> {
    const res = await this.fetchFn(this.base + path);
    if (!res.ok) throw new ApiError(res.status, `${path} -> ${res.status}`);
    return res.json();
  }

  getState(): Promise<unknown> {
    return this.getJson("/api/state");
  }

  getConfig(): Promise<unknown> {
    return this.getJson("/api/config");
  }

  async postKey(key: ApiKey, action: KeyAction): Promise<KeyResponse> {
    const res = await this.fetchFn(this.base + "/api/key", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ key, action }),
    });
    if (!res.ok) throw new ApiError(res.status, `/api/key -> ${res.status}`);
    return (await res.json()) as KeyResponse;
  }

  /**
   * Open the snapshot stream and hand every NDJSON line to onLine (parsed,
   * or the raw string when it does not parse). Resolves when the stream
   * ends, rejects when the transport fails.
   */
  async readStream(
    intervalMs: number,
    onLine: (frame: unknown, bad: boolean) => void,
    signal?: AbortSignal,
  ): Promise<void> {
    const res = await this.fetchFn(
      `${this.base}/api/stream?interval_ms=${intervalMs}`,
      { signal },
    );
    if (!res.ok || !res.body) {
      throw new ApiError(res.status, `/api/stream -> ${res.status}`);
    }
    const reader = res.body.getReader();
    const decoder = new TextDecoder();
    let buffer = "";
    const dispatch = (line: string) => {
      const text = line.trim();
      if (!text) return;
      try {
        onLine(JSON.parse(text), false);
      } catch {
        onLine(text, true);
      }
    };
    for (;;) {
      const { done, value } = await reader.read();
      if (done) break;
      buffer += decoder.decode(value, { stream: true });
      const lines = buffer.split("\n");
      buffer = lines.pop() ?? "";
      for (const line of lines) dispatch(line);
    }
    dispatch(buffer);
  }
}

export interface StreamHandlers {
  onFrame: (frame: unknown, bad: boolean) => void;
  onState: (state: ConnectionState) => void;
}

/**
 * Keeps the snapshot stream open, reporting connection state transitions
 * and reconnecting after a pause whenever the stream drops.
 */
export class StreamController {
  private stopped = false;
  private abort: AbortController | null = null;

  constructor(
    private readonly api: ApiClient,
    private readonly handlers: StreamHandlers,
    private readonly intervalMs: number = 50,
    private readonly retryMs: number = 1000,
    private readonly sleep: (ms: number) => Promise<void> = (ms) =>
      new Promise((resolve) => setTimeout(resolve, ms)),
  ) {}

  async run(): Promise<void> {
    while (!this.stopped) {
      this.handlers.onState("connecting");
      this.abort = new AbortController();
      try {
        let first = true;
        await this.api.readStream(
          this.intervalMs,
          (frame, bad) => {
            if (first) {
              first = false;
              this.handlers.onState("live");
            }
            this.handlers.onFrame(frame, bad);
          },
          this.abort.signal,
        );
      } catch {
        // fall through to the common down/retry path
      }
      if (this.stopped) return;
      this.handlers.onState("down");
      await this.sleep(this.retryMs);
    }
  }

  stop(): void {
    this.stopped = true;
    this.abort?.abort();
  }
}
