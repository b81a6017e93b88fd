/** HTTP/WebSocket client for the session service.
 *
 * Transport is injected (fetch function and socket factory) so tests and
 * non-browser hosts can drive the client without network or DOM globals.
 */

import type {
  ActionJson,
  ActionResponse,
  FinalizeResponse,
  Frame,
  SessionInfo,
  StateResponse,
} from "./types.js";

export type FetchLike = (
  url: string,
  init?: { method?: string; headers?: Record<string, string>; body?: string },
) => Promise<{ ok: boolean; status: number; json(): Promise<unknown> }>;

/** Minimal socket surface: constructed from a URL, emits parsed text frames. */
export interface SocketLike {
  onmessage: ((ev: { data: string }) => void) | null;
  onclose: (() => void) | null;
  close(): void;
}

export type SocketFactory = (url: string) => SocketLike;

export class ProtocolError extends Error {}

export interface ClientOptions {
  baseUrl: string;
  fetchFn: FetchLike;
  socketFactory: SocketFactory;
  token?: string;
}

/** Ordered frame feed for one session: backlog plus live, gap-checked. */
export class FrameStream {
  readonly frames: Frame[] = [];
  private listeners: ((frame: Frame) => void)[] = [];
  private closed = false;
  private nextSeq = 0;

  constructor(private socket: SocketLike) {
    socket.onmessage = (ev) => this.accept(JSON.parse(ev.data) as Frame);
    socket.onclose = () => {
      this.closed = true;
    };
  }

  private accept(frame: Frame): void {
    if (frame.type === "error") {
      throw new ProtocolError(frame.error);
    }
    // The server totally orders frames; a gap means the feed is corrupt
    // and rendering from it would silently show a wrong world.
    if (frame.seq !== this.nextSeq) {
      throw new ProtocolError(
        `frame gap: expected seq ${this.nextSeq}, got ${frame.seq}`,
      );
    }
    this.nextSeq += 1;
    this.frames.push(frame);
    for (const listener of this.listeners) {
      listener(frame);
    }
  }

  onFrame(listener: (frame: Frame) => void): void {
    this.listeners.push(listener);
  }

  get done(): boolean {
    return this.closed || this.frames.some((f) => f.type === "record");
  }

  close(): void {
    this.socket.close();
  }
}

export class SessionClient {
  constructor(private options: ClientOptions) {}

  private headers(): Record<string, string> {
    const out: Record<string, string> = { "content-type": "application/json" };
    if (this.options.token) {
      out["authorization"] = `Bearer ${this.options.token}`;
    }
    return out;
  }

  private async call<T>(method: string, path: string, body?: unknown): Promise<T> {
    const resp = await this.options.fetchFn(`${this.options.baseUrl}${path}`, {
      method,
      headers: this.headers(),
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const payload = (await resp.json()) as T & { detail?: string };
    if (!resp.ok) {
      throw new ProtocolError(payload.detail ?? `HTTP ${resp.status}`);
    }
    return payload;
  }

  createSession(bundle: unknown, start = true): Promise<SessionInfo> {
    return this.call("POST", "/sessions", { bundle, start });
  }

  startSession(sessionId: string): Promise<{ session_id: string; status: string }> {
    return this.call("POST", `/sessions/${sessionId}/start`);
  }

  state(sessionId: string): Promise<StateResponse> {
    return this.call("GET", `/sessions/${sessionId}/state`);
  }

  submit(sessionId: string, agent: string, action: ActionJson): Promise<ActionResponse> {
    return this.call("POST", `/sessions/${sessionId}/actions`, { agent, action });
  }

  finalize(sessionId: string): Promise<FinalizeResponse> {
    return this.call("POST", `/sessions/${sessionId}/finalize`);
  }

  /** Subscribe to the session's ordered frame feed. */
  events(sessionId: string): FrameStream {
    const base = this.options.baseUrl.replace(/^http/, "ws");
    const socket = this.options.socketFactory(
      `${base}/sessions/${sessionId}/events`,
    );
    return new FrameStream(socket);
  }
}
