/** Browser bootstrap: wires the session client, canvas, and replay controls. */

import { ProtocolError, SessionClient, type FetchLike, type SocketLike } from "./protocol.js";
import { cellFromClick, drawKitchen } from "./render.js";
import { FrameLog, parseFrameLog } from "./replay.js";
import type { Frame, Snapshot, StateResponse } from "./types.js";
import { buildPalette, buildViewModel, moveToCell } from "./view.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function browserSocket(url: string): SocketLike {
  const ws = new WebSocket(url);
  const like: SocketLike = { onmessage: null, onclose: null, close: () => ws.close() };
  ws.onmessage = (ev) => like.onmessage?.({ data: String(ev.data) });
  ws.onclose = () => like.onclose?.();
  return like;
}

/** Built per call so the token box is read at request time. */
function browserClient(): SessionClient {
  const fetchLike: FetchLike = (url, init) => window.fetch(url, init);
  return new SessionClient({
    baseUrl: window.location.origin,
    fetchFn: fetchLike,
    socketFactory: browserSocket,
    token: el<HTMLInputElement>("token").value || undefined,
  });
}

class App {
  private get client(): SessionClient {
    return browserClient();
  }

  private canvas = el<HTMLCanvasElement>("board");
  private palette = el<HTMLDivElement>("palette");
  private status = el<HTMLDivElement>("status");
  private log = el<HTMLUListElement>("eventlog");
  private scrub = el<HTMLInputElement>("scrub");
  private sessionId: string | null = null;
  private agent: string | null = null;
  private snapshot: Snapshot | null = null;
  private replayLog: FrameLog | null = null;

  constructor() {
    el<HTMLButtonElement>("create").addEventListener("click", () => {
      void this.createSession();
    });
    el<HTMLButtonElement>("finalize").addEventListener("click", () => {
      void this.finalize();
    });
    el<HTMLInputElement>("replayfile").addEventListener("change", (ev) => {
      void this.loadReplay(ev);
    });
    this.scrub.addEventListener("input", () => this.scrubTo(Number(this.scrub.value)));
    this.canvas.addEventListener("click", (ev) => {
      void this.clickCell(ev.offsetX, ev.offsetY);
    });
  }

  private note(text: string): void {
    const row = document.createElement("li");
    row.textContent = text;
    this.log.prepend(row);
    while (this.log.childElementCount > 40) this.log.lastElementChild?.remove();
  }

  private draw(snapshot: Snapshot): void {
    this.snapshot = snapshot;
    const vm = buildViewModel(snapshot);
    drawKitchen(this.canvas, vm);
    const orders = vm.orders
      .map((o) => (o.served ? `[x] ${o.dish}` : o.next ? `>>> ${o.dish}` : `[ ] ${o.dish}`))
      .join("  ");
    this.status.textContent =
      `t=${vm.clock}${vm.tMax !== null ? `/${vm.tMax}` : ""}  ${vm.status}` +
      (vm.failureReason ? ` (${vm.failureReason})` : "") +
      `  orders: ${orders}`;
  }

  private async createSession(): Promise<void> {
    const raw = el<HTMLTextAreaElement>("bundle").value;
    let bundle: Record<string, unknown>;
    try {
      bundle = JSON.parse(raw);
    } catch {
      this.note("bundle box does not contain valid JSON");
      return;
    }
    try {
      const info = await this.client.createSession(bundle);
      this.sessionId = info.session_id;
      this.replayLog = null;
      this.note(`session ${info.session_id} (${info.status})`);
      this.watch(info.session_id);
      await this.refresh();
    } catch (err) {
      this.note(`create failed: ${String(err instanceof Error ? err.message : err)}`);
    }
  }

  private watch(sessionId: string): void {
    const stream = this.client.events(sessionId);
    stream.onFrame((frame: Frame) => {
      if (frame.type === "state") this.draw(frame.state);
      else if (frame.type === "event") {
        this.note(`t=${frame.event.clock} ${frame.event.agent} ${frame.event.outcome}`);
        if (frame.event.outcome === "rejected") void this.refresh();
      } else if (frame.type === "record") {
        this.note(frame.record.success ? "episode complete" : `failed: ${frame.record.failure_reason}`);
        void this.refresh();
      }
    });
  }

  private async refresh(): Promise<void> {
    if (!this.sessionId) return;
    let state: StateResponse;
    try {
      state = await this.client.state(this.sessionId);
    } catch (err) {
      this.note(`state failed: ${String(err instanceof Error ? err.message : err)}`);
      return;
    }
    this.draw(state.state);
    this.agent = state.needs_decision[0] ?? null;
    this.palette.replaceChildren();
    if (!this.agent || !state.legal[this.agent]) return;
    const heading = document.createElement("div");
    heading.textContent = `${this.agent} to act (or click a tile to move)`;
    this.palette.appendChild(heading);
    for (const entry of buildPalette(state.legal[this.agent])) {
      const button = document.createElement("button");
      button.textContent = entry.label;
      button.addEventListener("click", () => {
        void this.submit(entry.action);
      });
      this.palette.appendChild(button);
    }
  }

  private async submit(action: Parameters<SessionClient["submit"]>[2]): Promise<void> {
    if (!this.sessionId || !this.agent) return;
    try {
      await this.client.submit(this.sessionId, this.agent, action);
    } catch (err) {
      if (err instanceof ProtocolError) this.note(`rejected: ${err.message}`);
      else throw err;
    }
    await this.refresh();
  }

  private async clickCell(offsetX: number, offsetY: number): Promise<void> {
    if (!this.snapshot || !this.sessionId || !this.agent || this.replayLog) return;
    const cell = cellFromClick(offsetX, offsetY, buildViewModel(this.snapshot));
    if (cell) await this.submit(moveToCell(cell.x, cell.y));
  }

  private async finalize(): Promise<void> {
    if (!this.sessionId) return;
    try {
      const out = await this.client.finalize(this.sessionId);
      this.note(
        out.record.success
          ? `recorded success, oct=${out.record.oct}`
          : `recorded failure (${out.record.failure_reason})`,
      );
    } catch (err) {
      this.note(`finalize failed: ${String(err instanceof Error ? err.message : err)}`);
    }
  }

  private async loadReplay(ev: Event): Promise<void> {
    const input = ev.target as HTMLInputElement;
    const file = input.files?.[0];
    if (!file) return;
    try {
      this.replayLog = parseFrameLog(await file.text());
    } catch (err) {
      this.note(`replay load failed: ${String(err instanceof Error ? err.message : err)}`);
      return;
    }
    this.sessionId = null;
    this.palette.replaceChildren();
    this.scrub.max = String(this.replayLog.length - 1);
    this.scrub.value = this.scrub.max;
    this.note(`replay loaded: ${this.replayLog.length} frames`);
    this.scrubTo(this.replayLog.length - 1);
  }

  private scrubTo(cursor: number): void {
    if (!this.replayLog) return;
    const snapshot = this.replayLog.stateAt(cursor);
    if (snapshot) this.draw(snapshot);
  }
}

new App();
