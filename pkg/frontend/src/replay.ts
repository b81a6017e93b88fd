/** Scrubbing over recorded frame logs.
 *
 * Replay is a pure projection of the frames the service emitted while the
 * episode ran. The client never re-simulates; seeking just picks the latest
 * state frame at or before the cursor.
 */

import type { Frame, RunRecord, Snapshot } from "./types.js";

export class FrameLog {
  readonly frames: Frame[];

  constructor(frames: Frame[]) {
    this.frames = frames.filter((f) => f.type !== "error");
  }

  get length(): number {
    return this.frames.length;
  }

  /** Latest snapshot at or before the cursor, or null before the first one. */
  stateAt(cursor: number): Snapshot | null {
    const end = Math.min(cursor, this.frames.length - 1);
    for (let i = end; i >= 0; i -= 1) {
      const frame = this.frames[i];
      if (frame.type === "state") return frame.state;
    }
    return null;
  }

  /** Events that land between the previous cursor (exclusive) and this one. */
  eventsBetween(prev: number, cursor: number): Frame[] {
    const out: Frame[] = [];
    const lo = Math.max(prev + 1, 0);
    const hi = Math.min(cursor, this.frames.length - 1);
    for (let i = lo; i <= hi; i += 1) {
      const frame = this.frames[i];
      if (frame.type === "event") out.push(frame);
    }
    return out;
  }

  get record(): RunRecord | null {
    for (let i = this.frames.length - 1; i >= 0; i -= 1) {
      const frame = this.frames[i];
      if (frame.type === "record") return frame.record;
    }
    return null;
  }

  get finalState(): Snapshot | null {
    return this.stateAt(this.frames.length - 1);
  }
}

export function parseFrameLog(text: string): FrameLog {
  const parsed = JSON.parse(text);
  const frames: Frame[] = Array.isArray(parsed) ? parsed : parsed.frames;
  if (!Array.isArray(frames)) {
    throw new Error("frame log must be a list of frames or {frames: [...]}");
  }
  return new FrameLog(frames);
}
