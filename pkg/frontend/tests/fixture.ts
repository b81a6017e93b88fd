import { readFileSync } from "node:fs";

import type { Frame, LegalActions, RunRecord, Snapshot } from "../src/types.js";

export interface SessionFixture {
  bundle: Record<string, unknown>;
  frames: Frame[];
  final_state: Snapshot;
  legal_initial: Record<string, LegalActions>;
  record: RunRecord;
  row: Record<string, unknown>;
}

const raw = readFileSync(new URL("./fixtures/salad_session.json", import.meta.url), "utf8");

/** One real recorded episode: a solo salad run driven to success. */
export const fixture: SessionFixture = JSON.parse(raw);
