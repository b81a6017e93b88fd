/** Wire types mirroring the session service JSON payloads. */

export type ItemState =
  | {
      kind: "ingredient";
      name: string;
      chopped: boolean;
      cooked_in: string | null;
      cook_progress: number;
    }
  | { kind: "plate"; dirty: boolean; contents: ItemState[] }
  | { kind: string; contents: ItemState[] };

export interface AgentState {
  id: string;
  pos: [number, number];
  holding: ItemState | null;
  busy_until: number;
  finished: boolean;
  distance: number;
  work_time: number;
}

export interface StationState {
  name: string;
  kind: string;
  pos: [number, number];
  contents: ItemState[];
  busy_by: string | null;
  ingredient?: string;
  cook_remaining?: number;
}

export interface Snapshot {
  clock: number;
  status: string;
  failure_reason: string | null;
  t_max: number | null;
  width: number;
  height: number;
  orders: { dishes: string[]; next_index: number };
  served: [string, number][];
  agents: AgentState[];
  stations: StationState[];
}

export interface ActionJson {
  action: "MoveTo" | "Interact" | "Process" | "Wait" | "Finish";
  target?: [number, number] | string;
  duration?: number;
}

export interface EventJson {
  clock: number;
  agent: string;
  action: ActionJson;
  outcome: "started" | "completed" | "rejected";
  reason?: string;
  dish?: string;
}

export interface LegalActions {
  interact: string[];
  process: string[];
  wait: boolean;
  finish: boolean;
}

export type SessionStatus = "lobby" | "running" | "finished";

export interface RunRecord {
  success: boolean;
  oct: number;
  per_agent: Record<string, { distance: number; work_time: number }>;
  served: [string, number][];
  failure_reason: string | null;
  events: EventJson[];
}

export type Frame =
  | { type: "state"; seq: number; state: Snapshot; status: SessionStatus }
  | { type: "event"; seq: number; event: EventJson }
  | { type: "record"; seq: number; record: RunRecord }
  | { type: "error"; error: string };

export interface SessionInfo {
  session_id: string;
  status: SessionStatus;
  participants: Record<string, string>;
}

export interface StateResponse {
  session_id: string;
  status: SessionStatus;
  participants: Record<string, string>;
  state: Snapshot;
  needs_decision: string[];
  legal: Record<string, LegalActions>;
  record?: RunRecord;
}

export interface ActionResponse {
  session_id: string;
  event: EventJson;
  state: Snapshot;
  status: SessionStatus;
  needs_decision: string[];
}

export interface FinalizeResponse {
  session_id: string;
  status: SessionStatus;
  record: RunRecord;
  row: Record<string, unknown>;
}
