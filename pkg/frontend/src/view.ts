/** Pure render-model construction from server snapshots.
 *
 * Every fact shown comes straight from a state frame; nothing here applies
 * game rules, predicts outcomes, or second-guesses the server.
 */

import type {
  ActionJson,
  AgentState,
  ItemState,
  LegalActions,
  Snapshot,
  StationState,
} from "./types.js";

export const STATION_GLYPHS: Record<string, string> = {
  dispenser: "D",
  cutting_board: "C",
  stove: "S",
  counter: "#",
  sink: "W",
  serving_window: "V",
  dirty_plate_return: "R",
};

export interface CellView {
  x: number;
  y: number;
  station: StationState | null;
}

export interface StationView {
  name: string;
  kind: string;
  glyph: string;
  pos: [number, number];
  summary: string;
  busyBy: string | null;
  cookRemaining: number | null;
}

export interface AgentView {
  id: string;
  pos: [number, number];
  holding: string | null;
  busy: boolean;
  finished: boolean;
}

export interface OrderView {
  dish: string;
  index: number;
  served: boolean;
  next: boolean;
}

export interface ViewModel {
  width: number;
  height: number;
  clock: number;
  tMax: number | null;
  status: string;
  failureReason: string | null;
  cells: CellView[];
  stations: StationView[];
  agents: AgentView[];
  orders: OrderView[];
}

export function describeItem(item: ItemState): string {
  if (item.kind === "ingredient") {
    const ing = item as Extract<ItemState, { kind: "ingredient" }>;
    const marks: string[] = [];
    if (ing.chopped) marks.push("chopped");
    if (ing.cooked_in) marks.push(`cooked:${ing.cooked_in}`);
    else if (ing.cook_progress > 0) marks.push(`cooking ${ing.cook_progress}`);
    return marks.length ? `${ing.name} (${marks.join(", ")})` : ing.name;
  }
  if (item.kind === "plate") {
    const plate = item as Extract<ItemState, { kind: "plate" }>;
    const load = plate.contents.map(describeItem).join(" + ");
    const state = plate.dirty ? "dirty plate" : "plate";
    return load ? `${state}[${load}]` : state;
  }
  const vessel = item as { kind: string; contents: ItemState[] };
  const load = vessel.contents.map(describeItem).join(" + ");
  return load ? `${vessel.kind}[${load}]` : vessel.kind;
}

function stationView(station: StationState): StationView {
  const parts = station.contents.map(describeItem);
  if (station.ingredient) parts.unshift(`src:${station.ingredient}`);
  return {
    name: station.name,
    kind: station.kind,
    glyph: STATION_GLYPHS[station.kind] ?? "?",
    pos: station.pos,
    summary: parts.join(", "),
    busyBy: station.busy_by,
    cookRemaining: station.cook_remaining ?? null,
  };
}

function agentView(agent: AgentState, clock: number): AgentView {
  return {
    id: agent.id,
    pos: agent.pos,
    holding: agent.holding ? describeItem(agent.holding) : null,
    busy: agent.busy_until > clock,
    finished: agent.finished,
  };
}

export function buildViewModel(snapshot: Snapshot): ViewModel {
  const byPos = new Map<string, StationState>();
  for (const station of snapshot.stations) {
    byPos.set(`${station.pos[0]},${station.pos[1]}`, station);
  }
  const cells: CellView[] = [];
  for (let y = 0; y < snapshot.height; y += 1) {
    for (let x = 0; x < snapshot.width; x += 1) {
      cells.push({ x, y, station: byPos.get(`${x},${y}`) ?? null });
    }
  }
  // next_index comes from the server; the client never derives order state
  const orders = snapshot.orders.dishes.map((dish, index) => ({
    dish,
    index,
    served: index < snapshot.orders.next_index,
    next: index === snapshot.orders.next_index,
  }));
  return {
    width: snapshot.width,
    height: snapshot.height,
    clock: snapshot.clock,
    tMax: snapshot.t_max,
    status: snapshot.status,
    failureReason: snapshot.failure_reason,
    cells,
    stations: snapshot.stations.map(stationView),
    agents: snapshot.agents.map((a) => agentView(a, snapshot.clock)),
    orders,
  };
}

export interface PaletteEntry {
  label: string;
  action: ActionJson;
}

/** Buttons for one agent, straight from the server's legal_actions. */
export function buildPalette(legal: LegalActions, waitDuration = 1): PaletteEntry[] {
  const entries: PaletteEntry[] = [];
  for (const name of legal.interact) {
    entries.push({ label: `Interact ${name}`, action: { action: "Interact", target: name } });
  }
  for (const name of legal.process) {
    entries.push({ label: `Process ${name}`, action: { action: "Process", target: name } });
  }
  if (legal.wait) {
    entries.push({
      label: `Wait ${waitDuration}`,
      action: { action: "Wait", duration: waitDuration },
    });
  }
  if (legal.finish) {
    entries.push({ label: "Finish", action: { action: "Finish" } });
  }
  return entries;
}

/** Map a grid click to a MoveTo; the server decides whether it is legal. */
export function moveToCell(x: number, y: number): ActionJson {
  return { action: "MoveTo", target: [x, y] };
}
