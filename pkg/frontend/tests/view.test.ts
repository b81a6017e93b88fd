import { describe, expect, it } from "vitest";

import type { ItemState, StationState } from "../src/types.js";
import { buildPalette, buildViewModel, describeItem, moveToCell } from "../src/view.js";
import { fixture } from "./fixture.js";

const firstState = fixture.frames.find((f) => f.type === "state");
if (!firstState || firstState.type !== "state") throw new Error("fixture has no state frame");
const initial = firstState.state;

describe("buildViewModel", () => {
  it("covers the whole grid with one cell per tile", () => {
    const vm = buildViewModel(fixture.final_state);
    expect(vm.width).toBe(fixture.final_state.width);
    expect(vm.height).toBe(fixture.final_state.height);
    expect(vm.cells).toHaveLength(vm.width * vm.height);
    const seen = new Set(vm.cells.map((c) => `${c.x},${c.y}`));
    expect(seen.size).toBe(vm.cells.length);
  });

  it("places every station on its own cell", () => {
    const vm = buildViewModel(fixture.final_state);
    for (const station of fixture.final_state.stations) {
      const [x, y] = station.pos;
      const cell = vm.cells.find((c) => c.x === x && c.y === y);
      expect(cell?.station?.name).toBe(station.name);
      const view = vm.stations.find((s) => s.name === station.name);
      expect(view?.glyph).not.toBe("");
    }
  });

  it("marks the pending order before serving and served after", () => {
    const before = buildViewModel(initial);
    expect(before.orders[0]).toMatchObject({ served: false, next: true });
    const after = buildViewModel(fixture.final_state);
    expect(after.orders[0]).toMatchObject({ served: true, next: false });
    expect(after.status).toBe("success");
    expect(after.clock).toBe(fixture.record.oct);
  });

  it("derives agent busy/holding purely from the snapshot", () => {
    const start = buildViewModel(initial);
    expect(start.agents[0]).toMatchObject({ busy: false, finished: false, holding: null });
    const carrying = fixture.frames.find(
      (f) => f.type === "state" && f.state.agents.some((a) => a.holding !== null),
    );
    expect(carrying).toBeDefined();
    if (carrying && carrying.type === "state") {
      const vm = buildViewModel(carrying.state);
      const holder = vm.agents.find((a) => a.holding !== null);
      expect(holder?.holding).toContain("lettuce");
    }
  });
});

describe("describeItem", () => {
  const lettuce: ItemState = {
    kind: "ingredient",
    name: "lettuce",
    chopped: false,
    cooked_in: null,
    cook_progress: 0,
  };

  it("annotates preparation state", () => {
    expect(describeItem(lettuce)).toBe("lettuce");
    expect(describeItem({ ...lettuce, chopped: true })).toBe("lettuce (chopped)");
    expect(describeItem({ ...lettuce, name: "meat", cooked_in: "pan" })).toBe("meat (cooked:pan)");
    expect(describeItem({ ...lettuce, name: "meat", cook_progress: 3 })).toBe("meat (cooking 3)");
  });

  it("nests plate and vessel contents", () => {
    expect(
      describeItem({ kind: "plate", dirty: false, contents: [{ ...lettuce, chopped: true }] }),
    ).toBe("plate[lettuce (chopped)]");
    expect(describeItem({ kind: "plate", dirty: true, contents: [] })).toBe("dirty plate");
    expect(describeItem({ kind: "pot", contents: [lettuce] })).toBe("pot[lettuce]");
  });
});

describe("buildPalette", () => {
  it("offers exactly what the server says is legal", () => {
    const entries = buildPalette(fixture.legal_initial["agent1"]);
    expect(entries.map((e) => e.label)).toEqual(["Wait 1", "Finish"]);
  });

  it("keeps interact/process targets verbatim", () => {
    const entries = buildPalette({
      interact: ["cutting_board1"],
      process: ["cutting_board1"],
      wait: true,
      finish: false,
    });
    expect(entries.map((e) => e.action)).toEqual([
      { action: "Interact", target: "cutting_board1" },
      { action: "Process", target: "cutting_board1" },
      { action: "Wait", duration: 1 },
    ]);
  });

  it("maps a grid click to MoveTo without judging legality", () => {
    expect(moveToCell(4, 2)).toEqual({ action: "MoveTo", target: [4, 2] });
  });
});

describe("station views", () => {
  it("surfaces cook timers when the server reports them", () => {
    const stove: StationState = {
      name: "stove1",
      kind: "stove",
      pos: [1, 1],
      contents: [{ kind: "pan", contents: [] }],
      busy_by: null,
      cook_remaining: 4,
    };
    const snapshot = { ...fixture.final_state, stations: [stove] };
    const vm = buildViewModel(snapshot);
    expect(vm.stations[0].cookRemaining).toBe(4);
    expect(vm.stations[0].summary).toBe("pan");
  });
});
