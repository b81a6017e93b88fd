/** Canvas drawing for a kitchen view model. */

import type { ViewModel } from "./view.js";

export const TILE = 56;

const KIND_FILLS: Record<string, string> = {
  dispenser: "#2d6a4f",
  cutting_board: "#9c6644",
  stove: "#9d0208",
  counter: "#495057",
  sink: "#1d4e89",
  serving_window: "#b08900",
  dirty_plate_return: "#6d597a",
};

const AGENT_FILLS = ["#f77f00", "#06d6a0", "#118ab2", "#ef476f"];

export interface CanvasLike {
  width: number;
  height: number;
  getContext(kind: "2d"): CanvasRenderingContext2D | null;
}

export function canvasSize(vm: ViewModel): { width: number; height: number } {
  return { width: vm.width * TILE, height: vm.height * TILE };
}

export function drawKitchen(canvas: CanvasLike, vm: ViewModel): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  const { width, height } = canvasSize(vm);
  canvas.width = width;
  canvas.height = height;

  ctx.fillStyle = "#141414";
  ctx.fillRect(0, 0, width, height);
  ctx.strokeStyle = "#2a2a2a";
  for (const cell of vm.cells) {
    ctx.strokeRect(cell.x * TILE, cell.y * TILE, TILE, TILE);
  }

  ctx.textAlign = "center";
  ctx.textBaseline = "middle";
  for (const station of vm.stations) {
    const [x, y] = station.pos;
    ctx.fillStyle = KIND_FILLS[station.kind] ?? "#555";
    ctx.fillRect(x * TILE + 2, y * TILE + 2, TILE - 4, TILE - 4);
    ctx.fillStyle = "#f8f9fa";
    ctx.font = `${Math.floor(TILE * 0.45)}px monospace`;
    ctx.fillText(station.glyph, (x + 0.5) * TILE, (y + 0.42) * TILE);
    if (station.cookRemaining !== null) {
      ctx.font = `${Math.floor(TILE * 0.25)}px monospace`;
      ctx.fillText(`${station.cookRemaining}`, (x + 0.5) * TILE, (y + 0.8) * TILE);
    } else if (station.busyBy) {
      ctx.font = `${Math.floor(TILE * 0.22)}px monospace`;
      ctx.fillText("busy", (x + 0.5) * TILE, (y + 0.8) * TILE);
    }
  }

  vm.agents.forEach((agent, i) => {
    const [x, y] = agent.pos;
    const cx = (x + 0.5) * TILE;
    const cy = (y + 0.5) * TILE;
    ctx.beginPath();
    ctx.arc(cx, cy, TILE * 0.3, 0, Math.PI * 2);
    ctx.fillStyle = AGENT_FILLS[i % AGENT_FILLS.length];
    ctx.fill();
    if (agent.busy) {
      ctx.strokeStyle = "#ffd60a";
      ctx.lineWidth = 3;
      ctx.stroke();
      ctx.lineWidth = 1;
    }
    ctx.fillStyle = "#141414";
    ctx.font = `${Math.floor(TILE * 0.3)}px monospace`;
    ctx.fillText(agent.id.replace("agent", "a"), cx, cy);
    if (agent.holding) {
      ctx.fillStyle = "#f8f9fa";
      ctx.font = `${Math.floor(TILE * 0.18)}px monospace`;
      ctx.fillText(agent.holding.slice(0, 12), cx, cy + TILE * 0.42);
    }
  });
}

/** Translate a click on the canvas into grid coordinates. */
export function cellFromClick(
  offsetX: number,
  offsetY: number,
  vm: ViewModel,
): { x: number; y: number } | null {
  const x = Math.floor(offsetX / TILE);
  const y = Math.floor(offsetY / TILE);
  if (x < 0 || y < 0 || x >= vm.width || y >= vm.height) return null;
  return { x, y };
}
