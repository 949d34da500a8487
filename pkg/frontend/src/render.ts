/**
 * Immediate-mode canvas renderer.  Every call repaints the whole view
 * from the latest complete frame: walls, agents colored by group, a
 * facing tick, HP bars above a level-of-detail threshold, a selection
 * outline, and a HUD line.
 */

import { Frame, Header } from "./protocol.js";
import { ViewportState, worldToScreen } from "./viewport.js";

/** HP bars appear only when a cell is at least this many pixels wide. */
export const HP_BAR_MIN_ZOOM = 16;

const GROUP_COLORS = [
  "#e05c4b",
  "#4b7fe0",
  "#57b05a",
  "#d0a13f",
  "#9a5fd0",
  "#45b8b0",
];

const DIR_TICKS: [number, number][] = [
  [0, -0.4], // north
  [0.4, 0], // east
  [0, 0.4], // south
  [-0.4, 0], // west
];

export function groupColor(group: number): string {
  return GROUP_COLORS[group % GROUP_COLORS.length];
}

export interface RenderState {
  header: Header;
  frame: Frame;
  viewport: ViewportState;
  selected: number | null;
  speed: number;
  paused: boolean;
}

export function render(ctx: CanvasRenderingContext2D, st: RenderState): void {
  const { header, frame, viewport: vp, selected } = st;
  const w = ctx.canvas.width;
  const h = ctx.canvas.height;
  const z = vp.zoom;

  ctx.fillStyle = "#16181d";
  ctx.fillRect(0, 0, w, h);

  const [bx, by] = worldToScreen(vp, 0, 0);
  ctx.fillStyle = "#21242b";
  ctx.fillRect(bx, by, header.width * z, header.height * z);

  ctx.fillStyle = "#565d6b";
  for (const [x, y] of header.walls) {
    const [px, py] = worldToScreen(vp, x, y);
    if (px + z < 0 || py + z < 0 || px > w || py > h) continue;
    ctx.fillRect(px, py, z, z);
  }

  const showHp = z >= HP_BAR_MIN_ZOOM;
  const maxHpByGroup = header.groups.map((g) => {
    const spec = header.types.find((t) => t.name === g.type);
    return spec?.max_hp ?? 1;
  });

  for (const [id, group, x, y, dir, hp] of frame.agents) {
    const [px, py] = worldToScreen(vp, x, y);
    if (px + z < 0 || py + z < 0 || px > w || py > h) continue;
    ctx.fillStyle = groupColor(group);
    ctx.fillRect(px + z * 0.1, py + z * 0.1, z * 0.8, z * 0.8);

    if (z >= 6) {
      const [tdx, tdy] = DIR_TICKS[dir % 4];
      ctx.strokeStyle = "#eceff4";
      ctx.lineWidth = Math.max(1, z / 12);
      ctx.beginPath();
      ctx.moveTo(px + z / 2, py + z / 2);
      ctx.lineTo(px + z / 2 + tdx * z, py + z / 2 + tdy * z);
      ctx.stroke();
    }

    if (showHp) {
      const maxHp = maxHpByGroup[group] || 1;
      const frac = Math.max(0, Math.min(1, hp / maxHp));
      ctx.fillStyle = "#30333b";
      ctx.fillRect(px, py - 4, z, 3);
      ctx.fillStyle = frac > 0.5 ? "#57b05a" : "#e05c4b";
      ctx.fillRect(px, py - 4, z * frac, 3);
    }

    if (id === selected) {
      ctx.strokeStyle = "#ffd75e";
      ctx.lineWidth = 2;
      ctx.strokeRect(px + 1, py + 1, z - 2, z - 2);
    }
  }

  const pops = Object.entries(frame.populations)
    .map(([g, n]) => `${g}:${n}`)
    .join("  ");
  ctx.fillStyle = "#eceff4";
  ctx.font = "13px monospace";
  ctx.fillText(
    `step ${frame.step}  ${pops}  ${st.paused ? "paused" : `${st.speed}/s`}`,
    8,
    h - 10
  );
}

/** Agent id at a world cell in this frame, or null. */
export function agentAt(frame: Frame, wx: number, wy: number): number | null {
  const cx = Math.floor(wx);
  const cy = Math.floor(wy);
  for (const [id, , x, y] of frame.agents) {
    if (x === cx && y === cy) return id;
  }
  return null;
}

/** Whether an agent id is still alive in this frame. */
export function agentAlive(frame: Frame, id: number): boolean {
  return frame.agents.some((row) => row[0] === id);
}
