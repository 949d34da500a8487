/**
 * Canonical per-type action table, mirrored from the engine.
 *
 * Order: DoNothing, TurnLeft, TurnRight, then the move window, then the
 * attack window.  Each window scans its (2n+1)^2 square row-major
 * (top-left to bottom-right) excluding (0,0).  Offsets are egocentric:
 * (0,-1) is the cell directly ahead of the agent.
 */

export const DO_NOTHING = 0;
export const TURN_LEFT = 1;
export const TURN_RIGHT = 2;
export const MOVE = 3;
export const ATTACK = 4;

export interface Action {
  kind: number;
  dx: number;
  dy: number;
}

function windowOffsets(n: number): [number, number][] {
  const out: [number, number][] = [];
  for (let dy = -n; dy <= n; dy++) {
    for (let dx = -n; dx <= n; dx++) {
      if (dx !== 0 || dy !== 0) out.push([dx, dy]);
    }
  }
  return out;
}

export function actionTable(speed: number, attackRange: number): Action[] {
  const table: Action[] = [
    { kind: DO_NOTHING, dx: 0, dy: 0 },
    { kind: TURN_LEFT, dx: 0, dy: 0 },
    { kind: TURN_RIGHT, dx: 0, dy: 0 },
  ];
  for (const [dx, dy] of windowOffsets(speed)) table.push({ kind: MOVE, dx, dy });
  for (const [dx, dy] of windowOffsets(attackRange)) {
    table.push({ kind: ATTACK, dx, dy });
  }
  return table;
}

/** Index of an action in the table, or -1 if the type cannot do it. */
export function actionIndex(
  table: Action[],
  kind: number,
  dx = 0,
  dy = 0
): number {
  return table.findIndex((a) => a.kind === kind && a.dx === dx && a.dy === dy);
}

/**
 * Keyboard mapping for a controlled agent.  Arrows move egocentrically
 * (up = forward), q/e turn, space attacks the cell ahead.  Unknown keys
 * and unavailable actions map to null; the caller falls back to
 * DoNothing, matching the server's default for controlled agents.
 */
export function keyToAction(key: string, table: Action[]): number | null {
  let idx: number;
  switch (key) {
    case "ArrowUp":
      idx = actionIndex(table, MOVE, 0, -1);
      break;
    case "ArrowDown":
      idx = actionIndex(table, MOVE, 0, 1);
      break;
    case "ArrowLeft":
      idx = actionIndex(table, MOVE, -1, 0);
      break;
    case "ArrowRight":
      idx = actionIndex(table, MOVE, 1, 0);
      break;
    case "q":
      idx = TURN_LEFT;
      break;
    case "e":
      idx = TURN_RIGHT;
      break;
    case " ":
      idx = actionIndex(table, ATTACK, 0, -1);
      break;
    default:
      return null;
  }
  return idx >= 0 ? idx : null;
}
