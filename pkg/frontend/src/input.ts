/**
 * Mouse and keyboard handling: drag pans, wheel zooms about the cursor,
 * click selects the agent under it, and keys drive a controlled agent
 * through the canonical action table.
 */

import { Action, keyToAction } from "./actions.js";
import { pan, ViewportState, zoomAboutPoint, screenToWorld } from "./viewport.js";

const WHEEL_FACTOR = 1.1;
const DRAG_THRESHOLD_PX = 4;

export interface InputCallbacks {
  getViewport(): ViewportState;
  setViewport(vp: ViewportState): void;
  /** Click that was not a drag; world coordinates of the cursor. */
  onSelect(wx: number, wy: number): void;
  /** A key mapped to an action index for the controlled agent. */
  onAction(index: number): void;
  getActionTable(): Action[] | null;
}

export function attachInput(canvas: HTMLCanvasElement, cb: InputCallbacks): void {
  let dragging = false;
  let moved = false;
  let lastX = 0;
  let lastY = 0;

  canvas.addEventListener("mousedown", (ev) => {
    dragging = true;
    moved = false;
    lastX = ev.offsetX;
    lastY = ev.offsetY;
  });

  canvas.addEventListener("mousemove", (ev) => {
    if (!dragging) return;
    const dx = ev.offsetX - lastX;
    const dy = ev.offsetY - lastY;
    if (Math.abs(dx) + Math.abs(dy) >= DRAG_THRESHOLD_PX) moved = true;
    if (moved) {
      cb.setViewport(pan(cb.getViewport(), dx, dy));
      lastX = ev.offsetX;
      lastY = ev.offsetY;
    }
  });

  canvas.addEventListener("mouseup", (ev) => {
    if (dragging && !moved) {
      const [wx, wy] = screenToWorld(cb.getViewport(), ev.offsetX, ev.offsetY);
      cb.onSelect(wx, wy);
    }
    dragging = false;
  });

  canvas.addEventListener("wheel", (ev) => {
    ev.preventDefault();
    const factor = ev.deltaY < 0 ? WHEEL_FACTOR : 1 / WHEEL_FACTOR;
    cb.setViewport(
      zoomAboutPoint(cb.getViewport(), ev.offsetX, ev.offsetY, factor)
    );
  });

  window.addEventListener("keydown", (ev) => {
    const table = cb.getActionTable();
    if (table === null) return;
    const idx = keyToAction(ev.key, table);
    if (idx !== null) {
      ev.preventDefault();
      cb.onAction(idx);
    }
  });
}
