/**
 * Viewport math: a pannable, zoomable window onto the world grid.
 *
 * All functions are pure; the invariant tested against them is that
 * zooming keeps the world point under the cursor fixed on screen.
 */

export interface ViewportState {
  /** World-space coordinate of the screen's top-left corner (cells). */
  x0: number;
  y0: number;
  /** Pixels per cell. */
  zoom: number;
}

export const MIN_ZOOM = 1;
export const MAX_ZOOM = 64;

export function worldToScreen(
  vp: ViewportState,
  wx: number,
  wy: number
): [number, number] {
  return [(wx - vp.x0) * vp.zoom, (wy - vp.y0) * vp.zoom];
}

export function screenToWorld(
  vp: ViewportState,
  px: number,
  py: number
): [number, number] {
  return [vp.x0 + px / vp.zoom, vp.y0 + py / vp.zoom];
}

/** Slide the viewport by a screen-space delta (drag). */
export function pan(vp: ViewportState, dxPx: number, dyPx: number): ViewportState {
  return { ...vp, x0: vp.x0 - dxPx / vp.zoom, y0: vp.y0 - dyPx / vp.zoom };
}

/**
 * Multiply zoom by ``factor`` keeping the world point under the cursor
 * (px, py) stationary on screen.  Zoom clamps to [MIN_ZOOM, MAX_ZOOM];
 * the fixed-point property holds whenever the clamp does not bite.
 */
export function zoomAboutPoint(
  vp: ViewportState,
  px: number,
  py: number,
  factor: number
): ViewportState {
  const zoom = Math.min(MAX_ZOOM, Math.max(MIN_ZOOM, vp.zoom * factor));
  const [wx, wy] = screenToWorld(vp, px, py);
  return { x0: wx - px / zoom, y0: wy - py / zoom, zoom };
}

/** Visible world rectangle, for announcing the viewport to the server. */
export function visibleRect(
  vp: ViewportState,
  screenW: number,
  screenH: number
): [number, number, number, number] {
  const [x1, y1] = screenToWorld(vp, screenW, screenH);
  return [Math.floor(vp.x0), Math.floor(vp.y0), Math.ceil(x1), Math.ceil(y1)];
}
