/**
 * Browser entry point.  Query parameters:
 *   server=ws://host:port   websocket address (default ws://127.0.0.1:8765)
 *   mode=replay|live        hides spawn/kill controls on replays (default live)
 *   x0, y0, zoom            initial viewport
 */

import { actionTable } from "./actions.js";
import { attachInput } from "./input.js";
import { agentAlive, agentAt, render } from "./render.js";
import { ClientSession } from "./session.js";
import { visibleRect, ViewportState } from "./viewport.js";

const params = new URLSearchParams(window.location.search);
const serverUrl = params.get("server") ?? "ws://127.0.0.1:8765";
const mode = params.get("mode") === "replay" ? "replay" : "live";

let viewport: ViewportState = {
  x0: Number(params.get("x0") ?? 0),
  y0: Number(params.get("y0") ?? 0),
  zoom: Number(params.get("zoom") ?? 16),
};

const canvas = document.getElementById("view") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;
const banner = document.getElementById("banner") as HTMLDivElement;
const hudButtons = document.getElementById("buttons") as HTMLDivElement;

let session: ClientSession;
let selected: number | null = null;
let paused = false;
let speed = 4;

function fitCanvas(): void {
  canvas.width = window.innerWidth;
  canvas.height = window.innerHeight - hudButtons.offsetHeight;
}
window.addEventListener("resize", fitCanvas);
fitCanvas();

function showBanner(msg: string, retry: boolean): void {
  banner.textContent = msg;
  banner.style.display = "block";
  if (retry) {
    const btn = document.createElement("button");
    btn.textContent = "retry";
    btn.onclick = () => {
      banner.style.display = "none";
      connect();
    };
    banner.append(" ", btn);
  }
}

function repaint(): void {
  if (!session.header || !session.frame) return;
  if (selected !== null && !agentAlive(session.frame, selected)) {
    selected = null;
    session.release();
  }
  render(ctx, {
    header: session.header,
    frame: session.frame,
    viewport,
    selected,
    speed,
    paused,
  });
}

function announceViewport(): void {
  const [x0, y0, x1, y1] = visibleRect(viewport, canvas.width, canvas.height);
  session.announceViewport(x0, y0, x1, y1);
}

function tableForAgent(id: number) {
  const h = session.header;
  const f = session.frame;
  if (!h || !f) return null;
  const row = f.agents.find((r) => r[0] === id);
  if (!row) return null;
  const spec = h.types.find((t) => t.name === h.groups[row[1]].type);
  if (!spec) return null;
  return actionTable(spec.speed ?? 1, spec.attack_range ?? 0);
}

attachInput(canvas, {
  getViewport: () => viewport,
  setViewport: (vp) => {
    viewport = vp;
    announceViewport();
    repaint();
  },
  onSelect: (wx, wy) => {
    if (!session.frame) return;
    selected = agentAt(session.frame, wx, wy);
    repaint();
  },
  onAction: (idx) => session.act(idx),
  getActionTable: () =>
    session.controlledAgent !== null ? tableForAgent(session.controlledAgent) : null,
});

function button(label: string, onClick: () => void): void {
  const b = document.createElement("button");
  b.textContent = label;
  b.onclick = onClick;
  hudButtons.appendChild(b);
}

button("pause", () => {
  paused = true;
  session.pause();
  repaint();
});
button("resume", () => {
  paused = false;
  session.resume();
  repaint();
});
button("step", () => session.step());
button("slower", () => {
  speed = Math.max(0.5, speed / 2);
  session.setSpeed(speed);
  repaint();
});
button("faster", () => {
  speed = Math.min(256, speed * 2);
  session.setSpeed(speed);
  repaint();
});
if (mode === "live") {
  button("take", () => {
    if (selected !== null) session.take(selected);
  });
  button("release", () => session.release());
  button("kill", () => {
    if (selected !== null) session.kill(selected);
  });
  button("spawn", () => {
    const h = session.header;
    if (!h) return;
    const group = prompt(`group (${h.groups.map((g) => g.name).join(", ")})`);
    const at = prompt("x,y");
    if (!group || !at) return;
    const [x, y] = at.split(",").map(Number);
    session.spawn(group, x, y);
  });
}

function connect(): void {
  session = new ClientSession(serverUrl, {
    onOpen: () => announceViewport(),
    onHeader: () => repaint(),
    onFrame: () => repaint(),
    onError: (e) => showBanner(`server: ${e.msg}`, false),
    onClose: () => showBanner(`connection to ${serverUrl} closed`, true),
  });
}

connect();
