/**
 * Wire protocol shared with the simulation server.
 *
 * Server to client: one JSON object per websocket text frame, tagged by
 * "t": a header on connect, then frames, plus acks and errors in reply
 * to control messages.  Client to server: {"t":"control","cmd":...}.
 */

export interface TypeSpec {
  name: string;
  speed?: number;
  view_range?: number;
  attack_range?: number;
  damage?: number;
  max_hp?: number;
  step_recover?: number;
  body_w?: number;
  body_h?: number;
}

export interface Header {
  t: "header";
  version: number;
  width: number;
  height: number;
  walls: [number, number][];
  types: TypeSpec[];
  groups: { name: string; type: string }[];
  scenario: string;
  seed: number;
}

/** One agent row: [id, group, x, y, dir, hp]. */
export type AgentRow = [number, number, number, number, number, number];

export interface FrameEvents {
  attack: [number, number][];
  kill: [number, number][];
  die: number[];
  collide: [number, number][];
}

export interface Frame {
  t: "frame";
  step: number;
  agents: AgentRow[];
  events: FrameEvents;
  rewards: Record<string, number>;
  populations: Record<string, number>;
}

export interface Ack {
  t: "ack";
  cmd: string;
}

export interface ServerError {
  t: "error";
  msg: string;
}

export type ServerMessage = Header | Frame | Ack | ServerError;

/** Parse a server message; null for anything malformed or untagged. */
export function parseMessage(raw: string): ServerMessage | null {
  let obj: unknown;
  try {
    obj = JSON.parse(raw);
  } catch {
    return null;
  }
  if (typeof obj !== "object" || obj === null) return null;
  const t = (obj as { t?: unknown }).t;
  if (t === "header" || t === "frame" || t === "ack" || t === "error") {
    return obj as ServerMessage;
  }
  return null;
}

export type ControlMessage =
  | { t: "control"; cmd: "pause" }
  | { t: "control"; cmd: "resume" }
  | { t: "control"; cmd: "step" }
  | { t: "control"; cmd: "speed"; steps_per_second: number }
  | { t: "control"; cmd: "take"; agent: number }
  | { t: "control"; cmd: "release"; agent: number }
  | { t: "control"; cmd: "act"; agent: number; action: number }
  | { t: "control"; cmd: "spawn"; group: string; x: number; y: number }
  | { t: "control"; cmd: "kill"; agent: number }
  | {
      t: "control";
      cmd: "viewport";
      x0: number;
      y0: number;
      x1: number;
      y1: number;
    };

export const control = {
  pause: (): ControlMessage => ({ t: "control", cmd: "pause" }),
  resume: (): ControlMessage => ({ t: "control", cmd: "resume" }),
  step: (): ControlMessage => ({ t: "control", cmd: "step" }),
  speed: (stepsPerSecond: number): ControlMessage => ({
    t: "control",
    cmd: "speed",
    steps_per_second: stepsPerSecond,
  }),
  take: (agent: number): ControlMessage => ({ t: "control", cmd: "take", agent }),
  release: (agent: number): ControlMessage => ({
    t: "control",
    cmd: "release",
    agent,
  }),
  act: (agent: number, action: number): ControlMessage => ({
    t: "control",
    cmd: "act",
    agent,
    action,
  }),
  spawn: (group: string, x: number, y: number): ControlMessage => ({
    t: "control",
    cmd: "spawn",
    group,
    x,
    y,
  }),
  kill: (agent: number): ControlMessage => ({ t: "control", cmd: "kill", agent }),
  viewport: (x0: number, y0: number, x1: number, y1: number): ControlMessage => ({
    t: "control",
    cmd: "viewport",
    x0,
    y0,
    x1,
    y1,
  }),
};
