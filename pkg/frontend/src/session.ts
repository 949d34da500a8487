/**
 * Client-side session state: one websocket connection, the header it
 * opened with, and the latest complete frame.  Rendering always reads
 * from the latest frame; partial state never leaks to the canvas.
 *
 * The WebSocket constructor is injectable so node tests can supply the
 * "ws" package while the browser uses the native implementation.
 */

import {
  control,
  Frame,
  Header,
  parseMessage,
  ServerError,
} from "./protocol.js";

/** Minimal surface of a websocket the session needs. */
export interface SocketLike {
  send(data: string): void;
  close(): void;
  addEventListener(type: string, fn: (ev: { data?: unknown }) => void): void;
}

export type SocketFactory = (url: string) => SocketLike;

export interface SessionHandlers {
  onHeader?: (h: Header) => void;
  onFrame?: (f: Frame) => void;
  onError?: (e: ServerError) => void;
  onClose?: () => void;
  onOpen?: () => void;
}

export class ClientSession {
  header: Header | null = null;
  frame: Frame | null = null;
  framesReceived = 0;
  controlledAgent: number | null = null;

  private readonly sock: SocketLike;

  constructor(
    url: string,
    handlers: SessionHandlers = {},
    factory?: SocketFactory
  ) {
    const make: SocketFactory =
      factory ?? ((u) => new WebSocket(u) as unknown as SocketLike);
    this.sock = make(url);
    this.sock.addEventListener("open", () => handlers.onOpen?.());
    this.sock.addEventListener("close", () => handlers.onClose?.());
    this.sock.addEventListener("message", (ev) => {
      const msg = parseMessage(String(ev.data));
      if (msg === null) return;
      if (msg.t === "header") {
        this.header = msg;
        handlers.onHeader?.(msg);
      } else if (msg.t === "frame") {
        this.frame = msg;
        this.framesReceived += 1;
        handlers.onFrame?.(msg);
      } else if (msg.t === "error") {
        handlers.onError?.(msg);
      }
    });
  }

  private send(msg: object): void {
    this.sock.send(JSON.stringify(msg));
  }

  pause(): void {
    this.send(control.pause());
  }

  resume(): void {
    this.send(control.resume());
  }

  step(): void {
    this.send(control.step());
  }

  setSpeed(stepsPerSecond: number): void {
    this.send(control.speed(stepsPerSecond));
  }

  take(agent: number): void {
    this.controlledAgent = agent;
    this.send(control.take(agent));
  }

  release(): void {
    if (this.controlledAgent === null) return;
    this.send(control.release(this.controlledAgent));
    this.controlledAgent = null;
  }

  act(action: number): void {
    if (this.controlledAgent === null) return;
    this.send(control.act(this.controlledAgent, action));
  }

  spawn(group: string, x: number, y: number): void {
    this.send(control.spawn(group, x, y));
  }

  kill(agent: number): void {
    this.send(control.kill(agent));
  }

  announceViewport(x0: number, y0: number, x1: number, y1: number): void {
    this.send(control.viewport(x0, y0, x1, y1));
  }

  close(): void {
    this.sock.close();
  }
}
