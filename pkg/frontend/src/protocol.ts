/**
 * Bridge protocol v1: JSON text messages over a WebSocket, one per frame.
 * Every message carries a protocol version and a per-sender sequence
 * number; the schema mirrors the one documented in the recorder bridge.
 */

export const PROTOCOL_VERSION = 1;

export type InputEvent =
  | { kind: "key_down" | "key_up"; key: string }
  | { kind: "mouse_move" | "mouse_click"; x: number; y: number };

export type ClientMessage =
  | { v: 1; seq: number; type: "start"; game?: string; seed?: number; paced?: "realtime" | "client" }
  | { v: 1; seq: number; type: "input"; ts: number; event: InputEvent }
  | { v: 1; seq: number; type: "advance"; ticks: number }
  | { v: 1; seq: number; type: "stop" };

export interface SpriteDraw {
  id: string;
  x: number;
  y: number;
  heading: number;
  costume: number;
  size: number;
  visible: boolean;
}

export interface FrameMessage {
  v: 1;
  seq: number;
  type: "frame";
  tick: number;
  sprites: SpriteDraw[];
  vars: Record<string, number>;
  game_over: boolean;
}

export interface SessionMessage {
  v: 1;
  seq: number;
  type: "session";
  state: "started" | "ended";
  game?: string;
  seed?: number;
  tick?: number;
  reason?: string;
  snapshots?: number;
  duration?: number;
}

export interface ErrorMessage {
  v: 1;
  seq: number;
  type: "error";
  message: string;
}

export type ServerMessage = FrameMessage | SessionMessage | ErrorMessage;

function isNum(x: unknown): x is number {
  return typeof x === "number" && Number.isFinite(x);
}

function isSprite(s: any): s is SpriteDraw {
  return (
    s !== null && typeof s === "object" &&
    typeof s.id === "string" &&
    isNum(s.x) && isNum(s.y) && isNum(s.heading) &&
    isNum(s.costume) && isNum(s.size) &&
    typeof s.visible === "boolean"
  );
}

/** Validate one server message; returns null for anything malformed or
 * from a different protocol version. */
export function parseServerMessage(raw: string): ServerMessage | null {
  let msg: any;
  try {
    msg = JSON.parse(raw);
  } catch {
    return null;
  }
  if (msg === null || typeof msg !== "object") return null;
  if (msg.v !== PROTOCOL_VERSION || !isNum(msg.seq)) return null;
  switch (msg.type) {
    case "frame":
      if (!isNum(msg.tick) || typeof msg.game_over !== "boolean") return null;
      if (!Array.isArray(msg.sprites) || !msg.sprites.every(isSprite)) return null;
      if (msg.vars === null || typeof msg.vars !== "object") return null;
      return msg as FrameMessage;
    case "session":
      if (msg.state !== "started" && msg.state !== "ended") return null;
      return msg as SessionMessage;
    case "error":
      if (typeof msg.message !== "string") return null;
      return msg as ErrorMessage;
    default:
      return null;
  }
}
