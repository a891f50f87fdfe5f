/**
 * Bridge client: owns the per-sender sequence numbers and turns the raw
 * socket stream into typed callbacks.  The socket is injected so tests can
 * drive the client with a fake or a node-side WebSocket.
 */

import {
  ClientMessage, ErrorMessage, FrameMessage, InputEvent, PROTOCOL_VERSION,
  SessionMessage, parseServerMessage,
} from "./protocol.js";

/** The subset of the WebSocket interface the client needs. */
export interface SocketLike {
  send(data: string): void;
  close(): void;
  addEventListener(type: string, cb: (ev: any) => void): void;
}

export interface ClientCallbacks {
  onFrame?: (f: FrameMessage) => void;
  onSession?: (s: SessionMessage) => void;
  onError?: (e: ErrorMessage) => void;
  /** Malformed or out-of-order server traffic (protocol violation). */
  onProtocolError?: (problem: string, raw: string) => void;
  onClose?: () => void;
}

export class BridgeClient {
  private seq = -1;
  private serverSeq = -1;

  constructor(private sock: SocketLike, private cb: ClientCallbacks = {}) {
    sock.addEventListener("message", (ev) => {
      const raw = typeof ev.data === "string" ? ev.data : String(ev.data);
      this.receive(raw);
    });
    sock.addEventListener("close", () => this.cb.onClose?.());
  }

  private receive(raw: string): void {
    const msg = parseServerMessage(raw);
    if (msg === null) {
      this.cb.onProtocolError?.("unparseable message", raw);
      return;
    }
    if (msg.seq <= this.serverSeq) {
      this.cb.onProtocolError?.(
        `server seq ${msg.seq} not after ${this.serverSeq}`, raw);
      return;
    }
    this.serverSeq = msg.seq;
    if (msg.type === "frame") this.cb.onFrame?.(msg);
    else if (msg.type === "session") this.cb.onSession?.(msg);
    else this.cb.onError?.(msg);
  }

  private push(body: Record<string, unknown>): void {
    this.seq += 1;
    const msg = { v: PROTOCOL_VERSION, seq: this.seq, ...body } as ClientMessage;
    this.sock.send(JSON.stringify(msg));
  }

  start(opts: { game?: string; seed?: number; paced?: "realtime" | "client" } = {}): void {
    this.push({ type: "start", ...opts });
  }

  stop(): void {
    this.push({ type: "stop" });
  }

  /** Client-paced sessions only. */
  advance(ticks = 1): void {
    this.push({ type: "advance", ticks });
  }

  /** Forwarded immediately; no client-side buffering. */
  sendInput(event: InputEvent): void {
    this.push({ type: "input", ts: Date.now(), event });
  }

  keyDown(key: string): void {
    this.sendInput({ kind: "key_down", key });
  }

  keyUp(key: string): void {
    this.sendInput({ kind: "key_up", key });
  }

  mouseMove(x: number, y: number): void {
    this.sendInput({ kind: "mouse_move", x, y });
  }

  mouseClick(x: number, y: number): void {
    this.sendInput({ kind: "mouse_click", x, y });
  }

  close(): void {
    this.sock.close();
  }
}
