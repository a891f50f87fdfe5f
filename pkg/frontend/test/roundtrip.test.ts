/**
 * UI round-trip acceptance: drive a real `evoplay record` server through the
 * BridgeClient over a live WebSocket, then check (a) the recorder-side event
 * log is identical in content and order to what the client dispatched and
 * (b) a 30-second scripted PaddleBall play yields a loadable dataset whose
 * snapshot counts match an engine-side replay of the same event log.
 */

import { execFile, spawn, ChildProcess } from "node:child_process";
import { mkdtempSync, readFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { promisify } from "node:util";
import WebSocket from "ws";
import { afterAll, beforeAll, describe, expect, it } from "vitest";
import { BridgeClient } from "../src/client.js";
import { FrameMessage, ServerMessage, SessionMessage } from "../src/protocol.js";

const execFileP = promisify(execFile);

const PORT = 8643;
const TICK_HZ = 30;                   // bridge realtime rate
const PLAY_TICKS = 30 * TICK_HZ;      // 30 seconds of play
const OUT_DIR = mkdtempSync(join(tmpdir(), "play-ui-"));
const OUT_FILE = join(OUT_DIR, "ui_session.jsonl");

// KeyboardEvent.key -> engine key name, as the bridge normalizes it
const ENGINE_KEYS: Record<string, string> = { ArrowLeft: "left", ArrowRight: "right" };

type EngineEvent = Record<string, unknown>;

class MessageQueue {
  private buf: ServerMessage[] = [];
  private waiters: ((m: ServerMessage) => void)[] = [];

  push(m: ServerMessage): void {
    const w = this.waiters.shift();
    if (w) w(m);
    else this.buf.push(m);
  }

  next(timeoutMs = 60_000): Promise<ServerMessage> {
    const b = this.buf.shift();
    if (b) return Promise.resolve(b);
    return new Promise((resolve, reject) => {
      const t = setTimeout(
        () => reject(new Error("timed out waiting for a server message")), timeoutMs);
      this.waiters.push((m) => { clearTimeout(t); resolve(m); });
    });
  }
}

function sleep(ms: number): Promise<void> {
  return new Promise((r) => setTimeout(r, ms));
}

async function connectWithRetry(url: string, attempts = 120): Promise<WebSocket> {
  for (let i = 0; i < attempts; i++) {
    try {
      return await new Promise<WebSocket>((resolve, reject) => {
        const ws = new WebSocket(url);
        ws.once("open", () => resolve(ws));
        ws.once("error", reject);
      });
    } catch {
      await sleep(500);
    }
  }
  throw new Error(`could not reach ${url}`);
}

let server: ChildProcess;
let serverExit: Promise<number | null>;
let socket: WebSocket;
let client: BridgeClient;
const queue = new MessageQueue();

beforeAll(async () => {
  server = spawn("evoplay", [
    "record", "--game", "paddle_ball", "--out", OUT_FILE,
    "--port", String(PORT), "--once", "--seed", "9",
  ], { stdio: ["ignore", "pipe", "pipe"] });
  let stderr = "";
  server.stderr!.on("data", (d) => { stderr += d; });
  serverExit = new Promise((resolve) => server.on("exit", resolve));
  server.on("exit", (code) => {
    if (code !== 0) console.error(`recorder exited with ${code}\n${stderr}`);
  });
  socket = await connectWithRetry(`ws://127.0.0.1:${PORT}/ws`);
  client = new BridgeClient(socket, {
    onFrame: (f) => queue.push(f),
    onSession: (s) => queue.push(s),
    onError: (e) => queue.push(e),
    onProtocolError: (p, raw) => { throw new Error(`protocol violation: ${p}: ${raw}`); },
  });
}, 120_000);

afterAll(async () => {
  if (socket.readyState === WebSocket.OPEN) socket.close();
  const timeout = sleep(30_000).then(() => server.kill());
  await Promise.race([serverExit, timeout]);
});

async function nextFrame(): Promise<FrameMessage> {
  const m = await queue.next();
  if (m.type !== "frame") throw new Error(`expected a frame, got ${JSON.stringify(m)}`);
  return m;
}

function ballX(frame: FrameMessage): number {
  const s = frame.sprites.find((sp) => sp.id === "ball");
  if (!s) throw new Error("no ball sprite in frame");
  return s.x;
}

/** One client-paced session: track the ball with the mouse, plus a couple of
 * keyboard touches and a click so every event kind crosses the wire.  Every
 * dispatched input is recorded with the tick it applies at. */
async function playSession(seed: number): Promise<
  { dispatched: EngineEvent[]; duration: number; snapshots: number }> {
  const dispatched: EngineEvent[] = [];
  client.start({ game: "paddle_ball", seed, paced: "client" });
  const started = await queue.next() as SessionMessage;
  expect(started.type).toBe("session");
  expect(started.state).toBe("started");
  expect(started.seed).toBe(seed);
  let frame = await nextFrame();
  let tick = frame.tick;
  expect(tick).toBe(0);

  const move = (x: number, y: number) => {
    client.mouseMove(x, y);
    dispatched.push({ kind: "mouse_move", x, y, tick });
  };
  // the game has no key handlers; these land in the event log only
  client.keyDown("ArrowLeft");
  dispatched.push({ kind: "key_down", key: ENGINE_KEYS.ArrowLeft, tick });
  client.mouseClick(ballX(frame), -150.0);
  dispatched.push({ kind: "mouse_click", x: ballX(frame), y: -150.0, tick });

  while (!frame.game_over && tick < 450) {
    move(Math.max(-240, Math.min(240, ballX(frame))), -150.0);
    if (tick === 20) {
      client.keyUp("ArrowLeft");
      dispatched.push({ kind: "key_up", key: ENGINE_KEYS.ArrowLeft, tick });
    }
    client.advance(10);
    frame = await nextFrame();
    tick = frame.tick;
  }
  let ended: SessionMessage;
  if (frame.game_over) {
    ended = await queue.next() as SessionMessage;
  } else {
    client.stop();
    ended = await queue.next() as SessionMessage;
  }
  expect(ended.type).toBe("session");
  expect(ended.state).toBe("ended");
  return { dispatched, duration: ended.duration!, snapshots: ended.snapshots! };
}

describe("UI round-trip against a live recorder", () => {
  it("30s scripted play: event log matches dispatch; snapshots replay 1:1", async () => {
    const sessions: Awaited<ReturnType<typeof playSession>>[] = [];
    let played = 0;
    let seed = 21;
    while (played < PLAY_TICKS) {
      const s = await playSession(seed++);
      sessions.push(s);
      played += s.duration;
    }
    expect(played).toBeGreaterThanOrEqual(PLAY_TICKS);
    socket.close();
    await serverExit;

    // recorder-side log: identical content, identical order, per session
    const lines = readFileSync(OUT_FILE, "utf-8").trim().split("\n");
    const header = JSON.parse(lines[0]);
    expect(header.game_id).toBe("paddle_ball");
    expect(header.n_sessions).toBe(sessions.length);
    const stored = lines.slice(1).map((l) => JSON.parse(l));
    expect(stored).toHaveLength(sessions.length);
    for (let i = 0; i < sessions.length; i++) {
      expect(stored[i].events).toEqual(sessions[i].dispatched);
      expect(stored[i].snapshots.length).toBe(sessions[i].snapshots);
      expect(stored[i].duration_ticks).toBe(sessions[i].duration);
    }
    const total = stored.reduce((n, s) => n + s.snapshots.length, 0);
    expect(header.n_snapshots).toBe(total);
    expect(total).toBeGreaterThan(0);

    // engine-side reference replay of the same event log
    const { stdout } = await execFileP(
      "python3", ["-m", "evoplay.bridge", "--check-replay", OUT_FILE]);
    const checks = stdout.trim().split("\n");
    expect(checks).toHaveLength(sessions.length);
    for (const line of checks) {
      const m = /snapshots=(\d+) replayed=(\d+) (\w+)/.exec(line);
      expect(m).not.toBeNull();
      expect(m![2]).toBe(m![1]);
      expect(m![3]).toBe("ok");
    }
  }, 300_000);
});
