import { describe, expect, it } from "vitest";
import { parseServerMessage } from "../src/protocol.js";

// captured from a live bridge session
const FRAME = JSON.stringify({
  v: 1, seq: 1, type: "frame", tick: 0,
  sprites: [
    { id: "ball", x: -119.8338115029037, y: 33.763094153255224,
      heading: 154.26916991360486, costume: 0, size: 100.0, visible: true },
    { id: "paddle", x: 0.0, y: -150.0, heading: 90.0, costume: 0,
      size: 100.0, visible: true },
  ],
  vars: { score: 0.0 }, game_over: false,
});

describe("parseServerMessage", () => {
  it("accepts a real frame message", () => {
    const msg = parseServerMessage(FRAME);
    expect(msg?.type).toBe("frame");
    if (msg?.type === "frame") {
      expect(msg.sprites.map((s) => s.id)).toEqual(["ball", "paddle"]);
      expect(msg.vars.score).toBe(0);
    }
  });

  it("accepts session and error messages", () => {
    expect(parseServerMessage(JSON.stringify(
      { v: 1, seq: 0, type: "session", state: "started", game: "paddle_ball", seed: 7, tick: 0 },
    ))?.type).toBe("session");
    expect(parseServerMessage(JSON.stringify(
      { v: 1, seq: 3, type: "session", state: "ended", reason: "game_over", snapshots: 12, duration: 300 },
    ))?.type).toBe("session");
    expect(parseServerMessage(JSON.stringify(
      { v: 1, seq: 2, type: "error", message: "no active session" },
    ))?.type).toBe("error");
  });

  it("rejects other protocol versions", () => {
    expect(parseServerMessage(JSON.stringify(
      { v: 2, seq: 0, type: "error", message: "x" }))).toBeNull();
    expect(parseServerMessage(JSON.stringify(
      { seq: 0, type: "error", message: "x" }))).toBeNull();
  });

  it("rejects malformed payloads", () => {
    expect(parseServerMessage("not json")).toBeNull();
    expect(parseServerMessage("42")).toBeNull();
    expect(parseServerMessage(JSON.stringify({ v: 1, seq: 0, type: "warp" }))).toBeNull();
    expect(parseServerMessage(JSON.stringify(
      { v: 1, seq: 0, type: "session", state: "paused" }))).toBeNull();
    expect(parseServerMessage(JSON.stringify(
      { v: 1, seq: 0, type: "frame", tick: 1, sprites: [{ id: 5 }], vars: {}, game_over: false },
    ))).toBeNull();
    expect(parseServerMessage(JSON.stringify(
      { v: 1, seq: 0, type: "frame", tick: "soon", sprites: [], vars: {}, game_over: false },
    ))).toBeNull();
  });
});
