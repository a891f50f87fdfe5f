"""WebSocket bridge between the browser play surface and the trace recorder.

Protocol (JSON text messages, one per WebSocket frame; the socket framing
provides length delimiting).  Every message carries a protocol version "v"
and a per-sender sequence number "seq" (strictly increasing; the bridge
rejects reordered client messages).

client -> server:
    {"v":1,"seq":N,"type":"start","game":?,"seed":?,"paced":"realtime"|"client"}
    {"v":1,"seq":N,"type":"input","ts":millis,
     "event":{"kind":"key_down"|"key_up","key":K} |
             {"kind":"mouse_move"|"mouse_click","x":X,"y":Y}}
    {"v":1,"seq":N,"type":"advance","ticks":T}   (client-paced sessions only)
    {"v":1,"seq":N,"type":"stop"}

server -> client:
    {"v":1,"seq":N,"type":"session","state":"started","game":G,"seed":S,"tick":0}
    {"v":1,"seq":N,"type":"frame","tick":T,"sprites":[...],"vars":{...},
     "game_over":B}
    {"v":1,"seq":N,"type":"session","state":"ended","reason":R,"snapshots":C,
     "duration":T}
    {"v":1,"seq":N,"type":"error","message":M}

Coordinates are logical canvas units ([-240,240] x [-180,180]); the browser
client converts from pixels before sending.  Keyboard keys are browser
KeyboardEvent.key values; the bridge normalizes them to engine key names.
A disconnect with a session still open ends it with reason player_stop.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import os
import sys

import numpy as np
from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from .engine import CANVAS_HEIGHT, CANVAS_WIDTH
from .recording.data import RecorderConfig, TrainingDataset, load_dataset, save_dataset
from .recording.recorder import RecorderHandle, replay_events

PROTOCOL_VERSION = 1
SEED_RANGE = 2**31 - 1

# KeyboardEvent.key -> engine key name; anything unlisted passes through
# lowercased (the recorder logs unknown keys raw without snapshots).
BROWSER_KEYS = {
    "ArrowLeft": "left",
    "ArrowRight": "right",
    "ArrowUp": "up",
    "ArrowDown": "down",
    " ": "space",
    "Spacebar": "space",
}


def normalize_key(key: str) -> str:
    return BROWSER_KEYS.get(key, key.lower())


class BridgeSession:
    """Protocol core for one client connection: consumes client messages,
    produces server messages.  Synchronous so tests can drive it directly;
    the ASGI wrapper adds the real-time tick pump."""

    def __init__(self, game: str = "paddle_ball", config: RecorderConfig | None = None,
                 seed: int = 0, lock_game: bool = False):
        self.default_game = game
        self.config = config if config is not None else RecorderConfig()
        self.lock_game = lock_game  # reject other games (dataset files are per-game)
        self._rng = np.random.default_rng(seed)
        self.handle: RecorderHandle | None = None
        self.paced = "realtime"
        self.sessions = []
        self.game_id = game
        self._feature_names: tuple[str, ...] = ()
        self._client_seq = -1
        self._server_seq = -1

    # --- outgoing ------------------------------------------------------------

    def _out(self, msg: dict) -> dict:
        self._server_seq += 1
        return {"v": PROTOCOL_VERSION, "seq": self._server_seq, **msg}

    def _error(self, message: str) -> dict:
        return self._out({"type": "error", "message": message})

    def frame_message(self) -> dict:
        state = self.handle.instance.game_state()
        program = self.handle.program
        sprites = [{
            "id": name,
            "x": sp.x, "y": sp.y,
            "heading": sp.heading,
            "costume": sp.costume,
            "size": sp.size,
            "visible": sp.visible,
        } for name, sp in ((n, state.sprites[n]) for n in program.sprite_names)]
        return self._out({
            "type": "frame", "tick": state.tick, "sprites": sprites,
            "vars": state.variables, "game_over": state.game_over,
        })

    # --- session lifecycle ----------------------------------------------------

    def _end(self, reason: str) -> dict:
        session = self.handle.end_session(reason)
        self.sessions.append(session)
        self.handle = None
        return self._out({
            "type": "session", "state": "ended", "reason": session.end_reason,
            "snapshots": len(session.snapshots), "duration": session.duration_ticks,
        })

    def advance(self, ticks: int = 1) -> list[dict]:
        """Advance the live game and emit a frame; ends the session on
        game over.  No-op when no session is active."""
        if self.handle is None:
            return []
        self.handle.advance(ticks)
        out = [self.frame_message()]
        if self.handle.game_over:
            out.append(self._end("game_over"))
        return out

    def disconnect(self) -> None:
        if self.handle is not None:
            self._end("player_stop")

    def dataset(self) -> TrainingDataset:
        if not self._feature_names:
            h = RecorderHandle(self.default_game, seed=0, config=self.config)
            self._feature_names = tuple(e.feature_name for e in h.schema.entries)
        return TrainingDataset(game_id=self.game_id, sessions=list(self.sessions),
                               config=self.config, feature_names=self._feature_names)

    # --- incoming ------------------------------------------------------------

    def handle_message(self, raw: str) -> list[dict]:
        try:
            msg = json.loads(raw)
        except json.JSONDecodeError as e:
            return [self._error(f"bad json: {e}")]
        if not isinstance(msg, dict):
            return [self._error("message must be an object")]
        if msg.get("v") != PROTOCOL_VERSION:
            return [self._error(f"unsupported protocol version {msg.get('v')!r}")]
        seq = msg.get("seq")
        if not isinstance(seq, int) or seq <= self._client_seq:
            return [self._error(
                f"bad sequence number {seq!r} (last was {self._client_seq})")]
        self._client_seq = seq
        kind = msg.get("type")
        if kind == "start":
            return self._on_start(msg)
        if kind == "input":
            return self._on_input(msg)
        if kind == "advance":
            return self._on_advance(msg)
        if kind == "stop":
            return self._on_stop()
        return [self._error(f"unknown message type {kind!r}")]

    def _on_start(self, msg: dict) -> list[dict]:
        if self.handle is not None:
            return [self._error("session already active")]
        game = msg.get("game", self.default_game)
        if self.lock_game and game != self.default_game:
            return [self._error(f"this bridge records {self.default_game!r} only")]
        seed = msg.get("seed")
        if seed is None:
            seed = int(self._rng.integers(0, SEED_RANGE))
        paced = msg.get("paced", "realtime")
        if paced not in ("realtime", "client"):
            return [self._error(f"unknown pacing {paced!r}")]
        try:
            self.handle = RecorderHandle(game, seed=int(seed), config=self.config)
        except (KeyError, ValueError) as e:
            return [self._error(str(e))]
        self.paced = paced
        self.game_id = game
        self._feature_names = tuple(e.feature_name for e in self.handle.schema.entries)
        started = self._out({"type": "session", "state": "started", "game": game,
                             "seed": int(seed), "tick": self.handle.tick})
        return [started, self.frame_message()]

    def _on_input(self, msg: dict) -> list[dict]:
        if self.handle is None:
            return [self._error("no active session")]
        event = msg.get("event")
        if not isinstance(event, dict):
            return [self._error("input message needs an event object")]
        kind = event.get("kind")
        tick = self.handle.tick
        try:
            if kind in ("key_down", "key_up"):
                self.handle.on_key(normalize_key(str(event["key"])),
                                   down=(kind == "key_down"), tick=tick)
            elif kind in ("mouse_move", "mouse_click"):
                x, y = float(event["x"]), float(event["y"])
                if abs(x) > CANVAS_WIDTH / 2 or abs(y) > CANVAS_HEIGHT / 2:
                    return [self._error(f"mouse position ({x}, {y}) outside canvas")]
                if kind == "mouse_move":
                    self.handle.on_mouse_move(x, y, tick)
                else:
                    self.handle.on_mouse_click(x, y, tick)
            else:
                return [self._error(f"unknown event kind {kind!r}")]
        except (KeyError, TypeError) as e:
            return [self._error(f"malformed event: {e}")]
        except ValueError as e:
            return [self._error(str(e))]
        return []

    def _on_advance(self, msg: dict) -> list[dict]:
        if self.handle is None:
            return [self._error("no active session")]
        if self.paced != "client":
            return [self._error("advance is only valid for client-paced sessions")]
        ticks = msg.get("ticks", 1)
        if not isinstance(ticks, int) or ticks < 1:
            return [self._error(f"bad tick count {ticks!r}")]
        return self.advance(ticks)

    def _on_stop(self) -> list[dict]:
        if self.handle is None:
            return [self._error("no active session")]
        return [self._end("player_stop")]


def create_app(game: str = "paddle_ball", config: RecorderConfig | None = None,
               seed: int = 0, out_path: str | None = None, once: bool = False,
               static_dir: str | None = None, tick_hz: float = 30.0):
    """ASGI app: /ws speaks the bridge protocol; optional static file serving
    for the browser client.  With once=True the server shuts down after the
    first client disconnects (scripted sessions); the dataset is written to
    out_path whenever a connection closes."""
    app = FastAPI()
    app.state.sessions = []
    app.state.n_connections = 0
    app.state.should_exit = None  # once-mode callback, set by serve()

    def save_all():
        if not (out_path and app.state.sessions):
            return
        probe = BridgeSession(game=game, config=config)
        ds = TrainingDataset(game_id=game, sessions=list(app.state.sessions),
                             config=probe.config,
                             feature_names=probe.dataset().feature_names)
        save_dataset(ds, out_path)

    app.state.save_all = save_all

    @app.websocket("/ws")
    async def ws_endpoint(ws: WebSocket):
        await ws.accept()
        # distinct seed stream per connection, deterministic in arrival order
        session = BridgeSession(game=game, config=config,
                                seed=seed + app.state.n_connections,
                                lock_game=out_path is not None)
        app.state.n_connections += 1
        interval = 1.0 / tick_hz
        loop = asyncio.get_event_loop()
        deadline = loop.time() + interval
        try:
            while True:
                if session.paced == "realtime" and session.handle is not None:
                    timeout = max(0.0, deadline - loop.time())
                    try:
                        raw = await asyncio.wait_for(ws.receive_text(), timeout)
                    except asyncio.TimeoutError:
                        for out in session.advance(1):
                            await ws.send_text(json.dumps(out))
                        deadline += interval
                        continue
                else:
                    raw = await ws.receive_text()
                    deadline = loop.time() + interval
                for out in session.handle_message(raw):
                    await ws.send_text(json.dumps(out))
        except WebSocketDisconnect:
            pass
        finally:
            session.disconnect()
            app.state.sessions.extend(session.sessions)
            save_all()
            if once and app.state.should_exit is not None:
                app.state.should_exit()

    if static_dir and os.path.isdir(static_dir):
        from fastapi.staticfiles import StaticFiles
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app


def serve(app, host: str = "127.0.0.1", port: int = 8571) -> None:
    import uvicorn

    server = uvicorn.Server(uvicorn.Config(app, host=host, port=port,
                                           log_level="warning"))

    def should_exit():
        server.should_exit = True

    app.state.should_exit = should_exit
    server.run()


def check_replay(path: str) -> bool:
    """Re-derive every session of a recorded dataset from its raw event log
    and compare snapshot counts; prints one line per session."""
    ds = load_dataset(path)
    ok = True
    for i, s in enumerate(ds.sessions):
        re_run = replay_events(ds.game_id, s.seed, s.events, s.duration_ticks,
                               ds.config, s.end_reason)
        match = len(re_run.snapshots) == len(s.snapshots)
        ok = ok and match
        print(f"session {i}: snapshots={len(s.snapshots)} "
              f"replayed={len(re_run.snapshots)} {'ok' if match else 'MISMATCH'}")
    return ok


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="evoplay-bridge",
                                     description="play-surface WebSocket bridge")
    parser.add_argument("--game", default="paddle_ball")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8571)
    parser.add_argument("--out", default=None, help="dataset file to write")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--delta-t", type=float, default=float("inf"),
                        help="no-op synthesis threshold in ticks")
    parser.add_argument("--once", action="store_true",
                        help="exit after the first client disconnects")
    parser.add_argument("--static", default=None, help="directory of UI files")
    parser.add_argument("--check-replay", default=None, metavar="DATASET",
                        help="verify a dataset against its event log and exit")
    args = parser.parse_args(argv)
    if args.check_replay:
        return 0 if check_replay(args.check_replay) else 2
    config = RecorderConfig(delta_t=args.delta_t)
    app = create_app(game=args.game, config=config, seed=args.seed,
                     out_path=args.out, once=args.once, static_dir=args.static)
    serve(app, host=args.host, port=args.port)
    return 0


if __name__ == "__main__":
    sys.exit(main())
