"""Live play capture: key durations, mouse-move debouncing, no-op synthesis.

The driver (UI bridge or a scripted policy) delivers input events for the
current tick, then calls advance() to step the engine.  Snapshots pair the
features saved at action onset with the completed action label; no-ops are
synthesized from gaps between emissions.  The raw event log is kept so a
session can be replayed bit-exactly or re-derived under a different delta_t.
"""

from __future__ import annotations

import math
import warnings

import numpy as np

from ..actions import ActionLabel
from ..engine import GameProgram, GameSpec, InputEvent, load_game
from ..features import feature_schema
from .data import RecorderConfig, RecordingSession, Snapshot, TrainingDataset


class RecorderHandle:
    """One recording session over a live game instance."""

    def __init__(self, game: str | GameSpec | GameProgram, seed: int,
                 config: RecorderConfig | None = None):
        self.config = config or RecorderConfig()
        self.instance = load_game(game, seed=seed)
        self.program = self.instance.program
        self.schema = feature_schema(self.program)
        self.seed = seed
        self.active = True
        self.snapshots: list[Snapshot] = []
        self.events: list[dict] = []
        # last-emission bookkeeping for no-op synthesis
        self.t0 = 0
        self.t0_features = self._features()
        # per-key onset state
        self._key_down: dict[str, tuple[int, np.ndarray]] = {}
        # mouse debounce state
        self._moving = False
        self._move_start = 0
        self._move_features: np.ndarray | None = None
        self._last_move_tick = 0
        self._last_pos = (0.0, 0.0)
        self._pending: list[InputEvent] = []

    @property
    def tick(self) -> int:
        return self.instance.tick

    @property
    def game_over(self) -> bool:
        return self.instance.game_over

    def _features(self) -> np.ndarray:
        return self.schema.extract_vector(self.instance.state)

    def _check(self):
        if not self.active:
            raise RuntimeError("no active session on this handle")

    # --- emission ------------------------------------------------------------

    def _emit(self, features: np.ndarray, label: ActionLabel, tick: int):
        self.snapshots.append(Snapshot(features, label, tick))
        self.t0 = tick
        self.t0_features = self._features()

    def maybe_emit_noop(self, tick: int):
        """Gap check: emits NoOp{t_diff} when the time since the last emission
        exceeds delta_t.  delta_t = inf disables no-op synthesis entirely."""
        if math.isinf(self.config.delta_t):
            return
        t_diff = tick - self.t0
        if t_diff > self.config.delta_t:
            feats = self.t0_features
            self._emit(feats, ActionLabel("noop", duration=max(1, t_diff)), tick)

    def _tick_noop_check(self):
        # cap check: a long idle stretch yields NoOp{w_max} with no action
        if math.isinf(self.config.delta_t):
            return
        if self.tick - self.t0 >= self.config.w_max:
            feats = self.t0_features
            self._emit(feats, ActionLabel("noop", duration=self.config.w_max), self.tick)

    # --- input events ----------------------------------------------------------

    def on_key(self, key: str, down: bool, tick: int) -> Snapshot | None:
        self._check()
        kind = "key_down" if down else "key_up"
        self.events.append({"kind": kind, "key": key, "tick": tick})
        if key not in self.program.key_names:
            return None
        self._pending.append(InputEvent(kind, key=key))
        if down:
            self._key_down[key] = (tick, self._features())
            return None
        if key not in self._key_down:
            warnings.warn(f"key_up for {key!r} without a prior key_down; ignored")
            return None
        t_down, feats = self._key_down.pop(key)
        self.maybe_emit_noop(tick)
        label = ActionLabel("key_press", key=key, duration=max(1, tick - t_down))
        self._emit(feats, label, tick)
        return self.snapshots[-1]

    def on_mouse_move(self, x: float, y: float, tick: int):
        self._check()
        self.events.append({"kind": "mouse_move", "x": x, "y": y, "tick": tick})
        if not self._moving:
            self._moving = True
            self._move_start = tick
            self._move_features = self._features()
        self._last_move_tick = tick
        self._last_pos = (x, y)
        self._pending.append(InputEvent("mouse_move", x=x, y=y))

    def on_mouse_click(self, x: float, y: float, tick: int) -> Snapshot:
        self._check()
        self.events.append({"kind": "mouse_click", "x": x, "y": y, "tick": tick})
        feats = self._features()
        self._pending.append(InputEvent("mouse_click", x=x, y=y))
        self.maybe_emit_noop(tick)
        self._emit(feats, ActionLabel("mouse_click", x=x, y=y), tick)
        return self.snapshots[-1]

    # --- time ----------------------------------------------------------------

    def advance(self, ticks: int = 1):
        """Step the engine, then run the per-tick checks (mouse stationary
        window, no-op cap)."""
        self._check()
        for _ in range(ticks):
            if self.instance.game_over:
                break
            self.instance.step(self._pending)
            self._pending.clear()
            if self.instance.game_over:
                break
            if self._moving and self.tick - self._last_move_tick >= self.config.stationary_steps:
                self.maybe_emit_noop(self.tick)
                label = ActionLabel("mouse_move", x=self._last_pos[0], y=self._last_pos[1])
                self._emit(self._move_features, label, self.tick)
                self._moving = False
                self._move_features = None
            self._tick_noop_check()

    # --- session end -----------------------------------------------------------

    def end_session(self, reason: str | None = None) -> RecordingSession:
        self._check()
        self.active = False
        if reason is None:
            reason = "game_over" if self.instance.game_over else "player_stop"
        return RecordingSession(
            snapshots=self.snapshots,
            seed=self.seed,
            covered=self.instance.covered_ids(),
            duration_ticks=self.tick,
            end_reason=reason,
            events=self.events,
        )


def replay_events(game: str | GameSpec | GameProgram, seed: int, events: list[dict],
                  duration_ticks: int, config: RecorderConfig | None = None,
                  end_reason: str | None = None) -> RecordingSession:
    """Feed a raw event log back through a fresh recorder.  With the original
    config this reproduces the session's snapshots bit for bit; with a
    different delta_t it re-derives the no-op labels."""
    h = RecorderHandle(game, seed, config)
    i = 0
    while h.tick < duration_ticks and not h.game_over:
        while i < len(events) and events[i]["tick"] == h.tick:
            e = events[i]
            if e["kind"] in ("key_down", "key_up"):
                h.on_key(e["key"], e["kind"] == "key_down", e["tick"])
            elif e["kind"] == "mouse_move":
                h.on_mouse_move(e["x"], e["y"], e["tick"])
            elif e["kind"] == "mouse_click":
                h.on_mouse_click(e["x"], e["y"], e["tick"])
            else:
                raise ValueError(f"unknown event kind {e['kind']!r} in log")
            i += 1
        h.advance()
    return h.end_session(end_reason)


def rederive(dataset: TrainingDataset, config: RecorderConfig) -> TrainingDataset:
    """Rebuild every session from its raw event log under a new recorder
    config (Table-2 style delta_t sweeps without re-recording)."""
    sessions = [
        replay_events(dataset.game_id, s.seed, s.events, s.duration_ticks,
                      config, end_reason=s.end_reason)
        for s in dataset.sessions
    ]
    return TrainingDataset(game_id=dataset.game_id, sessions=sessions, config=config,
                           feature_names=dataset.feature_names)
