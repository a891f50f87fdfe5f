"""Running compiled games: input events, stepping, coverage queries.

A GameInstance owns the mutable episode state (state vector, coverage bits,
best-so-far branch distances, RNG).  Resetting with a seed replays the same
episode bit-for-bit given the same inputs, which the test-suite replay and
the robustness checks rely on.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels as K
from .ast import GameSpec, X_MAX, X_MIN, Y_MAX, Y_MIN
from .compile import ControlDependenceGraph, GameProgram, compile_game

EVENT_KINDS = ("key_down", "key_up", "mouse_move", "mouse_click", "noop")


@dataclass(frozen=True)
class InputEvent:
    """One input delivered at the start of a tick.

    `tick` is a log timestamp (-1 when the event is applied immediately).
    A "noop" event is a marker meaning no input for `duration` ticks; the
    engine ignores it, recorders and replays give it meaning.
    """

    kind: str
    key: str = ""
    x: float = 0.0
    y: float = 0.0
    duration: int = 0
    tick: int = -1

    def to_dict(self) -> dict:
        d: dict = {"kind": self.kind}
        if self.tick >= 0:
            d["tick"] = self.tick
        if self.kind in ("key_down", "key_up"):
            d["key"] = self.key
        elif self.kind == "noop":
            d["duration"] = self.duration
        else:
            d["x"] = self.x
            d["y"] = self.y
        return d

    @staticmethod
    def from_dict(d: dict) -> "InputEvent":
        if d["kind"] not in EVENT_KINDS:
            raise ValueError(f"unknown input event kind {d['kind']!r}")
        return InputEvent(
            kind=d["kind"],
            key=d.get("key", ""),
            x=float(d.get("x", 0.0)),
            y=float(d.get("y", 0.0)),
            duration=int(d.get("duration", 0)),
            tick=int(d.get("tick", -1)),
        )


@dataclass
class SpriteState:
    name: str
    x: float
    y: float
    heading: float
    size: float
    costume: int
    visible: bool
    variables: dict[str, float] = field(default_factory=dict)


@dataclass
class GameState:
    """Read-only snapshot of an instance, for rendering and features."""

    sprites: dict[str, SpriteState]
    variables: dict[str, float]
    mouse_x: float
    mouse_y: float
    tick: int
    game_over: bool
    rng_state: int = 0


class GameInstance:
    def __init__(self, program: GameProgram, seed: int = 0):
        self.program = program
        self.seed = seed
        self.state = np.zeros(program.n_state, np.float64)
        self.coverage = np.zeros(program.n_ids, np.uint8)
        self.branch_best = np.zeros(program.n_slots, np.float64)
        self._rng = np.zeros(1, np.int64)
        self.reset(seed)

    def reset(self, seed: int | None = None):
        """Restart the episode; same seed reproduces the same randomisation."""
        p = self.program
        if seed is not None:
            self.seed = seed
        s = self.seed & 0xFFFFFFFF
        self._rng[0] = s if s != 0 else 0x9E3779B9  # xorshift32 state must be nonzero
        self.state[:] = p.base_state
        K.run_init(p.ex_op, p.ex_i, p.ex_j, p.ex_f, p.in_tgt, p.in_attr, p.in_expr,
                   p.in_elen, p.costume_counts, self.state, self._rng)
        self.coverage[:] = 0
        for hid in p.hat_ids:  # triggers count as covered from load
            self.coverage[hid] = 1
        self.branch_best[:] = np.inf
        self.tick = 0
        self.game_over = False
        return self

    # --- inputs ------------------------------------------------------------

    def apply_event(self, ev: InputEvent):
        p = self.program
        if ev.kind in ("key_down", "key_up"):
            # keys the game never reads are ignored
            if ev.key in p.key_names:
                self.state[p.key_slot(ev.key)] = 1.0 if ev.kind == "key_down" else 0.0
        elif ev.kind in ("mouse_move", "mouse_click"):
            if not (X_MIN <= ev.x <= X_MAX and Y_MIN <= ev.y <= Y_MAX):
                raise ValueError(f"{ev.kind} at ({ev.x}, {ev.y}) is outside the canvas")
            self.state[p.mouse_off] = ev.x
            self.state[p.mouse_off + 1] = ev.y
            flag = p.moved_off if ev.kind == "mouse_move" else p.click_off
            self.state[flag] = 1.0
        elif ev.kind != "noop":
            raise ValueError(f"unknown input event kind {ev.kind!r}")

    # --- stepping ------------------------------------------------------------

    def step(self, events: tuple[InputEvent, ...] | list[InputEvent] = ()) -> GameState:
        """Deliver events, then advance one tick.  No-op after game over."""
        if not self.game_over:
            for ev in events:
                self.apply_event(ev)
            self.run_ticks(1)
        return self.game_state()

    def run_ticks(self, n: int, target_id: int = -1) -> tuple[int, int, int]:
        """Advance up to n ticks without new inputs (held keys stay held).

        Stops early if the target statement gets covered or the game ends.
        Returns (covered_tick, over_tick, ticks_done); tick values are
        absolute, -1 when the event did not happen.
        """
        if self.game_over or n <= 0:
            return -1, -1, 0
        covered_tick, over_tick, done = K.vm_run(
            *self.program.kernel_args,
            self.state, self.coverage, self.branch_best, self._rng,
            self.tick, n, target_id,
        )
        self.tick += int(done)
        if over_tick >= 0:
            self.game_over = True
        return int(covered_tick), int(over_tick), int(done)

    # --- queries -------------------------------------------------------------

    def covered_ids(self) -> frozenset[int]:
        return frozenset(int(i) for i in np.nonzero(self.coverage)[0])

    @property
    def won(self) -> bool:
        return any(self.coverage[i] for i in self.program.winning_ids)

    def game_state(self) -> GameState:
        p = self.program
        st = self.state
        sprites = {}
        for i, name in enumerate(p.sprite_names):
            b = i * 6
            sprites[name] = SpriteState(
                name=name,
                x=float(st[b + K.A_X]),
                y=float(st[b + K.A_Y]),
                heading=float(st[b + K.A_HEADING]),
                size=float(st[b + K.A_SIZE]),
                costume=int(st[b + K.A_COSTUME]),
                visible=bool(st[b + K.A_VISIBLE]),
                variables={v: float(st[p.svar_slot(sn, v)]) for sn, v in p.svar_names if sn == name},
            )
        return GameState(
            sprites=sprites,
            variables={n: float(st[p.var_slot(n)]) for n in p.global_names},
            mouse_x=float(st[p.mouse_off]),
            mouse_y=float(st[p.mouse_off + 1]),
            tick=self.tick,
            game_over=self.game_over,
            rng_state=int(self._rng[0]),
        )

    def canonical_bytes(self) -> bytes:
        """Canonical episode encoding for determinism hashing.

        Field order: tick (int64 LE), game_over (1 byte), rng state
        (int64 LE), full state vector (float64 LE), coverage bits (uint8).
        """
        head = np.array([self.tick, self._rng[0]], np.int64)
        return (head.tobytes() + bytes([1 if self.game_over else 0])
                + self.state.tobytes() + self.coverage.tobytes())


_BUILTIN_PROGRAMS: dict[str, GameProgram] = {}


def load_game(game: str | GameSpec | GameProgram, seed: int = 0) -> GameInstance:
    """Create a fresh instance of a builtin id, a GameSpec, or a compiled
    program.  Builtin programs are compiled once and shared."""
    if isinstance(game, GameProgram):
        return GameInstance(game, seed)
    if isinstance(game, str):
        if game not in _BUILTIN_PROGRAMS:
            from .builtins import builtin_game

            _BUILTIN_PROGRAMS[game] = compile_game(builtin_game(game))
        return GameInstance(_BUILTIN_PROGRAMS[game], seed)
    return GameInstance(compile_game(game), seed)


def step(instance: GameInstance, events=()):
    instance.step(events)


def covered(instance: GameInstance) -> frozenset[int]:
    return instance.covered_ids()


def is_game_over(instance: GameInstance) -> bool:
    return instance.game_over


def cdg(game: GameSpec | GameProgram | GameInstance) -> ControlDependenceGraph:
    if isinstance(game, GameInstance):
        return game.program.cdg
    if isinstance(game, GameProgram):
        return game.cdg
    return compile_game(game).cdg


def approach_level(instance: GameInstance, target: int, covered_ids=None) -> int:
    """Count of uncovered statements on the dependence path to the target,
    the target included.  0 when the target itself is covered."""
    cov = instance.covered_ids() if covered_ids is None else covered_ids
    return instance.program.cdg.approach_level(cov, target)


def branch_distance(instance: GameInstance, target: int, covered_ids=None) -> float:
    """Normalised best branch distance at the critical conditional, in [0,1].

    The critical conditional guards the shallowest uncovered statement on
    the target's dependence path.  If its predicate was never evaluated in
    this episode the distance is unknown and counts as the maximum, 1.0.
    """
    cov = instance.covered_ids() if covered_ids is None else covered_ids
    if target in cov:
        return 0.0
    node = instance.program.cdg.first_uncovered(cov, target)
    slot = int(instance.program.edge_slot[node])
    if slot < 0:
        return 1.0
    d = float(instance.branch_best[slot])
    if not np.isfinite(d):
        return 1.0
    return d / (d + 1.0)
