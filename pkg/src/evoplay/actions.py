"""Action vocabulary shared by the recorder, the networks and the search.

A game's ActionSchema lists the discrete actions a player (or network) can
take, derived from the game's input handlers: one MouseMove/MouseClick if
the game reads the mouse, one KeyPress per handled key, and always a NoOp.
Each action carries bounded parameters (coordinates or a tick duration)
that are normalised to [-1, 1] for network heads with the same linear map
features use.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .engine.ast import X_MAX, X_MIN, Y_MAX, Y_MIN
from .engine.compile import GameProgram
from .engine.instance import InputEvent

D_MAX_DEFAULT = 30  # key press duration cap, ticks
W_MAX_DEFAULT = 60  # waiting duration cap, ticks

LABEL_KINDS = ("key_press", "mouse_move", "mouse_click", "noop")


@dataclass(frozen=True)
class ActionLabel:
    """What the player did: the training label of one snapshot."""

    kind: str
    key: str = ""
    x: float = 0.0
    y: float = 0.0
    duration: int = 0

    def __post_init__(self):
        if self.kind not in LABEL_KINDS:
            raise ValueError(f"unknown action label kind {self.kind!r}")
        if self.kind in ("key_press", "noop") and self.duration < 1:
            raise ValueError("durations must be >= 1 tick")
        if self.kind in ("mouse_move", "mouse_click"):
            if not (X_MIN <= self.x <= X_MAX and Y_MIN <= self.y <= Y_MAX):
                raise ValueError(f"({self.x}, {self.y}) is outside the canvas")

    def to_dict(self) -> dict:
        d: dict = {"kind": self.kind}
        if self.kind == "key_press":
            d["key"] = self.key
            d["duration"] = self.duration
        elif self.kind == "noop":
            d["duration"] = self.duration
        else:
            d["x"] = self.x
            d["y"] = self.y
        return d

    @staticmethod
    def from_dict(d: dict) -> "ActionLabel":
        return ActionLabel(
            kind=d["kind"], key=d.get("key", ""), x=float(d.get("x", 0.0)),
            y=float(d.get("y", 0.0)), duration=int(d.get("duration", 0)),
        )


@dataclass(frozen=True)
class ActionSpec:
    kind: str  # mouse_move | mouse_click | key_press | noop
    key: str = ""

    @property
    def name(self) -> str:
        return f"key_press({self.key})" if self.kind == "key_press" else self.kind


class ActionSchema:
    """Ordered action set with parameter bounds and head layout.

    Order is fixed: mouse_move, mouse_click (when handled), key presses in
    the game's key order, then noop.  Regression heads are laid out action
    by action in this order.
    """

    def __init__(self, actions: tuple[ActionSpec, ...], d_max: int = D_MAX_DEFAULT,
                 w_max: int = W_MAX_DEFAULT):
        if d_max < 1 or w_max < 1:
            raise ValueError("duration caps must be >= 1")
        self.actions = tuple(actions)
        self.d_max = d_max
        self.w_max = w_max
        self._bounds: list[tuple[tuple[float, float], ...]] = []
        for a in self.actions:
            if a.kind in ("mouse_move", "mouse_click"):
                self._bounds.append(((X_MIN, X_MAX), (Y_MIN, Y_MAX)))
            elif a.kind == "key_press":
                self._bounds.append(((1.0, float(d_max)),))
            elif a.kind == "noop":
                self._bounds.append(((1.0, float(w_max)),))
            else:
                raise ValueError(f"unknown action kind {a.kind!r}")
        self._reg_off = np.zeros(len(self.actions) + 1, np.int32)
        for i, b in enumerate(self._bounds):
            self._reg_off[i + 1] = self._reg_off[i] + len(b)

    @property
    def n_actions(self) -> int:
        return len(self.actions)

    @property
    def n_reg(self) -> int:
        return int(self._reg_off[-1])

    def param_bounds(self, action: int) -> tuple[tuple[float, float], ...]:
        return self._bounds[action]

    def reg_offset(self, action: int) -> int:
        return int(self._reg_off[action])

    def reg_mask(self, action: int) -> np.ndarray:
        """1.0 on the labelled action's own regression heads, 0 elsewhere."""
        m = np.zeros(self.n_reg, np.float64)
        m[self.reg_offset(action):self.reg_offset(action) + len(self._bounds[action])] = 1.0
        return m

    def label_index(self, label: ActionLabel) -> int:
        for i, a in enumerate(self.actions):
            if a.kind == "noop" and label.kind == "noop":
                return i
            if a.kind == label.kind and a.key == label.key:
                return i
        raise ValueError(f"label {label!r} has no action in this schema")

    def normalized_params(self, label: ActionLabel) -> np.ndarray:
        """Full regression-target row: label params normalised to [-1, 1],
        zeros on heads the loss masks out anyway."""
        row = np.zeros(self.n_reg, np.float64)
        i = self.label_index(label)
        off = self.reg_offset(i)
        raw = ((label.x, label.y) if label.kind in ("mouse_move", "mouse_click")
               else (float(label.duration),))
        for j, ((lo, hi), v) in enumerate(zip(self._bounds[i], raw)):
            row[off + j] = 2.0 * (v - lo) / (hi - lo) - 1.0
        return row

    def to_dict(self) -> dict:
        return {
            "actions": [{"kind": a.kind, "key": a.key} for a in self.actions],
            "d_max": self.d_max,
            "w_max": self.w_max,
        }

    @staticmethod
    def from_dict(d: dict) -> "ActionSchema":
        return ActionSchema(
            tuple(ActionSpec(a["kind"], a.get("key", "")) for a in d["actions"]),
            d_max=int(d["d_max"]), w_max=int(d["w_max"]),
        )


def action_schema(program: GameProgram, d_max: int = D_MAX_DEFAULT,
                  w_max: int = W_MAX_DEFAULT) -> ActionSchema:
    actions: list[ActionSpec] = []
    if "mouse_move" in program.input_handlers:
        actions.append(ActionSpec("mouse_move"))
    if "click" in program.input_handlers:
        actions.append(ActionSpec("mouse_click"))
    for k in program.key_names:
        if f"key:{k}" in program.input_handlers:
            actions.append(ActionSpec("key_press", key=k))
    actions.append(ActionSpec("noop"))
    return ActionSchema(tuple(actions), d_max=d_max, w_max=w_max)


def label_to_event(label: ActionLabel) -> InputEvent:
    """The engine-facing event a label corresponds to (KeyPress keeps its
    duration; the executor holds the key that long)."""
    if label.kind == "key_press":
        return InputEvent("key_down", key=label.key, duration=label.duration)
    if label.kind == "noop":
        return InputEvent("noop", duration=label.duration)
    return InputEvent(label.kind, x=label.x, y=label.y)
