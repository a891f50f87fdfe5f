"""Normalised feature vectors networks consume as inputs.

The schema is derived once per game and its order is frozen: per sprite
(spec order) position, optional heading and costume, size, then private
variables; then one distance feature per touch-listener pair; then global
variables; finally the mouse position when the game reads the mouse.
Every value is linearly normalised from its declared bounds into [-1, 1]
and clamped.  Invisible sprites contribute zeros for all their features.
"""

from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

from .engine.ast import GameSpec
from .engine.compile import GameProgram, compile_game
from .engine.instance import GameState

# kinds for the vector fast path
_SLOT = 0
_DIST_SPRITE = 1
_DIST_COLOR = 2
_MOUSE = 3

GRID_W, GRID_H = 48, 36  # coarse occupancy grid for colour distances
CELL = 10.0
MAX_DIST = 600.0


@dataclass(frozen=True)
class FeatureDescriptor:
    """One schema entry.

    attribute: pos_x | pos_y | heading | costume | size | variable |
    distance_sprite | distance_color | mouse_x | mouse_y.
    source is the owning sprite name ("" for globals and mouse); name is
    the variable name, target sprite, or colour, depending on attribute.
    """

    source: str
    attribute: str
    lo: float
    hi: float
    name: str = ""

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"feature bounds need lo < hi, got ({self.lo}, {self.hi})")

    @property
    def feature_name(self) -> str:
        if self.attribute == "variable":
            return f"{self.source}.{self.name}" if self.source else self.name
        if self.attribute in ("distance_sprite", "distance_color"):
            return f"{self.source}.dist({self.name})"
        if self.attribute in ("mouse_x", "mouse_y"):
            return self.attribute
        return f"{self.source}.{self.attribute}"


class FeatureSchema:
    def __init__(self, game_id: str, entries: tuple[FeatureDescriptor, ...],
                 program: GameProgram | None = None):
        self.game_id = game_id
        self.entries = tuple(entries)
        self.names = [d.feature_name for d in self.entries]
        self._program = program
        if program is not None:
            self._build_fast_path(program)

    def __len__(self) -> int:
        return len(self.entries)

    def _build_fast_path(self, p: GameProgram):
        n = len(self.entries)
        self._kind = np.zeros(n, np.int32)
        self._a = np.zeros(n, np.int32)  # state slot, or sprite index for distances
        self._b = np.zeros(n, np.int32)  # target sprite index / colour key
        self._vis_a = np.full(n, -1, np.int32)
        self._vis_b = np.full(n, -1, np.int32)
        self._lo = np.array([d.lo for d in self.entries], np.float64)
        self._hi = np.array([d.hi for d in self.entries], np.float64)
        self._colors: list[str] = []
        attr_of = {"pos_x": "x", "pos_y": "y", "heading": "heading",
                   "costume": "costume", "size": "size"}
        for i, d in enumerate(self.entries):
            if d.attribute in attr_of:
                si = p.sprite_index(d.source)
                self._kind[i] = _SLOT
                self._a[i] = p.attr_slot(d.source, attr_of[d.attribute])
                self._vis_a[i] = si * 6 + 5
            elif d.attribute == "variable":
                self._kind[i] = _SLOT
                if d.source:
                    self._a[i] = p.svar_slot(d.source, d.name)
                    self._vis_a[i] = p.sprite_index(d.source) * 6 + 5
                else:
                    self._a[i] = p.var_slot(d.name)
            elif d.attribute == "distance_sprite":
                self._kind[i] = _DIST_SPRITE
                self._a[i] = p.sprite_index(d.source)
                self._b[i] = p.sprite_index(d.name)
                self._vis_a[i] = self._a[i] * 6 + 5
                self._vis_b[i] = self._b[i] * 6 + 5
            elif d.attribute == "distance_color":
                self._kind[i] = _DIST_COLOR
                self._a[i] = p.sprite_index(d.source)
                self._b[i] = len(self._colors)
                self._colors.append(d.name)
                self._vis_a[i] = self._a[i] * 6 + 5
            elif d.attribute in ("mouse_x", "mouse_y"):
                self._kind[i] = _SLOT
                self._a[i] = p.mouse_off + (0 if d.attribute == "mouse_x" else 1)
            else:
                raise ValueError(f"unknown feature attribute {d.attribute!r}")

    # --- extraction ---------------------------------------------------------

    def extract_vector(self, state: np.ndarray) -> np.ndarray:
        """Fast path straight from an instance's state vector."""
        p = self._program
        if p is None:
            raise ValueError("schema was built without a compiled program")
        n = len(self.entries)
        out = np.empty(n, np.float64)
        for i in range(n):
            va = self._vis_a[i]
            if va >= 0 and state[va] == 0.0:
                out[i] = 0.0
                continue
            vb = self._vis_b[i]
            if vb >= 0 and state[vb] == 0.0:
                out[i] = 0.0
                continue
            k = self._kind[i]
            if k == _SLOT:
                v = state[self._a[i]]
            elif k == _DIST_SPRITE:
                a, b = self._a[i] * 6, self._b[i] * 6
                v = math.hypot(state[a] - state[b], state[a + 1] - state[b + 1])
            else:
                v = self._color_distance_vec(state, self._a[i], self._colors[self._b[i]])
            out[i] = _norm(v, self._lo[i], self._hi[i])
        return out

    def _color_distance_vec(self, state: np.ndarray, si: int, color: str) -> float:
        p = self._program
        sx, sy = state[si * 6], state[si * 6 + 1]
        cells = []
        for j, name in enumerate(p.sprite_names):
            if j == si or p.spec.sprites[j].color != color or state[j * 6 + 5] == 0.0:
                continue
            r = p.radii[j] * state[j * 6 + 3] / 100.0
            cells.append((state[j * 6], state[j * 6 + 1], r))
        return _nearest_occupied(sx, sy, cells)


def _norm(v: float, lo: float, hi: float) -> float:
    x = 2.0 * (v - lo) / (hi - lo) - 1.0
    return -1.0 if x < -1.0 else (1.0 if x > 1.0 else x)


def _nearest_occupied(sx: float, sy: float, cells: list[tuple[float, float, float]]) -> float:
    """Distance to the nearest occupied cell centre of a 48x36 grid, where a
    cell is occupied when its centre falls inside a listed circle."""
    best = MAX_DIST
    for gx in range(GRID_W):
        cx = -240.0 + CELL / 2 + gx * CELL
        for gy in range(GRID_H):
            cy = -180.0 + CELL / 2 + gy * CELL
            for (ox, oy, orad) in cells:
                if (cx - ox) ** 2 + (cy - oy) ** 2 <= orad * orad:
                    d = math.hypot(cx - sx, cy - sy)
                    if d < best:
                        best = d
                    break
    return best


def feature_schema(game: GameSpec | GameProgram) -> FeatureSchema:
    """Derive the frozen feature schema for a game.

    Inclusion rules: position and size always; heading only for all-around
    rotation; costume only when some script changes that sprite's costume
    (and there is more than one); sprite variables and globals with their
    declared ranges; one distance per touch-listener pair; mouse position
    only when the game reads the mouse.
    """
    p = game if isinstance(game, GameProgram) else compile_game(game)
    spec = p.spec
    entries: list[FeatureDescriptor] = []
    for sp in spec.sprites:
        entries.append(FeatureDescriptor(sp.name, "pos_x", -240.0, 240.0))
        entries.append(FeatureDescriptor(sp.name, "pos_y", -180.0, 180.0))
        if sp.rotation_style == "all_around":
            entries.append(FeatureDescriptor(sp.name, "heading", -180.0, 180.0))
        entries.append(FeatureDescriptor(sp.name, "size", 0.0, 200.0))
        if sp.name in p.costume_writers and sp.costume_count > 1:
            entries.append(FeatureDescriptor(sp.name, "costume", 0.0, float(sp.costume_count - 1)))
        for var in sp.variables:
            lo, hi = p.var_ranges[f"{sp.name}.{var}"]
            entries.append(FeatureDescriptor(sp.name, "variable", lo, hi, name=var))
    for (a, b) in p.touch_pairs:
        entries.append(FeatureDescriptor(a, "distance_sprite", -MAX_DIST, MAX_DIST, name=b))
    for var in spec.global_variables:
        lo, hi = p.var_ranges[var]
        entries.append(FeatureDescriptor("", "variable", lo, hi, name=var))
    if p.uses_mouse:
        entries.append(FeatureDescriptor("", "mouse_x", -240.0, 240.0))
        entries.append(FeatureDescriptor("", "mouse_y", -180.0, 180.0))
    return FeatureSchema(spec.id, tuple(entries), program=p)


def extract(state: GameState, schema: FeatureSchema) -> np.ndarray:
    """Pure extraction from a GameState snapshot.  Matches extract_vector
    bit for bit; exists so recorded snapshots need no live instance."""
    out = np.empty(len(schema), np.float64)
    for i, d in enumerate(schema.entries):
        v: float
        visible = True
        if d.attribute in ("pos_x", "pos_y", "heading", "costume", "size"):
            sp = state.sprites[d.source]
            visible = sp.visible
            v = {"pos_x": sp.x, "pos_y": sp.y, "heading": sp.heading,
                 "costume": float(sp.costume), "size": sp.size}[d.attribute]
        elif d.attribute == "variable":
            if d.source:
                sp = state.sprites[d.source]
                visible = sp.visible
                v = sp.variables[d.name]
            else:
                v = state.variables[d.name]
        elif d.attribute == "distance_sprite":
            a, b = state.sprites[d.source], state.sprites[d.name]
            visible = a.visible and b.visible
            v = math.hypot(a.x - b.x, a.y - b.y)
        elif d.attribute == "distance_color":
            a = state.sprites[d.source]
            visible = a.visible
            p = schema._program
            cells = []
            for name, sp in state.sprites.items():
                if name == d.source or not sp.visible:
                    continue
                if p is not None and p.spec.sprite(name).color == d.name:
                    r = p.spec.sprite(name).radius * sp.size / 100.0
                    cells.append((sp.x, sp.y, r))
            v = _nearest_occupied(a.x, a.y, cells)
        elif d.attribute == "mouse_x":
            v = state.mouse_x
        elif d.attribute == "mouse_y":
            v = state.mouse_y
        else:
            raise ValueError(f"unknown feature attribute {d.attribute!r}")
        out[i] = _norm(v, d.lo, d.hi) if visible else 0.0
    return out
