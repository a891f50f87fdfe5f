"""Game scripts as data: expressions, predicates, statements, sprites.

A game is a set of sprites plus a list of scripts.  Each script has a
trigger (every tick, first tick, key held, mouse moved, mouse clicked) and a
body of statements; `If` statements nest.  Every statement carries an integer
id used for coverage instrumentation and the control dependence graph.

Everything here is plain data with a lossless dict round-trip, so specs can
be embedded in Python or loaded from JSON files with the same schema.
"""

from __future__ import annotations

from dataclasses import dataclass, field

CANVAS_WIDTH = 480
CANVAS_HEIGHT = 360
X_MIN, X_MAX = -240.0, 240.0
Y_MIN, Y_MAX = -180.0, 180.0

SPRITE_ATTRS = ("x", "y", "heading", "size", "costume", "visible")

CMP_OPS = ("lt", "le", "gt", "ge", "eq", "ne")
BIN_OPS = ("add", "sub", "mul", "div", "min", "max")
UN_OPS = ("neg", "abs")

TRIGGERS = ("on_start", "on_tick", "on_key", "on_mouse_move", "on_click")


class ValidationError(ValueError):
    """A game spec violates a structural invariant; names the offending field."""


# --- expressions -----------------------------------------------------------


@dataclass(frozen=True)
class Expr:
    """One node of an arithmetic expression over the game state.

    kind: const | attr | var | svar | mouse_x | mouse_y | dist | rand | bin | un
    """

    kind: str
    value: float = 0.0
    op: str = ""
    sprite: str = ""
    name: str = ""
    args: tuple["Expr", ...] = ()

    def to_dict(self) -> dict:
        d: dict = {"kind": self.kind}
        if self.kind == "const":
            d["value"] = self.value
        elif self.kind == "attr":
            d["sprite"], d["name"] = self.sprite, self.name
        elif self.kind == "var":
            d["name"] = self.name
        elif self.kind == "svar":
            d["sprite"], d["name"] = self.sprite, self.name
        elif self.kind == "dist":
            d["sprite"], d["name"] = self.sprite, self.name
        elif self.kind in ("bin", "un"):
            d["op"] = self.op
            d["args"] = [a.to_dict() for a in self.args]
        elif self.kind == "rand":
            d["args"] = [a.to_dict() for a in self.args]
        return d

    @staticmethod
    def from_dict(d: dict) -> "Expr":
        kind = d["kind"]
        if kind == "const":
            return Expr("const", value=float(d["value"]))
        if kind == "attr":
            return Expr("attr", sprite=d["sprite"], name=d["name"])
        if kind == "var":
            return Expr("var", name=d["name"])
        if kind == "svar":
            return Expr("svar", sprite=d["sprite"], name=d["name"])
        if kind in ("mouse_x", "mouse_y"):
            return Expr(kind)
        if kind == "dist":
            return Expr("dist", sprite=d["sprite"], name=d["name"])
        if kind == "rand":
            return Expr("rand", args=tuple(Expr.from_dict(a) for a in d["args"]))
        if kind in ("bin", "un"):
            return Expr(kind, op=d["op"], args=tuple(Expr.from_dict(a) for a in d["args"]))
        raise ValidationError(f"unknown expression kind {kind!r}")


# --- predicates ------------------------------------------------------------


@dataclass(frozen=True)
class Predicate:
    """Branch condition: a comparison, a key poll, or sprite contact.

    kind: cmp | key_pressed | touching
    """

    kind: str
    op: str = ""
    lhs: Expr | None = None
    rhs: Expr | None = None
    key: str = ""
    a: str = ""
    b: str = ""

    def to_dict(self) -> dict:
        if self.kind == "cmp":
            return {
                "kind": "cmp",
                "op": self.op,
                "lhs": self.lhs.to_dict(),
                "rhs": self.rhs.to_dict(),
            }
        if self.kind == "key_pressed":
            return {"kind": "key_pressed", "key": self.key}
        return {"kind": "touching", "a": self.a, "b": self.b}

    @staticmethod
    def from_dict(d: dict) -> "Predicate":
        kind = d["kind"]
        if kind == "cmp":
            return Predicate(
                "cmp", op=d["op"], lhs=Expr.from_dict(d["lhs"]), rhs=Expr.from_dict(d["rhs"])
            )
        if kind == "key_pressed":
            return Predicate("key_pressed", key=d["key"])
        if kind == "touching":
            return Predicate("touching", a=d["a"], b=d["b"])
        raise ValidationError(f"unknown predicate kind {kind!r}")


# --- statements ------------------------------------------------------------


@dataclass
class Stmt:
    """One instrumented statement.

    kind: set_attr | change_attr | set_var | change_var | set_svar |
    change_svar | move_steps | point_towards | bounce | if | game_over
    """

    kind: str
    id: int | None = None
    label: str = ""
    sprite: str = ""
    name: str = ""
    target: str = ""
    value: Expr | None = None
    pred: Predicate | None = None
    then: list["Stmt"] = field(default_factory=list)
    orelse: list["Stmt"] = field(default_factory=list)
    edges: str = "lrtb"  # bounce edge mask

    def to_dict(self) -> dict:
        d: dict = {"kind": self.kind}
        if self.id is not None:
            d["id"] = self.id
        if self.label:
            d["label"] = self.label
        if self.kind in ("set_attr", "change_attr"):
            d["sprite"], d["name"], d["value"] = self.sprite, self.name, self.value.to_dict()
        elif self.kind in ("set_var", "change_var"):
            d["name"], d["value"] = self.name, self.value.to_dict()
        elif self.kind in ("set_svar", "change_svar"):
            d["sprite"], d["name"], d["value"] = self.sprite, self.name, self.value.to_dict()
        elif self.kind == "move_steps":
            d["sprite"], d["value"] = self.sprite, self.value.to_dict()
        elif self.kind == "point_towards":
            d["sprite"], d["target"] = self.sprite, self.target
        elif self.kind == "bounce":
            d["sprite"], d["edges"] = self.sprite, self.edges
        elif self.kind == "if":
            d["pred"] = self.pred.to_dict()
            d["then"] = [s.to_dict() for s in self.then]
            if self.orelse:
                d["orelse"] = [s.to_dict() for s in self.orelse]
        elif self.kind == "game_over":
            pass
        else:
            raise ValidationError(f"unknown statement kind {self.kind!r}")
        return d

    @staticmethod
    def from_dict(d: dict) -> "Stmt":
        kind = d["kind"]
        s = Stmt(kind, id=d.get("id"), label=d.get("label", ""))
        if kind in ("set_attr", "change_attr", "set_svar", "change_svar"):
            s.sprite, s.name, s.value = d["sprite"], d["name"], Expr.from_dict(d["value"])
        elif kind in ("set_var", "change_var"):
            s.name, s.value = d["name"], Expr.from_dict(d["value"])
        elif kind == "move_steps":
            s.sprite, s.value = d["sprite"], Expr.from_dict(d["value"])
        elif kind == "point_towards":
            s.sprite, s.target = d["sprite"], d["target"]
        elif kind == "bounce":
            s.sprite, s.edges = d["sprite"], d.get("edges", "lrtb")
        elif kind == "if":
            s.pred = Predicate.from_dict(d["pred"])
            s.then = [Stmt.from_dict(x) for x in d["then"]]
            s.orelse = [Stmt.from_dict(x) for x in d.get("orelse", [])]
        elif kind != "game_over":
            raise ValidationError(f"unknown statement kind {kind!r}")
        return s


@dataclass
class Script:
    """A trigger plus a statement body.  The trigger itself is a statement
    (the script's entry) and owns an id like any other statement."""

    trigger: str
    body: list[Stmt]
    key: str = ""
    name: str = ""
    id: int | None = None

    def to_dict(self) -> dict:
        d: dict = {"trigger": self.trigger, "body": [s.to_dict() for s in self.body]}
        if self.key:
            d["key"] = self.key
        if self.name:
            d["name"] = self.name
        if self.id is not None:
            d["id"] = self.id
        return d

    @staticmethod
    def from_dict(d: dict) -> "Script":
        return Script(
            trigger=d["trigger"],
            body=[Stmt.from_dict(x) for x in d["body"]],
            key=d.get("key", ""),
            name=d.get("name", ""),
            id=d.get("id"),
        )


@dataclass
class SpriteSpec:
    name: str
    x: float = 0.0
    y: float = 0.0
    heading: float = 90.0
    size: float = 100.0
    costume: int = 0
    costume_count: int = 1
    visible: bool = True
    radius: float = 15.0
    rotation_style: str = "fixed"  # "all_around" exposes heading as a feature
    color: str = ""
    variables: dict[str, float] = field(default_factory=dict)
    var_ranges: dict[str, tuple[float, float]] = field(default_factory=dict)
    init: dict[str, Expr] = field(default_factory=dict)  # randomized per-load attrs

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "x": self.x,
            "y": self.y,
            "heading": self.heading,
            "size": self.size,
            "costume": self.costume,
            "costume_count": self.costume_count,
            "visible": self.visible,
            "radius": self.radius,
            "rotation_style": self.rotation_style,
            "color": self.color,
            "variables": dict(self.variables),
            "var_ranges": {k: list(v) for k, v in self.var_ranges.items()},
            "init": {k: e.to_dict() for k, e in self.init.items()},
        }

    @staticmethod
    def from_dict(d: dict) -> "SpriteSpec":
        return SpriteSpec(
            name=d["name"],
            x=d.get("x", 0.0),
            y=d.get("y", 0.0),
            heading=d.get("heading", 90.0),
            size=d.get("size", 100.0),
            costume=d.get("costume", 0),
            costume_count=d.get("costume_count", 1),
            visible=d.get("visible", True),
            radius=d.get("radius", 15.0),
            rotation_style=d.get("rotation_style", "fixed"),
            color=d.get("color", ""),
            variables=dict(d.get("variables", {})),
            var_ranges={k: (float(v[0]), float(v[1])) for k, v in d.get("var_ranges", {}).items()},
            init={k: Expr.from_dict(e) for k, e in d.get("init", {}).items()},
        )


@dataclass
class GameSpec:
    id: str
    sprites: list[SpriteSpec]
    scripts: list[Script]
    global_variables: dict[str, float] = field(default_factory=dict)
    global_var_ranges: dict[str, tuple[float, float]] = field(default_factory=dict)
    winning_statements: set[int] = field(default_factory=set)
    input_handlers: frozenset[str] | None = None  # derived from scripts when None

    def sprite(self, name: str) -> SpriteSpec:
        for s in self.sprites:
            if s.name == name:
                return s
        raise ValidationError(f"sprites: unknown sprite {name!r}")

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "sprites": [s.to_dict() for s in self.sprites],
            "scripts": [s.to_dict() for s in self.scripts],
            "global_variables": dict(self.global_variables),
            "global_var_ranges": {k: list(v) for k, v in self.global_var_ranges.items()},
            "winning_statements": sorted(self.winning_statements),
        }

    @staticmethod
    def from_dict(d: dict) -> "GameSpec":
        return GameSpec(
            id=d["id"],
            sprites=[SpriteSpec.from_dict(s) for s in d["sprites"]],
            scripts=[Script.from_dict(s) for s in d["scripts"]],
            global_variables=dict(d.get("global_variables", {})),
            global_var_ranges={
                k: (float(v[0]), float(v[1])) for k, v in d.get("global_var_ranges", {}).items()
            },
            winning_statements=set(d.get("winning_statements", [])),
        )


# --- construction helpers ---------------------------------------------------


class expr:
    """Shorthand constructors for expressions."""

    @staticmethod
    def const(v: float) -> Expr:
        return Expr("const", value=float(v))

    @staticmethod
    def attr(sprite: str, name: str) -> Expr:
        return Expr("attr", sprite=sprite, name=name)

    @staticmethod
    def var(name: str) -> Expr:
        return Expr("var", name=name)

    @staticmethod
    def svar(sprite: str, name: str) -> Expr:
        return Expr("svar", sprite=sprite, name=name)

    mouse_x = Expr("mouse_x")
    mouse_y = Expr("mouse_y")

    @staticmethod
    def dist(a: str, b: str) -> Expr:
        return Expr("dist", sprite=a, name=b)

    @staticmethod
    def rand(lo, hi) -> Expr:
        return Expr("rand", args=(expr._wrap(lo), expr._wrap(hi)))

    @staticmethod
    def add(a, b) -> Expr:
        return Expr("bin", op="add", args=(expr._wrap(a), expr._wrap(b)))

    @staticmethod
    def sub(a, b) -> Expr:
        return Expr("bin", op="sub", args=(expr._wrap(a), expr._wrap(b)))

    @staticmethod
    def mul(a, b) -> Expr:
        return Expr("bin", op="mul", args=(expr._wrap(a), expr._wrap(b)))

    @staticmethod
    def div(a, b) -> Expr:
        return Expr("bin", op="div", args=(expr._wrap(a), expr._wrap(b)))

    @staticmethod
    def min(a, b) -> Expr:
        return Expr("bin", op="min", args=(expr._wrap(a), expr._wrap(b)))

    @staticmethod
    def max(a, b) -> Expr:
        return Expr("bin", op="max", args=(expr._wrap(a), expr._wrap(b)))

    @staticmethod
    def abs(a) -> Expr:
        return Expr("un", op="abs", args=(expr._wrap(a),))

    @staticmethod
    def _wrap(v) -> Expr:
        return v if isinstance(v, Expr) else expr.const(v)


class stmt:
    """Shorthand constructors for statements and predicates."""

    @staticmethod
    def set_attr(sprite: str, name: str, value, label="") -> Stmt:
        return Stmt("set_attr", sprite=sprite, name=name, value=expr._wrap(value), label=label)

    @staticmethod
    def change_attr(sprite: str, name: str, value, label="") -> Stmt:
        return Stmt("change_attr", sprite=sprite, name=name, value=expr._wrap(value), label=label)

    @staticmethod
    def set_var(name: str, value, label="") -> Stmt:
        return Stmt("set_var", name=name, value=expr._wrap(value), label=label)

    @staticmethod
    def change_var(name: str, value, label="") -> Stmt:
        return Stmt("change_var", name=name, value=expr._wrap(value), label=label)

    @staticmethod
    def set_svar(sprite: str, name: str, value, label="") -> Stmt:
        return Stmt("set_svar", sprite=sprite, name=name, value=expr._wrap(value), label=label)

    @staticmethod
    def change_svar(sprite: str, name: str, value, label="") -> Stmt:
        return Stmt("change_svar", sprite=sprite, name=name, value=expr._wrap(value), label=label)

    @staticmethod
    def move_steps(sprite: str, value, label="") -> Stmt:
        return Stmt("move_steps", sprite=sprite, value=expr._wrap(value), label=label)

    @staticmethod
    def point_towards(sprite: str, target: str, label="") -> Stmt:
        return Stmt("point_towards", sprite=sprite, target=target, label=label)

    @staticmethod
    def bounce(sprite: str, edges="lrtb", label="") -> Stmt:
        return Stmt("bounce", sprite=sprite, edges=edges, label=label)

    @staticmethod
    def if_(pred: Predicate, then: list[Stmt], orelse: list[Stmt] | None = None, label="") -> Stmt:
        return Stmt("if", pred=pred, then=then, orelse=orelse or [], label=label)

    @staticmethod
    def game_over(label="") -> Stmt:
        return Stmt("game_over", label=label)

    @staticmethod
    def cmp(lhs, op: str, rhs) -> Predicate:
        return Predicate("cmp", op=op, lhs=expr._wrap(lhs), rhs=expr._wrap(rhs))

    @staticmethod
    def key_pressed(key: str) -> Predicate:
        return Predicate("key_pressed", key=key)

    @staticmethod
    def touching(a: str, b: str) -> Predicate:
        return Predicate("touching", a=a, b=b)
