"""Lower a GameSpec to flat arrays the bytecode interpreter can run.

Compilation assigns every statement (including each script's trigger, its
"hat") a small integer id, desugars `touching` and `key_pressed` predicates
into numeric comparisons, flattens expressions to an RPN pool and statements
to a jump-threaded instruction stream, and derives the control dependence
graph used by the coverage fitness.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels as K
from .ast import (
    CMP_OPS,
    SPRITE_ATTRS,
    TRIGGERS,
    Expr,
    GameSpec,
    Predicate,
    Script,
    SpriteSpec,
    Stmt,
    ValidationError,
    expr,
)

OUT_FALSE, OUT_TRUE, OUT_HAT = 0, 1, 2

CMP_CODE = {"lt": K.C_LT, "le": K.C_LE, "gt": K.C_GT, "ge": K.C_GE, "eq": K.C_EQ, "ne": K.C_NE}
BIN_CODE = {"add": 0, "sub": 1, "mul": 2, "div": 3, "min": 4, "max": 5}
UN_CODE = {"neg": 0, "abs": 1}
ATTR_CODE = {
    "x": K.A_X,
    "y": K.A_Y,
    "heading": K.A_HEADING,
    "size": K.A_SIZE,
    "costume": K.A_COSTUME,
    "visible": K.A_VISIBLE,
}
TRIGGER_CODE = {"on_start": 0, "on_tick": 1, "on_key": 2, "on_mouse_move": 3, "on_click": 4}
EDGE_BITS = {"l": 1, "r": 2, "t": 4, "b": 8}


@dataclass
class ControlDependenceGraph:
    """Nesting-derived control dependences: each statement depends on its
    enclosing conditional (or its script's hat), via a true/false/hat edge."""

    parent: dict[int, int]  # stmt id -> parent id, -1 for hats
    outcome: dict[int, int]  # stmt id -> OUT_TRUE / OUT_FALSE / OUT_HAT
    children: dict[int, list[int]]
    entries: list[int]  # hat ids, script order

    def path(self, target: int) -> list[int]:
        """Ancestor chain from the hat down to (and including) the target."""
        if target not in self.parent:
            raise KeyError(f"unknown statement id {target}")
        out = []
        n = target
        while n != -1:
            out.append(n)
            n = self.parent[n]
        out.reverse()
        return out

    def approach_level(self, covered, target: int) -> int:
        return sum(1 for n in self.path(target) if n not in covered)

    def first_uncovered(self, covered, target: int) -> int:
        """Shallowest uncovered node on the path to target, -1 if covered."""
        for n in self.path(target):
            if n not in covered:
                return n
        return -1


@dataclass
class GameProgram:
    """Compiled game: interpreter arrays plus the metadata the rest of the
    framework needs (state layout, CDG, feature hints, input handlers)."""

    spec: GameSpec

    # expression pool
    ex_op: np.ndarray
    ex_i: np.ndarray
    ex_j: np.ndarray
    ex_f: np.ndarray

    # instruction stream
    st_kind: np.ndarray
    st_a: np.ndarray
    st_b: np.ndarray
    st_c: np.ndarray
    st_id: np.ndarray
    st_jmp: np.ndarray
    st_expr: np.ndarray
    st_elen: np.ndarray
    st_slot_t: np.ndarray
    st_slot_f: np.ndarray

    # script table
    sc_start: np.ndarray
    sc_end: np.ndarray
    sc_trigger: np.ndarray
    sc_key: np.ndarray
    sc_id: np.ndarray
    sc_slot: np.ndarray

    # per-sprite constants
    radii: np.ndarray
    costume_counts: np.ndarray

    # state vector layout
    n_state: int
    keys_off: int
    mouse_off: int
    moved_off: int
    click_off: int
    base_state: np.ndarray
    sprite_names: list[str]
    global_names: list[str]
    svar_names: list[tuple[str, str]]
    key_names: list[str]
    var_ranges: dict[str, tuple[float, float]]  # "name" or "sprite.name"

    # randomised initialisers, applied at every reset
    in_tgt: np.ndarray
    in_attr: np.ndarray
    in_expr: np.ndarray
    in_elen: np.ndarray

    # coverage structure
    n_ids: int
    n_slots: int
    hat_ids: list[int]
    cdg: ControlDependenceGraph
    edge_slot: np.ndarray  # stmt id -> branch-distance slot of its incoming edge
    id_to_label: dict[int, str]
    id_to_kind: dict[int, str]
    winning_ids: frozenset[int]

    # static analyses for features / input synthesis
    uses_mouse: bool
    uses_click: bool
    costume_writers: frozenset[str]
    touch_pairs: tuple[tuple[str, str], ...]
    input_handlers: frozenset[str]

    @property
    def kernel_args(self) -> tuple:
        return (
            self.ex_op, self.ex_i, self.ex_j, self.ex_f,
            self.st_kind, self.st_a, self.st_b, self.st_c, self.st_id,
            self.st_jmp, self.st_expr, self.st_elen, self.st_slot_t, self.st_slot_f,
            self.sc_start, self.sc_end, self.sc_trigger, self.sc_key,
            self.sc_id, self.sc_slot,
            self.radii, self.costume_counts,
            self.keys_off, self.mouse_off, self.moved_off, self.click_off,
        )

    def sprite_index(self, name: str) -> int:
        try:
            return self.sprite_names.index(name)
        except ValueError:
            raise ValidationError(f"unknown sprite {name!r}") from None

    def attr_slot(self, sprite: str, attr: str) -> int:
        return self.sprite_index(sprite) * 6 + ATTR_CODE[attr]

    def var_slot(self, name: str) -> int:
        n_sp = len(self.sprite_names)
        return n_sp * 6 + self.global_names.index(name)

    def svar_slot(self, sprite: str, name: str) -> int:
        n_sp = len(self.sprite_names)
        return n_sp * 6 + len(self.global_names) + self.svar_names.index((sprite, name))

    def key_slot(self, key: str) -> int:
        return self.keys_off + self.key_names.index(key)

    def ids_by_label(self, label: str) -> list[int]:
        return sorted(i for i, lb in self.id_to_label.items() if lb == label)


def _walk_exprs(e: Expr):
    yield e
    for a in e.args:
        yield from _walk_exprs(a)


def _walk_stmts(body: list[Stmt]):
    for s in body:
        yield s
        if s.kind == "if":
            yield from _walk_stmts(s.then)
            yield from _walk_stmts(s.orelse)


def _stmt_exprs(s: Stmt):
    if s.value is not None:
        yield from _walk_exprs(s.value)
    if s.pred is not None and s.pred.kind == "cmp":
        yield from _walk_exprs(s.pred.lhs)
        yield from _walk_exprs(s.pred.rhs)


class _Compiler:
    def __init__(self, spec: GameSpec):
        self.spec = spec
        self.sprite_idx: dict[str, int] = {}
        self.global_idx: dict[str, int] = {}
        self.svar_idx: dict[tuple[str, str], int] = {}
        self.key_idx: dict[str, int] = {}
        self.ex_op: list[int] = []
        self.ex_i: list[int] = []
        self.ex_j: list[int] = []
        self.ex_f: list[float] = []
        self.rows: list[dict] = []
        self.ids: dict[int, int] = {}  # id(stmt/script object) -> stmt id
        self.id_to_label: dict[int, str] = {}
        self.id_to_kind: dict[int, str] = {}
        self.cdg_parent: dict[int, int] = {}
        self.cdg_outcome: dict[int, int] = {}
        self.edge_slot: dict[int, int] = {}
        self.n_if = 0
        self.touch_pairs: list[tuple[str, str]] = []

    # --- layout ---------------------------------------------------------

    def _layout(self):
        spec = self.spec
        names = [sp.name for sp in spec.sprites]
        if len(set(names)) != len(names):
            raise ValidationError("sprites: duplicate sprite names")
        if not names:
            raise ValidationError("sprites: game needs at least one sprite")
        self.sprite_idx = {n: i for i, n in enumerate(names)}

        off = len(names) * 6
        for name in spec.global_variables:
            self.global_idx[name] = off
            off += 1
        for sp in spec.sprites:
            for name in sp.variables:
                self.svar_idx[(sp.name, name)] = off
                off += 1

        self.svars_end = off
        keys = []
        for sc in spec.scripts:
            if sc.trigger == "on_key":
                if not sc.key:
                    raise ValidationError(f"script {sc.name!r}: on_key needs a key")
                if sc.key not in keys:
                    keys.append(sc.key)
            for st in _walk_stmts(sc.body):
                if st.pred is not None and st.pred.kind == "key_pressed":
                    if st.pred.key not in keys:
                        keys.append(st.pred.key)
        self.key_names = keys
        self.mouse_off = off
        self.keys_off = off + 2
        self.moved_off = self.keys_off + len(keys)
        self.click_off = self.moved_off + 1
        self.n_state = self.click_off + 1
        self.key_idx = {k: i for i, k in enumerate(keys)}  # offsets from keys_off

    def _base_state(self) -> np.ndarray:
        spec = self.spec
        st = np.zeros(self.n_state, np.float64)
        for i, sp in enumerate(spec.sprites):
            if sp.costume_count < 1:
                raise ValidationError(f"sprite {sp.name!r}: costume_count must be >= 1")
            st[i * 6 + K.A_X] = min(max(sp.x, -240.0), 240.0)
            st[i * 6 + K.A_Y] = min(max(sp.y, -180.0), 180.0)
            st[i * 6 + K.A_HEADING] = (sp.heading + 180.0) % 360.0 - 180.0
            st[i * 6 + K.A_SIZE] = min(max(sp.size, 1.0), 500.0)
            st[i * 6 + K.A_COSTUME] = sp.costume % sp.costume_count
            st[i * 6 + K.A_VISIBLE] = 1.0 if sp.visible else 0.0
        for name, v in spec.global_variables.items():
            st[self.global_idx[name]] = v
        for sp in spec.sprites:
            for name, v in sp.variables.items():
                st[self.svar_idx[(sp.name, name)]] = v
        return st

    # --- ids --------------------------------------------------------------

    def _assign_ids(self):
        explicit: dict[int, object] = {}

        def claim(obj, want):
            if want is None:
                return
            if not isinstance(want, int) or want < 0:
                raise ValidationError(f"statement id must be a non-negative int, got {want!r}")
            if want in explicit:
                raise ValidationError(f"duplicate statement id {want}")
            explicit[want] = obj

        for sc in self.spec.scripts:
            claim(sc, sc.id)
            for st in _walk_stmts(sc.body):
                claim(st, st.id)

        next_id = 0
        used = set(explicit)

        def assign(obj, want, kind, label):
            nonlocal next_id
            if want is None:
                while next_id in used:
                    next_id += 1
                sid = next_id
                used.add(sid)
            else:
                sid = want
            self.ids[id(obj)] = sid
            self.id_to_kind[sid] = kind
            if label:
                self.id_to_label[sid] = label
            return sid

        for sc in self.spec.scripts:
            assign(sc, sc.id, "hat:" + sc.trigger, sc.name)
            for st in _walk_stmts(sc.body):
                assign(st, st.id, st.kind, st.label)

        self.n_ids = (max(used) + 1) if used else 0

    # --- expressions -------------------------------------------------------

    def _push(self, op, i=0, j=0, f=0.0):
        self.ex_op.append(op)
        self.ex_i.append(i)
        self.ex_j.append(j)
        self.ex_f.append(f)

    def _sprite(self, name: str) -> int:
        if name not in self.sprite_idx:
            raise ValidationError(f"unknown sprite {name!r}")
        return self.sprite_idx[name]

    def _state_slot(self, e: Expr) -> int:
        if e.kind == "attr":
            if e.name not in ATTR_CODE:
                raise ValidationError(f"unknown sprite attribute {e.name!r}")
            return self._sprite(e.sprite) * 6 + ATTR_CODE[e.name]
        if e.kind == "var":
            if e.name not in self.global_idx:
                raise ValidationError(f"unknown variable {e.name!r}")
            return self.global_idx[e.name]
        if e.kind == "svar":
            key = (e.sprite, e.name)
            if key not in self.svar_idx:
                raise ValidationError(f"unknown sprite variable {e.sprite}.{e.name}")
            return self.svar_idx[key]
        raise ValidationError(f"expression kind {e.kind!r} is not a storage location")

    def _rpn(self, e: Expr) -> int:
        """Append RPN for e; returns the stack depth the subtree needs."""
        if e.kind == "const":
            self._push(K.OP_CONST, f=float(e.value))
            return 1
        if e.kind in ("attr", "var", "svar"):
            self._push(K.OP_LOAD, i=self._state_slot(e))
            return 1
        if e.kind == "mouse_x":
            self._push(K.OP_LOAD, i=self.mouse_off)
            return 1
        if e.kind == "mouse_y":
            self._push(K.OP_LOAD, i=self.mouse_off + 1)
            return 1
        if e.kind == "dist":
            a, b = self._sprite(e.sprite), self._sprite(e.name)
            self._note_pair(e.sprite, e.name)
            self._push(K.OP_DIST, i=a, j=b)
            return 1
        if e.kind == "rand":
            d1 = self._rpn(e.args[0])
            d2 = self._rpn(e.args[1])
            self._push(K.OP_RAND)
            return max(d1, d2 + 1, 2)
        if e.kind == "bin":
            if e.op not in BIN_CODE:
                raise ValidationError(f"unknown binary op {e.op!r}")
            d1 = self._rpn(e.args[0])
            d2 = self._rpn(e.args[1])
            self._push(K.OP_BIN, i=BIN_CODE[e.op])
            return max(d1, d2 + 1, 2)
        if e.kind == "un":
            if e.op not in UN_CODE:
                raise ValidationError(f"unknown unary op {e.op!r}")
            d = self._rpn(e.args[0])
            self._push(K.OP_UN, i=UN_CODE[e.op])
            return d
        raise ValidationError(f"unknown expression kind {e.kind!r}")

    def _emit_expr(self, e: Expr) -> tuple[int, int]:
        start = len(self.ex_op)
        depth = self._rpn(e)
        if depth > K.EXPR_STACK:
            raise ValidationError("expression too deep")
        return start, len(self.ex_op) - start

    def _emit_raw_load(self, slot: int) -> tuple[int, int]:
        start = len(self.ex_op)
        self._push(K.OP_LOAD, i=slot)
        return start, 1

    def _note_pair(self, a: str, b: str):
        pair = (a, b) if a <= b else (b, a)
        if pair not in self.touch_pairs:
            self.touch_pairs.append(pair)

    # --- statements --------------------------------------------------------

    def _row(self, **kw) -> int:
        row = {
            "kind": 0, "a": 0, "b": 0, "c": 0, "id": -1, "jmp": 0,
            "expr": 0, "elen": 0, "slot_t": 0, "slot_f": 0,
        }
        row.update(kw)
        self.rows.append(row)
        return len(self.rows) - 1

    def _pred_parts(self, p: Predicate):
        """Returns (lhs_ref, cmp_code, rhs_ref) with desugaring applied."""
        if p.kind == "cmp":
            if p.op not in CMP_CODE:
                raise ValidationError(f"unknown comparison op {p.op!r}")
            return self._emit_expr(p.lhs), CMP_CODE[p.op], self._emit_expr(p.rhs)
        if p.kind == "key_pressed":
            if p.key not in self.key_idx:
                raise ValidationError(f"key {p.key!r} missing from key table")
            lhs = self._emit_raw_load(self.keys_off + self.key_idx[p.key])
            rhs = self._emit_expr(expr.const(1.0))
            return lhs, K.C_GE, rhs
        if p.kind == "touching":
            # contact when centre distance <= sum of size-scaled radii
            ra = self.spec.sprite(p.a).radius / 100.0
            rb = self.spec.sprite(p.b).radius / 100.0
            self._note_pair(p.a, p.b)
            lhs = self._emit_expr(Expr("dist", sprite=p.a, name=p.b))
            rhs = self._emit_expr(
                expr.add(expr.mul(expr.attr(p.a, "size"), ra), expr.mul(expr.attr(p.b, "size"), rb))
            )
            return lhs, K.C_LE, rhs
        raise ValidationError(f"unknown predicate kind {p.kind!r}")

    def _emit_block(self, body: list[Stmt], parent_id: int, outcome: int, slot: int):
        for st in body:
            sid = self.ids[id(st)]
            self.cdg_parent[sid] = parent_id
            self.cdg_outcome[sid] = outcome
            self.edge_slot[sid] = slot
            self._emit_stmt(st, sid)

    def _emit_stmt(self, st: Stmt, sid: int):
        k = st.kind
        if k in ("set_attr", "change_attr"):
            if st.name not in ATTR_CODE:
                raise ValidationError(f"unknown sprite attribute {st.name!r}")
            e = self._emit_expr(st.value)
            kind = K.K_SET_ATTR if k == "set_attr" else K.K_CHANGE_ATTR
            self._row(kind=kind, a=self._sprite(st.sprite), b=ATTR_CODE[st.name],
                      id=sid, expr=e[0], elen=e[1])
        elif k in ("set_var", "change_var"):
            if st.name not in self.global_idx:
                raise ValidationError(f"unknown variable {st.name!r}")
            e = self._emit_expr(st.value)
            kind = K.K_SET_STATE if k == "set_var" else K.K_CHANGE_STATE
            self._row(kind=kind, a=self.global_idx[st.name], id=sid, expr=e[0], elen=e[1])
        elif k in ("set_svar", "change_svar"):
            key = (st.sprite, st.name)
            if key not in self.svar_idx:
                raise ValidationError(f"unknown sprite variable {st.sprite}.{st.name}")
            e = self._emit_expr(st.value)
            kind = K.K_SET_STATE if k == "set_svar" else K.K_CHANGE_STATE
            self._row(kind=kind, a=self.svar_idx[key], id=sid, expr=e[0], elen=e[1])
        elif k == "move_steps":
            e = self._emit_expr(st.value)
            self._row(kind=K.K_MOVE, a=self._sprite(st.sprite), id=sid, expr=e[0], elen=e[1])
        elif k == "point_towards":
            tgt = -1 if st.target == "mouse" else self._sprite(st.target)
            self._row(kind=K.K_POINT, a=self._sprite(st.sprite), b=tgt, id=sid)
        elif k == "bounce":
            mask = 0
            for ch in st.edges:
                if ch not in EDGE_BITS:
                    raise ValidationError(f"bounce edges must be drawn from 'lrtb', got {st.edges!r}")
                mask |= EDGE_BITS[ch]
            self._row(kind=K.K_BOUNCE, a=self._sprite(st.sprite), b=mask, id=sid)
        elif k == "if":
            lhs, op, rhs = self._pred_parts(st.pred)
            slot_t = self.n_scripts + 2 * self.n_if
            slot_f = slot_t + 1
            self.n_if += 1
            if_row = self._row(kind=K.K_IF, a=op, b=rhs[0], c=rhs[1], id=sid,
                               expr=lhs[0], elen=lhs[1], slot_t=slot_t, slot_f=slot_f)
            self._emit_block(st.then, sid, OUT_TRUE, slot_t)
            jmp_row = self._row(kind=K.K_JMP)
            self.rows[if_row]["jmp"] = len(self.rows)
            self._emit_block(st.orelse, sid, OUT_FALSE, slot_f)
            self.rows[jmp_row]["jmp"] = len(self.rows)
        elif k == "game_over":
            self._row(kind=K.K_GAME_OVER, id=sid)
        else:
            raise ValidationError(f"unknown statement kind {k!r}")

    # --- driver -----------------------------------------------------------

    def run(self) -> GameProgram:
        spec = self.spec
        self._layout()
        base_state = self._base_state()
        self._assign_ids()

        self.n_scripts = len(spec.scripts)
        sc_start, sc_end, sc_trigger, sc_key, sc_id, sc_slot = [], [], [], [], [], []
        hat_ids = []
        for s, sc in enumerate(spec.scripts):
            if sc.trigger not in TRIGGER_CODE:
                raise ValidationError(f"unknown trigger {sc.trigger!r}")
            hid = self.ids[id(sc)]
            hat_ids.append(hid)
            self.cdg_parent[hid] = -1
            self.cdg_outcome[hid] = OUT_HAT
            self.edge_slot[hid] = -1
            sc_start.append(len(self.rows))
            self._emit_block(sc.body, hid, OUT_HAT, s)
            sc_end.append(len(self.rows))
            sc_trigger.append(TRIGGER_CODE[sc.trigger])
            sc_key.append(self.key_idx[sc.key] if sc.trigger == "on_key" else -1)
            sc_id.append(hid)
            sc_slot.append(s)

        children: dict[int, list[int]] = {i: [] for i in self.cdg_parent}
        for n, p in self.cdg_parent.items():
            if p != -1:
                children[p].append(n)
        cdg = ControlDependenceGraph(
            parent=dict(self.cdg_parent),
            outcome=dict(self.cdg_outcome),
            children=children,
            entries=list(hat_ids),
        )

        edge_slot = np.full(self.n_ids, -1, np.int32)
        for sid, slot in self.edge_slot.items():
            edge_slot[sid] = slot

        # randomised initialisers
        in_tgt, in_attr, in_expr, in_elen = [], [], [], []
        for sp in spec.sprites:
            si = self.sprite_idx[sp.name]
            for name, e in sp.init.items():
                ref = self._emit_expr(e)
                if name in ATTR_CODE:
                    in_tgt.append(si * 6 + ATTR_CODE[name])
                    in_attr.append(ATTR_CODE[name])
                elif (sp.name, name) in self.svar_idx:
                    in_tgt.append(self.svar_idx[(sp.name, name)])
                    in_attr.append(-1)
                else:
                    raise ValidationError(f"init target {sp.name}.{name} is neither attr nor variable")
                in_expr.append(ref[0])
                in_elen.append(ref[1])

        # static analyses
        uses_mouse = False
        uses_click = False
        costume_writers = set()
        for sc in spec.scripts:
            if sc.trigger == "on_mouse_move":
                uses_mouse = True
            if sc.trigger == "on_click":
                uses_click = True
            for st in _walk_stmts(sc.body):
                if st.kind == "point_towards" and st.target == "mouse":
                    uses_mouse = True
                if st.kind in ("set_attr", "change_attr") and st.name == "costume":
                    costume_writers.add(st.sprite)
                for e in _stmt_exprs(st):
                    if e.kind in ("mouse_x", "mouse_y"):
                        uses_mouse = True

        handlers = {"key:" + k for k in self.key_names}
        if uses_mouse:
            handlers.add("mouse_move")
        if uses_click:
            handlers.add("click")
        if spec.input_handlers is not None:
            handlers = set(spec.input_handlers)

        win = set(spec.winning_statements)
        for sid, lb in self.id_to_label.items():
            if lb == "win":
                win.add(sid)
        for sid in win:
            if sid not in self.cdg_parent:
                raise ValidationError(f"winning statement id {sid} does not exist")

        var_ranges: dict[str, tuple[float, float]] = {}
        for name in spec.global_variables:
            var_ranges[name] = spec.global_var_ranges.get(name, (-100.0, 100.0))
        for sp in spec.sprites:
            for name in sp.variables:
                var_ranges[f"{sp.name}.{name}"] = sp.var_ranges.get(name, (-100.0, 100.0))

        rows = self.rows
        arr = lambda key, dt: np.array([r[key] for r in rows], dt) if rows else np.zeros(0, dt)
        return GameProgram(
            spec=spec,
            ex_op=np.array(self.ex_op, np.int32) if self.ex_op else np.zeros(0, np.int32),
            ex_i=np.array(self.ex_i, np.int32) if self.ex_i else np.zeros(0, np.int32),
            ex_j=np.array(self.ex_j, np.int32) if self.ex_j else np.zeros(0, np.int32),
            ex_f=np.array(self.ex_f, np.float64) if self.ex_f else np.zeros(0, np.float64),
            st_kind=arr("kind", np.int32), st_a=arr("a", np.int32), st_b=arr("b", np.int32),
            st_c=arr("c", np.int32), st_id=arr("id", np.int32), st_jmp=arr("jmp", np.int32),
            st_expr=arr("expr", np.int32), st_elen=arr("elen", np.int32),
            st_slot_t=arr("slot_t", np.int32), st_slot_f=arr("slot_f", np.int32),
            sc_start=np.array(sc_start, np.int32), sc_end=np.array(sc_end, np.int32),
            sc_trigger=np.array(sc_trigger, np.int32), sc_key=np.array(sc_key, np.int32),
            sc_id=np.array(sc_id, np.int32), sc_slot=np.array(sc_slot, np.int32),
            radii=np.array([sp.radius for sp in spec.sprites], np.float64),
            costume_counts=np.array([sp.costume_count for sp in spec.sprites], np.int64),
            n_state=self.n_state,
            keys_off=self.keys_off, mouse_off=self.mouse_off,
            moved_off=self.moved_off, click_off=self.click_off,
            base_state=base_state,
            sprite_names=[sp.name for sp in spec.sprites],
            global_names=list(spec.global_variables),
            svar_names=[(sp.name, v) for sp in spec.sprites for v in sp.variables],
            key_names=list(self.key_names),
            var_ranges=var_ranges,
            in_tgt=np.array(in_tgt, np.int32) if in_tgt else np.zeros(0, np.int32),
            in_attr=np.array(in_attr, np.int32) if in_attr else np.zeros(0, np.int32),
            in_expr=np.array(in_expr, np.int32) if in_expr else np.zeros(0, np.int32),
            in_elen=np.array(in_elen, np.int32) if in_elen else np.zeros(0, np.int32),
            n_ids=self.n_ids,
            n_slots=self.n_scripts + 2 * self.n_if,
            hat_ids=hat_ids,
            cdg=cdg,
            edge_slot=edge_slot,
            id_to_label=dict(self.id_to_label),
            id_to_kind=dict(self.id_to_kind),
            winning_ids=frozenset(win),
            uses_mouse=uses_mouse,
            uses_click=uses_click,
            costume_writers=frozenset(costume_writers),
            touch_pairs=tuple(self.touch_pairs),
            input_handlers=frozenset(handlers),
        )


def compile_game(spec: GameSpec) -> GameProgram:
    return _Compiler(spec).run()
