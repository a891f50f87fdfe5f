"""Bytecode interpreter for compiled game scripts.

The compiler flattens every script into parallel int/float arrays (an RPN
pool for expressions, a linear instruction stream with jump targets for
statements).  `vm_run` interprets those arrays for a span of ticks while
recording statement coverage and best-so-far branch distances.

All functions here are nopython-compatible and wrapped by the backend's
`jit` (numba njit or identity, see `evoplay._backend`).  Keep this module
free of Python objects: arrays, scalars and `math` calls only, so both
backends execute the exact same source.
"""

from __future__ import annotations

import math

import numpy as np

from .._backend import jit

# expression opcodes
OP_CONST = 0
OP_LOAD = 1
OP_BIN = 2  # operand: 0 add, 1 sub, 2 mul, 3 div, 4 min, 5 max
OP_UN = 3  # operand: 0 neg, 1 abs
OP_DIST = 4
OP_RAND = 5

# statement opcodes
K_SET_ATTR = 0
K_CHANGE_ATTR = 1
K_SET_STATE = 2
K_CHANGE_STATE = 3
K_MOVE = 4
K_POINT = 5
K_BOUNCE = 6
K_IF = 7
K_JMP = 8
K_GAME_OVER = 9

# comparison codes
C_LT = 0
C_LE = 1
C_GT = 2
C_GE = 3
C_EQ = 4
C_NE = 5

# sprite attribute slots (sprite i occupies state[i*6 : i*6+6])
A_X = 0
A_Y = 1
A_HEADING = 2
A_SIZE = 3
A_COSTUME = 4
A_VISIBLE = 5

EXPR_STACK = 64


@jit
def rng_next(rng):
    # xorshift32; state kept in rng[0], masked so int64 matches 32-bit math
    x = rng[0] & 0xFFFFFFFF
    x ^= (x << 13) & 0xFFFFFFFF
    x ^= x >> 17
    x ^= (x << 5) & 0xFFFFFFFF
    rng[0] = x
    return x


@jit
def rng_u01(rng):
    return rng_next(rng) / 4294967296.0


@jit
def wrap_heading(h):
    return (h + 180.0) % 360.0 - 180.0


@jit
def write_attr(state, si, attr, v, costume_counts):
    idx = si * 6 + attr
    if attr == A_X:
        v = min(max(v, -240.0), 240.0)
    elif attr == A_Y:
        v = min(max(v, -180.0), 180.0)
    elif attr == A_HEADING:
        v = wrap_heading(v)
    elif attr == A_SIZE:
        v = min(max(v, 1.0), 500.0)
    elif attr == A_COSTUME:
        v = float(int(math.floor(v)) % costume_counts[si])
    elif attr == A_VISIBLE:
        v = 1.0 if v != 0.0 else 0.0
    state[idx] = v


@jit
def eval_expr(ex_op, ex_i, ex_j, ex_f, start, ln, state, rng, stack):
    sp = 0
    for p in range(start, start + ln):
        op = ex_op[p]
        if op == OP_CONST:
            stack[sp] = ex_f[p]
            sp += 1
        elif op == OP_LOAD:
            stack[sp] = state[ex_i[p]]
            sp += 1
        elif op == OP_BIN:
            b = stack[sp - 1]
            a = stack[sp - 2]
            sp -= 1
            o = ex_i[p]
            if o == 0:
                r = a + b
            elif o == 1:
                r = a - b
            elif o == 2:
                r = a * b
            elif o == 3:
                r = a / b if b != 0.0 else 0.0  # safe division, Scratch-style
            elif o == 4:
                r = a if a < b else b
            else:
                r = a if a > b else b
            stack[sp - 1] = r
        elif op == OP_UN:
            a = stack[sp - 1]
            stack[sp - 1] = -a if ex_i[p] == 0 else abs(a)
        elif op == OP_DIST:
            dx = state[ex_i[p] * 6 + A_X] - state[ex_j[p] * 6 + A_X]
            dy = state[ex_i[p] * 6 + A_Y] - state[ex_j[p] * 6 + A_Y]
            stack[sp] = math.sqrt(dx * dx + dy * dy)
            sp += 1
        else:  # OP_RAND
            hi = stack[sp - 1]
            lo = stack[sp - 2]
            sp -= 1
            stack[sp - 1] = lo + rng_u01(rng) * (hi - lo)
    return stack[0]


@jit
def branch_dists(op, l, r):
    """Distance to make the comparison true / false.

    Non-strict ops use |lhs-rhs|; strict ops add 1 so the distance is
    positive exactly when the outcome is unmet.
    """
    if op == C_LT:
        dt = 0.0 if l < r else l - r + 1.0
        df = 0.0 if l >= r else r - l
    elif op == C_LE:
        dt = 0.0 if l <= r else l - r
        df = 0.0 if l > r else r - l + 1.0
    elif op == C_GT:
        dt = 0.0 if l > r else r - l + 1.0
        df = 0.0 if l <= r else l - r
    elif op == C_GE:
        dt = 0.0 if l >= r else r - l
        df = 0.0 if l < r else l - r + 1.0
    elif op == C_EQ:
        dt = abs(l - r)
        df = 1.0 if l == r else 0.0
    else:  # C_NE
        dt = 1.0 if l == r else 0.0
        df = abs(l - r)
    return dt, df


@jit
def run_init(ex_op, ex_i, ex_j, ex_f, in_tgt, in_attr, in_expr, in_elen, costume_counts, state, rng):
    """Apply per-load randomised initialisers (sprite attrs or variables)."""
    stack = np.empty(EXPR_STACK, np.float64)
    for k in range(in_tgt.shape[0]):
        v = eval_expr(ex_op, ex_i, ex_j, ex_f, in_expr[k], in_elen[k], state, rng, stack)
        a = in_attr[k]
        if a < 0:
            state[in_tgt[k]] = v
        else:
            write_attr(state, in_tgt[k] // 6, a, v, costume_counts)


@jit
def vm_run(
    ex_op, ex_i, ex_j, ex_f,
    st_kind, st_a, st_b, st_c, st_id, st_jmp, st_expr, st_elen, st_slot_t, st_slot_f,
    sc_start, sc_end, sc_trigger, sc_key, sc_id, sc_slot,
    radii, costume_counts,
    keys_off, mouse_off, moved_off, click_off,
    state, covered, branch_best, rng,
    tick0, n_ticks, target_id,
):
    """Run `n_ticks` ticks.  Returns (covered_tick, over_tick, ticks_done).

    covered_tick: first tick the target statement executed, -1 if never
    (runs stop early once the target is hit).  over_tick: tick a game_over
    statement executed, -1 if none.  One-shot input flags (mouse moved,
    click) are cleared at the end of every tick.
    """
    stack = np.empty(EXPR_STACK, np.float64)
    covered_tick = -1
    over_tick = -1
    ticks_done = 0
    for t in range(n_ticks):
        tick = tick0 + t
        game_over = False
        for s in range(sc_start.shape[0]):
            trig = sc_trigger[s]
            if trig == 1:
                fire = True
            elif trig == 0:
                fire = tick == 0
            elif trig == 2:
                fire = state[keys_off + sc_key[s]] != 0.0
            elif trig == 3:
                fire = state[moved_off] != 0.0
            else:
                fire = state[click_off] != 0.0
            if not fire:
                continue
            covered[sc_id[s]] = 1
            branch_best[sc_slot[s]] = 0.0
            pc = sc_start[s]
            end = sc_end[s]
            while pc < end:
                k = st_kind[pc]
                sid = st_id[pc]
                if sid >= 0:
                    covered[sid] = 1
                    if sid == target_id and covered_tick < 0:
                        covered_tick = tick
                if k == K_SET_ATTR or k == K_CHANGE_ATTR:
                    v = eval_expr(ex_op, ex_i, ex_j, ex_f, st_expr[pc], st_elen[pc], state, rng, stack)
                    if k == K_CHANGE_ATTR:
                        v += state[st_a[pc] * 6 + st_b[pc]]
                    write_attr(state, st_a[pc], st_b[pc], v, costume_counts)
                    pc += 1
                elif k == K_SET_STATE or k == K_CHANGE_STATE:
                    v = eval_expr(ex_op, ex_i, ex_j, ex_f, st_expr[pc], st_elen[pc], state, rng, stack)
                    if k == K_CHANGE_STATE:
                        v += state[st_a[pc]]
                    state[st_a[pc]] = v
                    pc += 1
                elif k == K_MOVE:
                    steps = eval_expr(ex_op, ex_i, ex_j, ex_f, st_expr[pc], st_elen[pc], state, rng, stack)
                    si = st_a[pc]
                    h = state[si * 6 + A_HEADING] * math.pi / 180.0
                    write_attr(state, si, A_X, state[si * 6 + A_X] + steps * math.sin(h), costume_counts)
                    write_attr(state, si, A_Y, state[si * 6 + A_Y] + steps * math.cos(h), costume_counts)
                    pc += 1
                elif k == K_POINT:
                    si = st_a[pc]
                    if st_b[pc] < 0:  # towards mouse pointer
                        tx = state[mouse_off]
                        ty = state[mouse_off + 1]
                    else:
                        tx = state[st_b[pc] * 6 + A_X]
                        ty = state[st_b[pc] * 6 + A_Y]
                    dx = tx - state[si * 6 + A_X]
                    dy = ty - state[si * 6 + A_Y]
                    if dx != 0.0 or dy != 0.0:
                        state[si * 6 + A_HEADING] = wrap_heading(math.atan2(dx, dy) * 180.0 / math.pi)
                    pc += 1
                elif k == K_BOUNCE:
                    si = st_a[pc]
                    mask = st_b[pc]
                    r = radii[si] * state[si * 6 + A_SIZE] / 100.0
                    x = state[si * 6 + A_X]
                    y = state[si * 6 + A_Y]
                    h = state[si * 6 + A_HEADING]
                    if (mask & 1) != 0 and x < -240.0 + r:
                        x = -240.0 + r
                        h = -h
                    if (mask & 2) != 0 and x > 240.0 - r:
                        x = 240.0 - r
                        h = -h
                    if (mask & 4) != 0 and y > 180.0 - r:
                        y = 180.0 - r
                        h = 180.0 - h
                    if (mask & 8) != 0 and y < -180.0 + r:
                        y = -180.0 + r
                        h = 180.0 - h
                    state[si * 6 + A_X] = x
                    state[si * 6 + A_Y] = y
                    state[si * 6 + A_HEADING] = wrap_heading(h)
                    pc += 1
                elif k == K_IF:
                    l = eval_expr(ex_op, ex_i, ex_j, ex_f, st_expr[pc], st_elen[pc], state, rng, stack)
                    r = eval_expr(ex_op, ex_i, ex_j, ex_f, st_b[pc], st_c[pc], state, rng, stack)
                    dt, df = branch_dists(st_a[pc], l, r)
                    if dt < branch_best[st_slot_t[pc]]:
                        branch_best[st_slot_t[pc]] = dt
                    if df < branch_best[st_slot_f[pc]]:
                        branch_best[st_slot_f[pc]] = df
                    if dt == 0.0:
                        pc += 1
                    else:
                        pc = st_jmp[pc]
                elif k == K_JMP:
                    pc = st_jmp[pc]
                else:  # K_GAME_OVER
                    game_over = True
                    break
            if game_over:
                break
        state[moved_off] = 0.0
        state[click_off] = 0.0
        ticks_done = t + 1
        if game_over:
            over_tick = tick
            break
        if covered_tick >= 0 and target_id >= 0:
            break
    return covered_tick, over_tick, ticks_done
