"""Scripted expert players for the builtin games.

These stand in for the human player: they play well enough to win and
feed the recorder through the same event interface the UI bridge uses,
so the resulting datasets exercise the full snapshot pipeline.
"""

from __future__ import annotations

import numpy as np

from ..engine import X_MAX, X_MIN, Y_MAX, Y_MIN
from .data import RecorderConfig, RecordingSession, TrainingDataset
from .recorder import RecorderHandle

TICKS_PER_MINUTE = 1800  # 30 ticks/s, the engine's nominal rate


def _clamp_x(x: float) -> float:
    return min(max(x, X_MIN), X_MAX)


def _clamp_y(y: float) -> float:
    return min(max(y, Y_MIN), Y_MAX)


def play_paddle_ball(h: RecorderHandle, rng: np.random.Generator, max_ticks: int = 600):
    """Rest while the ball is up, then move once to the predicted landing
    point after a short reaction delay; grab late when the guess was off.
    The long rests become no-ops at finite delta_t."""
    p = h.program
    bx, by = p.attr_slot("ball", "x"), p.attr_slot("ball", "y")
    px = p.attr_slot("paddle", "x")
    prev = None
    react_at = -1
    aimed = False
    while h.tick < max_ticks and not h.game_over:
        st = h.instance.state
        x, y = float(st[bx]), float(st[by])
        dx, dy = (0.0, 0.0) if prev is None else (x - prev[0], y - prev[1])
        prev = (x, y)
        if dy >= 0:
            react_at = -1
            aimed = False
        elif y < -20.0 and not aimed and react_at < 0:
            react_at = h.tick + int(rng.integers(2, 16))
        if dy < 0 and y < -110.0 and abs(x - float(st[px])) > 40.0:
            h.on_mouse_move(_clamp_x(x), -150.0, h.tick)
            aimed = True
        elif not aimed and 0 <= react_at <= h.tick:
            # straight-line landing guess, ignoring wall rebounds
            t_land = max((y + 150.0) / -dy, 0.0)
            aim = _clamp_x(x + dx * t_land + float(rng.uniform(-6.0, 6.0)))
            h.on_mouse_move(aim, -150.0, h.tick)
            aimed = True
        h.advance()


def play_flap_bird(h: RecorderHandle, rng: np.random.Generator, max_ticks: int = 600):
    """Tap space when the bird sinks below the pipe gap."""
    p = h.program
    by = p.attr_slot("bird", "y")
    py = p.attr_slot("pipe", "y")
    vy = p.var_slot("vy")
    held = False
    held_since = 0
    while h.tick < max_ticks and not h.game_over:
        st = h.instance.state
        if held and h.tick - held_since >= 2:
            h.on_key("space", False, h.tick)
            held = False
        elif not held and st[by] < st[py] - 5.0 and st[vy] < 2.0:
            h.on_key("space", True, h.tick)
            held, held_since = True, h.tick
        h.advance()
    if held and not h.game_over:
        h.on_key("space", False, h.tick)


def play_fruit_catch(h: RecorderHandle, rng: np.random.Generator, max_ticks: int = 600):
    """Press the arrow toward the falling fruit while it is off-center."""
    p = h.program
    fx = p.attr_slot("fruit", "x")
    bx = p.attr_slot("basket", "x")
    held: str | None = None
    held_since = 0
    while h.tick < max_ticks and not h.game_over:
        st = h.instance.state
        dx = st[fx] - st[bx]
        want = "right" if dx > 4.0 else "left" if dx < -4.0 else None
        if held and (want != held or h.tick - held_since >= 12):
            h.on_key(held, False, h.tick)
            held = None
        if want and not held:
            h.on_key(want, True, h.tick)
            held, held_since = want, h.tick
        h.advance()
    if held and not h.game_over:
        h.on_key(held, False, h.tick)


def play_snake_grid(h: RecorderHandle, rng: np.random.Generator, max_ticks: int = 600):
    """Steer along the axis with the larger gap to the food."""
    p = h.program
    hx, hy = p.attr_slot("head", "x"), p.attr_slot("head", "y")
    fx, fy = p.attr_slot("food", "x"), p.attr_slot("food", "y")
    held: str | None = None
    held_since = 0
    last = ""
    while h.tick < max_ticks and not h.game_over:
        if held and h.tick - held_since >= 2:
            h.on_key(held, False, h.tick)
            held = None
        elif not held and h.tick % 4 == 0:
            st = h.instance.state
            dx, dy = st[fx] - st[hx], st[fy] - st[hy]
            if abs(dx) >= abs(dy):
                key = "right" if dx > 0 else "left"
            else:
                key = "up" if dy > 0 else "down"
            if key != last:
                h.on_key(key, True, h.tick)
                held, held_since, last = key, h.tick, key
        h.advance()
    if held and not h.game_over:
        h.on_key(held, False, h.tick)


def play_dot_chase(h: RecorderHandle, rng: np.random.Generator, max_ticks: int = 600):
    """Point the runner at the dot; click to blink when it is far away."""
    p = h.program
    rx, ry = p.attr_slot("runner", "x"), p.attr_slot("runner", "y")
    dx_, dy_ = p.attr_slot("dot", "x"), p.attr_slot("dot", "y")
    while h.tick < max_ticks and not h.game_over:
        if h.tick % 10 == 0:
            st = h.instance.state
            far = abs(st[dx_] - st[rx]) + abs(st[dy_] - st[ry]) > 200.0
            x, y = _clamp_x(st[dx_]), _clamp_y(st[dy_])
            if far and h.tick > 0:
                h.on_mouse_click(x, y, h.tick)
            else:
                h.on_mouse_move(x, y, h.tick)
        h.advance()


EXPERTS = {
    "paddle_ball": play_paddle_ball,
    "flap_bird": play_flap_bird,
    "fruit_catch": play_fruit_catch,
    "snake_grid": play_snake_grid,
    "dot_chase": play_dot_chase,
}


def record_expert_dataset(game_id: str, total_ticks: int = TICKS_PER_MINUTE,
                          config: RecorderConfig | None = None, seed: int = 0,
                          session_ticks: int = 600) -> TrainingDataset:
    """Scripted-expert sessions until the requested play time is reached
    (default one minute worth of ticks)."""
    if game_id not in EXPERTS:
        raise ValueError(f"no expert for game {game_id!r}")
    config = config or RecorderConfig()
    rng = np.random.default_rng(seed)
    sessions: list[RecordingSession] = []
    played = 0
    while played < total_ticks:
        h = RecorderHandle(game_id, seed=int(rng.integers(2**31 - 1)), config=config)
        EXPERTS[game_id](h, rng, max_ticks=min(session_ticks, total_ticks - played))
        sess = h.end_session()
        sessions.append(sess)
        played += sess.duration_ticks
    ds = TrainingDataset(game_id=game_id, sessions=sessions, config=config)
    ds.feature_names = tuple(e.feature_name for e in h.schema.entries)
    return ds
