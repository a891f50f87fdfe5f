"""Built-in toy games used by the test corpus and the demos.

Five small games covering the input modalities the framework targets:
mouse following (paddle_ball), timed key taps (flap_bird), held arrow keys
(fruit_catch, snake_grid) and mouse pointing plus clicks (dot_chase).
Each game can be won (statement labelled "win") and lost within a
600-tick episode, and randomises its layout per seed so generated tests
must be robust, not lucky.
"""

from __future__ import annotations

from .ast import GameSpec, Script, SpriteSpec, expr, stmt


def _paddle_ball() -> GameSpec:
    ball = "ball"
    paddle = "paddle"
    h = expr.attr(ball, "heading")
    return GameSpec(
        id="paddle_ball",
        sprites=[
            SpriteSpec(
                name=ball, radius=10.0, rotation_style="all_around",
                init={
                    "x": expr.rand(-120, 120),
                    "y": expr.rand(20, 100),
                    "heading": expr.rand(150, 210),
                },
            ),
            SpriteSpec(name=paddle, y=-150.0, radius=32.0),
        ],
        global_variables={"score": 0.0},
        global_var_ranges={"score": (0.0, 10.0)},
        scripts=[
            Script("on_start", name="setup", body=[
                stmt.set_var("score", 0),
                stmt.set_attr(paddle, "x", 0),
            ]),
            Script("on_mouse_move", name="paddle_follow", body=[
                stmt.set_attr(paddle, "x", expr.mouse_x),
            ]),
            Script("on_tick", name="ball_loop", body=[
                stmt.move_steps(ball, 8),
                stmt.bounce(ball, "lrt"),
                stmt.if_(stmt.touching(ball, paddle), [
                    # only rebound while heading down, so a touching ball
                    # that just bounced does not flip again
                    stmt.if_(stmt.cmp(expr.abs(h), "gt", 90), [
                        stmt.set_attr(ball, "heading", expr.sub(180, h), label="rebound"),
                        stmt.set_attr(ball, "y", -115),
                        stmt.change_var("score", 1, label="score_up"),
                        stmt.if_(stmt.cmp(expr.var("score"), "ge", 5), [
                            stmt.game_over(label="win"),
                        ], label="win_check"),
                    ], label="hit_down"),
                ], label="hit"),
                stmt.if_(stmt.cmp(expr.attr(ball, "y"), "le", -165), [
                    stmt.game_over(label="lose"),
                ], label="miss_check"),
            ]),
        ],
    )


def _flap_bird() -> GameSpec:
    bird = "bird"
    pipe = "pipe"
    return GameSpec(
        id="flap_bird",
        sprites=[
            SpriteSpec(name=bird, x=-120.0, radius=12.0, init={"y": expr.rand(-40, 40)}),
            SpriteSpec(name=pipe, x=240.0, y=0.0, radius=20.0),
        ],
        global_variables={"vy": 0.0, "passed": 0.0},
        global_var_ranges={"vy": (-12.0, 12.0), "passed": (0.0, 5.0)},
        scripts=[
            Script("on_tick", name="physics", body=[
                stmt.change_var("vy", -0.6),
                stmt.set_var("vy", expr.max(expr.var("vy"), -10)),
                stmt.change_attr(bird, "y", expr.var("vy")),
                stmt.if_(stmt.cmp(expr.attr(bird, "y"), "le", -168), [
                    stmt.game_over(label="lose_floor"),
                ], label="floor_check"),
                stmt.if_(stmt.cmp(expr.attr(bird, "y"), "ge", 168), [
                    stmt.set_var("vy", 0, label="ceiling_stop"),
                ], label="ceiling_check"),
            ]),
            Script("on_key", key="space", name="flap", body=[
                stmt.set_var("vy", 7),
            ]),
            Script("on_tick", name="pipe_loop", body=[
                stmt.change_attr(pipe, "x", -4),
                stmt.if_(stmt.cmp(expr.attr(pipe, "x"), "le", -230), [
                    stmt.set_attr(pipe, "x", 240),
                    stmt.set_attr(pipe, "y", expr.rand(-80, 80), label="new_gap"),
                    stmt.change_var("passed", 1, label="pass_up"),
                    stmt.if_(stmt.cmp(expr.var("passed"), "ge", 3), [
                        stmt.game_over(label="win"),
                    ], label="win_check"),
                ], label="wrap_check"),
                stmt.if_(
                    stmt.cmp(expr.abs(expr.sub(expr.attr(pipe, "x"), expr.attr(bird, "x"))), "le", 24),
                    [
                        stmt.if_(
                            stmt.cmp(expr.abs(expr.sub(expr.attr(bird, "y"), expr.attr(pipe, "y"))), "ge", 55),
                            [stmt.game_over(label="lose_hit")],
                            label="gap_miss",
                        ),
                    ],
                    label="overlap",
                ),
            ]),
        ],
    )


def _fruit_catch() -> GameSpec:
    basket = "basket"
    fruit = "fruit"

    def respawn():  # fresh statements per use, ids are per-object
        return [
            stmt.set_attr(fruit, "y", 170),
            stmt.set_attr(fruit, "x", expr.rand(-200, 200)),
        ]

    return GameSpec(
        id="fruit_catch",
        sprites=[
            SpriteSpec(name=basket, y=-150.0, radius=28.0),
            SpriteSpec(
                name=fruit, y=170.0, radius=10.0, costume_count=3,
                init={"x": expr.rand(-200, 200), "costume": expr.rand(0, 3)},
            ),
        ],
        global_variables={"score": 0.0, "lives": 3.0},
        global_var_ranges={"score": (0.0, 10.0), "lives": (0.0, 5.0)},
        scripts=[
            Script("on_key", key="left", name="go_left", body=[
                stmt.change_attr(basket, "x", -7),
            ]),
            Script("on_key", key="right", name="go_right", body=[
                stmt.change_attr(basket, "x", 7),
            ]),
            Script("on_tick", name="fall", body=[
                stmt.change_attr(fruit, "y", -6),
                stmt.if_(stmt.touching(fruit, basket), [
                    stmt.change_var("score", 1, label="score_up"),
                    *respawn(),
                    stmt.change_attr(fruit, "costume", 1, label="next_costume"),
                    stmt.if_(stmt.cmp(expr.var("score"), "ge", 5), [
                        stmt.game_over(label="win"),
                    ], label="win_check"),
                ], label="catch"),
                stmt.if_(stmt.cmp(expr.attr(fruit, "y"), "le", -170), [
                    stmt.change_var("lives", -1, label="life_down"),
                    *respawn(),
                    stmt.if_(stmt.cmp(expr.var("lives"), "le", 0), [
                        stmt.game_over(label="lose"),
                    ], label="lose_check"),
                ], label="miss"),
            ]),
        ],
    )


def _snake_grid() -> GameSpec:
    head = "head"
    food = "food"
    return GameSpec(
        id="snake_grid",
        sprites=[
            SpriteSpec(name=head, radius=8.0, rotation_style="all_around"),
            SpriteSpec(
                name=food, radius=8.0,
                init={"x": expr.rand(-180, 180), "y": expr.rand(-140, 140)},
            ),
        ],
        global_variables={"score": 0.0},
        global_var_ranges={"score": (0.0, 10.0)},
        scripts=[
            Script("on_key", key="up", name="turn_up", body=[stmt.set_attr(head, "heading", 0)]),
            Script("on_key", key="down", name="turn_down", body=[stmt.set_attr(head, "heading", 180)]),
            Script("on_key", key="left", name="turn_left", body=[stmt.set_attr(head, "heading", -90)]),
            Script("on_key", key="right", name="turn_right", body=[stmt.set_attr(head, "heading", 90)]),
            Script("on_tick", name="slither", body=[
                stmt.move_steps(head, 6),
                stmt.if_(stmt.touching(head, food), [
                    stmt.change_var("score", 1, label="score_up"),
                    stmt.set_attr(food, "x", expr.rand(-180, 180)),
                    stmt.set_attr(food, "y", expr.rand(-140, 140)),
                    stmt.if_(stmt.cmp(expr.var("score"), "ge", 4), [
                        stmt.game_over(label="win"),
                    ], label="win_check"),
                ], label="eat"),
                stmt.if_(stmt.cmp(expr.abs(expr.attr(head, "x")), "ge", 236), [
                    stmt.game_over(label="lose_x"),
                ], label="wall_x"),
                stmt.if_(stmt.cmp(expr.abs(expr.attr(head, "y")), "ge", 176), [
                    stmt.game_over(label="lose_y"),
                ], label="wall_y"),
            ]),
        ],
    )


def _dot_chase() -> GameSpec:
    runner = "runner"
    dot = "dot"
    return GameSpec(
        id="dot_chase",
        sprites=[
            SpriteSpec(name=runner, radius=10.0, rotation_style="all_around"),
            SpriteSpec(
                name=dot, radius=12.0,
                init={"x": expr.rand(-180, 180), "y": expr.rand(-130, 130)},
            ),
        ],
        global_variables={"score": 0.0, "timer": 360.0},
        global_var_ranges={"score": (0.0, 10.0), "timer": (0.0, 600.0)},
        scripts=[
            Script("on_mouse_move", name="steer", body=[
                stmt.point_towards(runner, "mouse"),
            ]),
            Script("on_click", name="blink", body=[
                stmt.set_attr(runner, "x", expr.mouse_x, label="blink_x"),
                stmt.set_attr(runner, "y", expr.mouse_y, label="blink_y"),
            ]),
            Script("on_tick", name="run", body=[
                stmt.move_steps(runner, 5),
                stmt.if_(stmt.touching(runner, dot), [
                    stmt.change_var("score", 1, label="score_up"),
                    stmt.set_attr(dot, "x", expr.rand(-180, 180)),
                    stmt.set_attr(dot, "y", expr.rand(-130, 130)),
                    stmt.if_(stmt.cmp(expr.var("score"), "ge", 3), [
                        stmt.game_over(label="win"),
                    ], label="win_check"),
                ], label="tag"),
                stmt.change_var("timer", -1),
                stmt.if_(stmt.cmp(expr.var("timer"), "le", 0), [
                    stmt.game_over(label="lose"),
                ], label="timeout"),
            ]),
        ],
    )


_FACTORIES = {
    "paddle_ball": _paddle_ball,
    "flap_bird": _flap_bird,
    "fruit_catch": _fruit_catch,
    "snake_grid": _snake_grid,
    "dot_chase": _dot_chase,
}


def builtin_game_ids() -> tuple[str, ...]:
    return tuple(_FACTORIES)


def builtin_game(game_id: str) -> GameSpec:
    if game_id not in _FACTORIES:
        known = ", ".join(_FACTORIES)
        raise KeyError(f"unknown game {game_id!r} (builtins: {known})")
    return _FACTORIES[game_id]()
