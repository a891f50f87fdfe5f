from evoplay.engine.ast import (
    CANVAS_HEIGHT,
    CANVAS_WIDTH,
    X_MAX,
    X_MIN,
    Y_MAX,
    Y_MIN,
    GameSpec,
    Script,
    SpriteSpec,
    ValidationError,
    stmt,
    expr,
)
from evoplay.engine.instance import (
    GameInstance,
    GameState,
    InputEvent,
    approach_level,
    branch_distance,
    cdg,
    covered,
    is_game_over,
    load_game,
    step,
)
from evoplay.engine.compile import ControlDependenceGraph, GameProgram, compile_game
from evoplay.engine.builtins import builtin_game, builtin_game_ids

__all__ = [
    "CANVAS_WIDTH",
    "CANVAS_HEIGHT",
    "X_MIN",
    "X_MAX",
    "Y_MIN",
    "Y_MAX",
    "GameSpec",
    "SpriteSpec",
    "Script",
    "ValidationError",
    "stmt",
    "expr",
    "GameInstance",
    "GameState",
    "InputEvent",
    "load_game",
    "step",
    "branch_distance",
    "approach_level",
    "cdg",
    "covered",
    "is_game_over",
    "ControlDependenceGraph",
    "GameProgram",
    "compile_game",
    "builtin_game",
    "builtin_game_ids",
]
