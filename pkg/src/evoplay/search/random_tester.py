"""Random-input baseline: uniformly sampled actions from the game's own
input set, executed in bounded episodes."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from ..actions import ActionSchema, action_schema
from ..engine import GameProgram, GameSpec, InputEvent, X_MAX, X_MIN, Y_MAX, Y_MIN, load_game

SEED_RANGE = 2**31 - 1


@dataclass
class RandomTesterStats:
    game_id: str
    seed: int
    timeline: list[tuple[int, int]] = field(default_factory=list)
    total_ticks: int = 0
    episodes: int = 0
    covered: frozenset[int] = frozenset()
    n_statements: int = 0
    won: bool = False

    @property
    def coverage_fraction(self) -> float:
        return len(self.covered) / self.n_statements if self.n_statements else 0.0

    def to_dict(self) -> dict:
        return {
            "game_id": self.game_id, "seed": self.seed,
            "timeline": [list(t) for t in self.timeline],
            "total_ticks": self.total_ticks, "episodes": self.episodes,
            "covered": sorted(self.covered), "n_statements": self.n_statements,
            "won": self.won,
        }


def _random_event(schema: ActionSchema, rng: np.random.Generator) -> tuple[InputEvent | None, int]:
    """(event, hold ticks): uniform action, uniform parameters in bounds."""
    spec = schema.actions[int(rng.integers(schema.n_actions))]
    if spec.kind == "mouse_move":
        return InputEvent("mouse_move", x=float(rng.uniform(X_MIN, X_MAX)),
                          y=float(rng.uniform(Y_MIN, Y_MAX))), 1
    if spec.kind == "mouse_click":
        return InputEvent("mouse_click", x=float(rng.uniform(X_MIN, X_MAX)),
                          y=float(rng.uniform(Y_MIN, Y_MAX))), 1
    if spec.kind == "key_press":
        return (InputEvent("key_down", key=spec.key),
                int(rng.integers(1, schema.d_max + 1)))
    return None, int(rng.integers(1, schema.w_max + 1))


def random_tester(game: str | GameSpec | GameProgram, budget_ticks: int,
                  seed: int = 0, episode_ticks: int = 600) -> RandomTesterStats:
    """Coverage from uniformly random play until the tick budget runs out."""
    if budget_ticks <= 0:
        raise ValueError("budget must be positive")
    rng = np.random.default_rng(seed)
    instance = load_game(game)
    schema = action_schema(instance.program)
    stats = RandomTesterStats(game_id=instance.program.spec.id, seed=seed,
                              n_statements=instance.program.n_ids)
    covered: frozenset[int] = frozenset()
    while stats.total_ticks < budget_ticks:
        instance.reset(int(rng.integers(SEED_RANGE)))
        remaining = min(episode_ticks, budget_ticks - stats.total_ticks)
        while remaining > 0 and not instance.game_over:
            ev, hold = _random_event(schema, rng)
            if ev is not None:
                instance.apply_event(ev)
            _, _, done = instance.run_ticks(min(hold, remaining))
            if ev is not None and ev.kind == "key_down" and not instance.game_over:
                instance.apply_event(InputEvent("key_up", key=ev.key))
            remaining -= done
            stats.total_ticks += done
        covered |= instance.covered_ids()
        stats.won = stats.won or instance.won
        stats.episodes += 1
        stats.timeline.append((stats.total_ticks, len(covered)))
    stats.covered = covered
    return stats


def save_random_stats(stats: RandomTesterStats, path: str):
    with open(path, "w") as f:
        json.dump(stats.to_dict(), f, indent=1)
