"""Search configuration with the evolution-side knobs and their defaults."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..training import LossConfig


@dataclass(frozen=True)
class SearchConfig:
    population_size: int = 100
    robustness_reps: int = 10
    p_gradient_descent: float = 0.0  # probability the weight change uses SGD
    # structural mutation rates
    p_add_node: float = 0.03
    p_add_connection: float = 0.05
    p_weight_mutation: float = 0.8
    crossover_rate: float = 0.75
    # speciation; the average-weight-difference term is deactivated
    compatibility_threshold: float = 3.0
    c_excess: float = 1.0
    c_disjoint: float = 1.0
    c_weight: float = 0.0
    survival_fraction: float = 0.3
    stale_generations: int = 15
    elite_species_size: int = 3  # species at least this big keep their champion
    # evaluation
    episode_ticks: int = 600
    max_generations: int = 200  # total budget across targets
    loss: LossConfig = field(default_factory=LossConfig)

    def __post_init__(self):
        if self.population_size < 2:
            raise ValueError("population_size must be >= 2")
        if self.robustness_reps < 1:
            raise ValueError("robustness_reps must be >= 1")
        for name in ("p_gradient_descent", "p_add_node", "p_add_connection",
                     "p_weight_mutation", "crossover_rate", "survival_fraction"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must be in [0, 1]")
        if self.c_weight != 0.0:
            raise ValueError("the weight-difference term is deactivated; c_weight must be 0")
        if self.compatibility_threshold <= 0:
            raise ValueError("compatibility_threshold must be positive")
        if self.episode_ticks < 1:
            raise ValueError("episode_ticks must be >= 1")
        if self.max_generations < 1:
            raise ValueError("search budget must be positive")
        if self.stale_generations < 1:
            raise ValueError("stale_generations must be >= 1")
