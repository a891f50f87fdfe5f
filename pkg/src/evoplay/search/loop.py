"""The coverage-driven search: CDG target selection, genome-as-policy
episode execution, fitness from approach level + branch distance,
robustness checking, and dynamic suite assembly.

The evolved network is queried at decision points; the decoded action
then plays out (a key is held for its predicted duration, a no-op waits,
mouse events take effect for one tick) before the next query.  This
mirrors the trace-label semantics, where durations are part of the label.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from ..actions import ActionSchema, action_schema
from ..engine import (
    ControlDependenceGraph,
    GameInstance,
    GameProgram,
    GameSpec,
    InputEvent,
    approach_level,
    branch_distance,
    load_game,
)
from ..features import FeatureSchema, feature_schema
from ..network import (
    Genome,
    InnovationRegistry,
    Prediction,
    add_connection,
    add_node,
    compile_network,
    decode_label,
    initial_genome,
)
from ..recording.data import TrainingDataset
from ..training import hybrid_weight_change
from .config import SearchConfig
from .neat import NeatPopulation
from .suite import DynamicTestSuite, SuiteEntry

SEED_RANGE = 2**31 - 1


@dataclass
class EpisodeResult:
    covered: frozenset[int]
    ticks: int
    won: bool
    target_covered: bool
    fitness: float


@dataclass
class SearchStats:
    game_id: str
    seed: int
    p_gradient_descent: float
    timeline: list[tuple[int, int]] = field(default_factory=list)  # (ticks, covered)
    generations_per_target: list[tuple[int, int, bool]] = field(default_factory=list)
    total_generations: int = 0
    total_ticks: int = 0
    sgd_invocations: int = 0
    timeout: bool = False
    covered: frozenset[int] = frozenset()
    n_statements: int = 0
    won: bool = False
    suite_size: int = 0

    @property
    def coverage_fraction(self) -> float:
        return len(self.covered) / self.n_statements if self.n_statements else 0.0

    def to_dict(self) -> dict:
        return {
            "game_id": self.game_id, "seed": self.seed,
            "p_gradient_descent": self.p_gradient_descent,
            "timeline": [list(t) for t in self.timeline],
            "generations_per_target": [list(t) for t in self.generations_per_target],
            "total_generations": self.total_generations,
            "total_ticks": self.total_ticks,
            "sgd_invocations": self.sgd_invocations,
            "timeout": self.timeout,
            "covered": sorted(self.covered),
            "n_statements": self.n_statements,
            "won": self.won,
            "suite_size": self.suite_size,
        }

    @staticmethod
    def from_dict(d: dict) -> "SearchStats":
        return SearchStats(
            game_id=d["game_id"], seed=d["seed"],
            p_gradient_descent=d["p_gradient_descent"],
            timeline=[tuple(t) for t in d["timeline"]],
            generations_per_target=[tuple(t) for t in d["generations_per_target"]],
            total_generations=d["total_generations"], total_ticks=d["total_ticks"],
            sgd_invocations=d["sgd_invocations"], timeout=d["timeout"],
            covered=frozenset(d["covered"]), n_statements=d["n_statements"],
            won=d["won"], suite_size=d["suite_size"],
        )


def save_stats(stats: SearchStats, path: str):
    with open(path, "w") as f:
        json.dump(stats.to_dict(), f, indent=1)


def load_stats(path: str) -> SearchStats:
    with open(path) as f:
        return SearchStats.from_dict(json.load(f))


def select_target(cdg: ControlDependenceGraph, covered: frozenset[int]) -> int | None:
    """Breadth-first over the CDG from the entry statements: the first
    uncovered statement whose parent is covered; lowest id first per level."""
    queue = sorted(cdg.entries)
    seen = set(queue)
    while queue:
        nxt: list[int] = []
        for node in queue:
            for child in sorted(cdg.children.get(node, ())):
                if child in seen:
                    continue
                seen.add(child)
                if child not in covered and node in covered:
                    return child
                nxt.append(child)
        queue = nxt
    return None


class EpisodeRunner:
    """Executes genomes (or any predict(x) callable) as input generators."""

    def __init__(self, game: str | GameSpec | GameProgram, config: SearchConfig,
                 aschema: ActionSchema | None = None):
        self.instance = load_game(game)
        self.program = self.instance.program
        self.fschema: FeatureSchema = feature_schema(self.program)
        self.aschema = aschema or action_schema(self.program)
        self.episode_ticks = config.episode_ticks

    def run(self, net, game_seed: int, target: int = -1) -> EpisodeResult:
        inst = self.instance
        inst.reset(game_seed)
        remaining = self.episode_ticks
        used = 0
        target_covered = False
        while remaining > 0 and not inst.game_over and not target_covered:
            x = self.fschema.extract_vector(inst.state)
            probs, params = net.predict(x)
            label = decode_label(Prediction(probs, params), self.aschema)
            if label.kind == "key_press":
                inst.apply_event(InputEvent("key_down", key=label.key))
                hold = min(label.duration, remaining)
                ct, _, done = inst.run_ticks(hold, target)
                if not inst.game_over:
                    inst.apply_event(InputEvent("key_up", key=label.key))
            elif label.kind == "noop":
                ct, _, done = inst.run_ticks(min(label.duration, remaining), target)
            else:
                inst.apply_event(InputEvent(label.kind, x=label.x, y=label.y))
                ct, _, done = inst.run_ticks(1, target)
            remaining -= done
            used += done
            if ct >= 0:
                target_covered = True
        covered = inst.covered_ids()
        if target >= 0:
            fitness = 0.0 if target_covered else (
                approach_level(inst, target) + branch_distance(inst, target))
        else:
            fitness = 0.0
        return EpisodeResult(covered=covered, ticks=used, won=inst.won,
                             target_covered=target_covered, fitness=fitness)


def robustness_check(genome: Genome, runner: EpisodeRunner, target: int,
                     reps: int, rng: np.random.Generator) -> tuple[bool, list[int]]:
    """Pass iff the genome re-covers the target on `reps` fresh seeds."""
    seeds = [int(rng.integers(SEED_RANGE)) for _ in range(reps)]
    net = compile_network(genome, runner.aschema)
    for s in seeds:
        if not runner.run(net, s, target).target_covered:
            return False, seeds
    return True, seeds


def _seed_population(n: int, n_inputs: int, aschema: ActionSchema,
                     suite: DynamicTestSuite, registry: InnovationRegistry,
                     rng: np.random.Generator) -> list[Genome]:
    """Fresh initial genomes, with copies of all suite genomes injected
    first (prior solutions seed the next target's search)."""
    genomes: list[Genome] = [e.genome.copy() for e in suite.entries[-n:]]
    while len(genomes) < n:
        genomes.append(initial_genome(n_inputs, aschema, registry, rng))
    return genomes[:n]


def search(game: str | GameSpec | GameProgram, dataset: TrainingDataset | None,
           config: SearchConfig | None = None, seed: int = 0,
           ) -> tuple[DynamicTestSuite, SearchStats]:
    """Coverage-driven NEAT over CDG targets; returns the reliable-genome
    suite and the run statistics."""
    config = config or SearchConfig()
    rng = np.random.default_rng(seed)
    runner = EpisodeRunner(game, config)
    program = runner.program
    cdg = program.cdg
    n_inputs = len(runner.fschema)
    aschema = runner.aschema
    # an empty dataset cannot train anything: force pure perturbation
    p_sgd = config.p_gradient_descent if dataset and dataset.sessions else 0.0
    registry = InnovationRegistry()

    suite = DynamicTestSuite(game_id=program.spec.id)
    stats = SearchStats(game_id=program.spec.id, seed=seed,
                        p_gradient_descent=config.p_gradient_descent,
                        n_statements=program.n_ids)
    covered = runner.instance.covered_ids()
    stats.timeline.append((0, len(covered)))

    current_target = -1

    def mutate(g: Genome) -> Genome:
        u = rng.random()
        if u < config.p_add_node:
            add_node(g, registry, rng)
        elif u < config.p_add_node + config.p_add_connection:
            add_connection(g, registry, rng)
        if rng.random() < config.p_weight_mutation:
            res = hybrid_weight_change(g, dataset, current_target, p_sgd,
                                       aschema, config.loss, rng)
            stats.sgd_invocations += res.used_sgd
            g = res.genome
        return g

    budget = config.max_generations
    while stats.total_generations < budget:
        target = select_target(cdg, covered)
        if target is None:
            break
        current_target = target
        population = NeatPopulation(
            _seed_population(config.population_size, n_inputs, aschema, suite,
                             registry, rng),
            registry, config, rng)
        gens_here = 0
        achieved = False
        while stats.total_generations < budget:
            game_seed = int(rng.integers(SEED_RANGE))
            results: list[EpisodeResult] = []
            for g in population.genomes:
                r = runner.run(compile_network(g, aschema), game_seed, target)
                results.append(r)
                covered |= r.covered
                stats.total_ticks += r.ticks
                stats.won = stats.won or r.won
            gens_here += 1
            stats.total_generations += 1
            for idx, r in enumerate(results):
                if not r.target_covered:
                    continue
                ok, seeds = robustness_check(population.genomes[idx], runner,
                                             target, config.robustness_reps, rng)
                if ok:
                    suite.entries.append(SuiteEntry(target, population.genomes[idx].copy(), seeds))
                    achieved = True
                    break
            stats.timeline.append((stats.total_ticks, len(covered)))
            if achieved:
                break
            scores = [1.0 / (1.0 + r.fitness) for r in results]
            population.epoch(scores, mutate)
        stats.generations_per_target.append((target, gens_here, achieved))
        if not achieved:
            stats.timeout = True
            break

    stats.covered = covered
    stats.suite_size = len(suite.entries)
    return suite, stats


def replay_suite(suite: DynamicTestSuite, game: str | GameSpec | GameProgram,
                 config: SearchConfig | None = None) -> list[tuple[int, bool]]:
    """Re-run every entry on its recorded robustness seeds; an entry passes
    when the target is re-covered on all of them."""
    runner = EpisodeRunner(game, config or SearchConfig())
    out: list[tuple[int, bool]] = []
    for e in suite.entries:
        net = compile_network(e.genome, runner.aschema)
        ok = all(runner.run(net, s, e.target).target_covered for s in e.seeds)
        out.append((e.target, ok))
    return out
