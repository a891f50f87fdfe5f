"""NEAT population machinery: compatibility, crossover, speciation,
fitness sharing, and reproduction.

Scores are maximized here; the search loop converts its minimized
coverage distance into a score before calling epoch().  Mutation is a
callback so this module stays independent of the trace-training code.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from ..network import Genome, InnovationRegistry
from .config import SearchConfig

# classic NEAT: a gene disabled in either parent stays disabled this often
P_INHERIT_DISABLED = 0.75


def compatibility(g1: Genome, g2: Genome, c_excess: float = 1.0,
                  c_disjoint: float = 1.0, c_weight: float = 0.0) -> float:
    """c_excess*E/N + c_disjoint*D/N (+ c_weight*mean |dw|, deactivated by
    default).  N is the larger gene count, at least 1."""
    i1, i2 = set(g1.connections), set(g2.connections)
    if not i1 and not i2:
        return 0.0
    max1 = max(i1) if i1 else -1
    max2 = max(i2) if i2 else -1
    cutoff = min(max1, max2)
    mismatched = i1 ^ i2
    excess = sum(1 for i in mismatched if i > cutoff)
    disjoint = len(mismatched) - excess
    n = max(len(i1), len(i2), 1)
    d = (c_excess * excess + c_disjoint * disjoint) / n
    if c_weight != 0.0:
        matching = i1 & i2
        if matching:
            dw = sum(abs(g1.connections[i].weight - g2.connections[i].weight)
                     for i in matching) / len(matching)
            d += c_weight * dw
    return d


def crossover(p1: Genome, p2: Genome, score1: float, score2: float,
              rng: np.random.Generator) -> Genome:
    """Innovation-aligned crossover: matching genes' weights come uniformly
    from either parent, disjoint and excess genes from the fitter parent
    (ties favor p1).  The child inherits the fitter parent's node set, so
    its full gene graph equals the fitter's and stays acyclic."""
    if score2 > score1:
        p1, p2 = p2, p1
    child = p1.copy()
    for innov, gene in child.connections.items():
        other = p2.connections.get(innov)
        if other is None:
            continue
        if rng.random() < 0.5:
            gene.weight = other.weight
        if not gene.enabled or not other.enabled:
            gene.enabled = not (rng.random() < P_INHERIT_DISABLED)
    return child


class Species:
    _next_id = 0

    def __init__(self, representative: Genome):
        self.id = Species._next_id
        Species._next_id += 1
        self.representative = representative
        self.members: list[int] = []  # population indices
        self.best_score = -np.inf
        self.staleness = 0


class NeatPopulation:
    """Fixed-size population with persistent species across generations."""

    def __init__(self, genomes: list[Genome], registry: InnovationRegistry,
                 config: SearchConfig, rng: np.random.Generator):
        if len(genomes) != config.population_size:
            raise ValueError("initial population size does not match config")
        self.genomes = genomes
        self.registry = registry
        self.config = config
        self.rng = rng
        self.species: list[Species] = []

    def speciate(self):
        cfg = self.config
        for sp in self.species:
            sp.members = []
        for idx, g in enumerate(self.genomes):
            for sp in self.species:
                if compatibility(g, sp.representative, cfg.c_excess, cfg.c_disjoint,
                                 cfg.c_weight) < cfg.compatibility_threshold:
                    sp.members.append(idx)
                    break
            else:
                sp = Species(g)
                sp.members.append(idx)
                self.species.append(sp)
        self.species = [sp for sp in self.species if sp.members]
        for sp in self.species:
            sp.representative = self.genomes[sp.members[0]]

    def epoch(self, scores: list[float], mutate: Callable[[Genome], Genome]):
        """One generation: speciate on current genomes, allocate offspring by
        mean score (fitness sharing), reproduce, and replace the population."""
        cfg = self.config
        rng = self.rng
        self.speciate()
        champion_idx = int(np.argmax(scores))

        for sp in self.species:
            best = max(scores[i] for i in sp.members)
            if best > sp.best_score:
                sp.best_score = best
                sp.staleness = 0
            else:
                sp.staleness += 1
        # stale species die; the one holding the population champion survives
        alive = [sp for sp in self.species
                 if sp.staleness < cfg.stale_generations or champion_idx in sp.members]
        if alive:
            self.species = alive

        means = np.array([np.mean([scores[i] for i in sp.members]) for sp in self.species])
        if means.sum() <= 0:
            shares = np.full(len(means), 1.0 / len(means))
        else:
            shares = means / means.sum()
        quotas = shares * cfg.population_size
        counts = np.floor(quotas).astype(int)
        # largest-remainder rounding keeps the population size constant
        for k in np.argsort(-(quotas - counts))[: cfg.population_size - counts.sum()]:
            counts[k] += 1

        next_gen: list[Genome] = []
        for sp, n_off in zip(self.species, counts):
            if n_off == 0:
                continue
            ranked = sorted(sp.members, key=lambda i: scores[i], reverse=True)
            if len(ranked) >= cfg.elite_species_size:
                next_gen.append(self.genomes[ranked[0]].copy())
                n_off -= 1
            n_parents = max(1, round(cfg.survival_fraction * len(ranked)))
            pool = ranked[:n_parents]
            for _ in range(n_off):
                if len(pool) > 1 and rng.random() < cfg.crossover_rate:
                    i1, i2 = rng.choice(len(pool), 2, replace=False)
                    a, b = pool[int(i1)], pool[int(i2)]
                    child = crossover(self.genomes[a], self.genomes[b],
                                      scores[a], scores[b], rng)
                else:
                    child = self.genomes[int(pool[int(rng.integers(len(pool)))])].copy()
                next_gen.append(mutate(child))
        # rounding starvation: pad with mutated copies of the champion
        while len(next_gen) < cfg.population_size:
            next_gen.append(mutate(self.genomes[champion_idx].copy()))
        self.genomes = next_gen[: cfg.population_size]
