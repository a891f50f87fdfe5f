"""End-to-end acceptance checks with frozen tolerances.

Covers the gradient kernels against finite differences, the exact SGD
update on hand-computable fixtures, early-stopping semantics, recorder
no-op sweeps, whole-search determinism, the reliability filter, weight
blindness of speciation, both directional dataset experiments, and the
rank-test approximation gap.  The two directional tests share cached
search arms; everything here is deterministic.
"""

import functools
import hashlib
import itertools
import json
import math
import statistics
import time

import numpy as np

from evoplay import training
from evoplay.actions import ActionLabel, ActionSchema, ActionSpec
from evoplay.engine import X_MAX, X_MIN, Y_MAX, Y_MIN
from evoplay.experiments import _exact_p, _normal_p, _u_statistic, mann_whitney_u, time_to_coverage
from evoplay.network import (
    ConnectionGene,
    Genome,
    NodeGene,
    add_connection,
    add_node,
    compile_network,
    kernels as K,
    output_nodes,
    perturb_weights,
)
from evoplay.recording import RecorderConfig, Snapshot
from evoplay.recording.data import stats as dataset_stats
from evoplay.recording.experts import TICKS_PER_MINUTE, record_expert_dataset
from evoplay.recording.recorder import rederive
from evoplay.search import EpisodeResult, SearchConfig, compatibility, robustness_check, save_suite, search
from evoplay.training import LossConfig, backward, sgd_step

from conftest import make_genome

GAMES = ("paddle_ball", "flap_bird", "fruit_catch", "snake_grid", "dot_chase")

RQ_SEEDS = tuple(range(1, 11))
RQ_POP = 24
RQ_BUDGET = 200


def _random_label(schema: ActionSchema, rng: np.random.Generator) -> ActionLabel:
    spec = schema.actions[int(rng.integers(schema.n_actions))]
    if spec.kind == "key_press":
        return ActionLabel("key_press", key=spec.key,
                           duration=int(rng.integers(1, schema.d_max + 1)))
    if spec.kind == "noop":
        return ActionLabel("noop", duration=int(rng.integers(1, schema.w_max + 1)))
    return ActionLabel(spec.kind, x=float(rng.uniform(X_MIN, X_MAX)),
                       y=float(rng.uniform(Y_MIN, Y_MAX)))


def _snapshots(schema: ActionSchema, n_inputs: int, count: int, seed: int) -> list[Snapshot]:
    rng = np.random.default_rng(seed)
    return [Snapshot(rng.uniform(-1.0, 1.0, n_inputs), _random_label(schema, rng), t)
            for t in range(count)]


@functools.cache
def _expert_dataset(game: str, delta_t: float):
    """One minute of scripted-expert play; finite delta_t rederives the
    exact same raw event logs with no-ops synthesized."""
    ds = record_expert_dataset(game, TICKS_PER_MINUTE, seed=0)
    if math.isinf(delta_t):
        return ds
    return rederive(ds, RecorderConfig(delta_t=delta_t))


@functools.cache
def _search_arm(game: str, delta_t: float, p: float):
    """Per-seed (generations, ticks-to-full-coverage) for one config cell."""
    ds = _expert_dataset(game, delta_t)
    gens, ttcs = [], []
    for s in RQ_SEEDS:
        cfg = SearchConfig(population_size=RQ_POP, max_generations=RQ_BUDGET,
                           p_gradient_descent=p)
        _, st = search(game, ds, cfg, seed=s)
        t = time_to_coverage(st.timeline, st.n_statements)
        gens.append(st.total_generations)
        ttcs.append(math.inf if t is None else float(t))
    return tuple(gens), tuple(ttcs)


class TestGradientOracle:
    def test_analytic_matches_central_differences(self):
        """100 random genomes x snapshots, eps=1e-5, max rel err <= 1e-4."""
        eps = 1e-5
        t0 = time.monotonic()
        worst = 0.0
        for i in range(100):
            genome, reg, schema, n_in = make_genome(GAMES[i % len(GAMES)], seed=i)
            rng = np.random.default_rng(1000 + i)
            perturb_weights(genome, rng)
            for _ in range(i % 3):
                add_node(genome, reg, rng)
                add_connection(genome, reg, rng)
            x = rng.uniform(-1.0, 1.0, n_in)
            label = _random_label(schema, rng)
            tape = backward(genome, x, label, schema)
            net = compile_network(genome, schema)
            y_i = schema.label_index(label)
            y_params = schema.normalized_params(label)
            mask = schema.reg_mask(y_i)
            w0 = net.w.copy()
            for k, innov in enumerate(net.conn_innov):
                net.w[k] = w0[k] + eps
                probs, params = net.predict(x)
                up = float(K.sample_loss(probs, params, y_i, y_params, mask))
                net.w[k] = w0[k] - eps
                probs, params = net.predict(x)
                dn = float(K.sample_loss(probs, params, y_i, y_params, mask))
                net.w[k] = w0[k]
                fd = (up - dn) / (2.0 * eps)
                g = tape.gradients[int(innov)]
                scale = max(abs(g), abs(fd))
                # below this both sides are zero up to differencing noise
                if scale >= 1e-6:
                    worst = max(worst, abs(g - fd) / scale)
        assert worst <= 1e-4
        assert time.monotonic() - t0 < 30.0

    @staticmethod
    def _one_connection_genome(schema: ActionSchema, dst: int, weight: float) -> Genome:
        nodes = {0: NodeGene(0, "input"), 1: NodeGene(1, "bias")}
        for n in output_nodes(1, schema):
            nodes[n.id] = n
        return Genome(nodes=nodes,
                      connections={0: ConnectionGene(0, dst, weight, True, 0)})

    def test_sgd_step_exact_on_class_head(self):
        """Single input->class connection: dL/dw = (p0 - 1) * x, and the
        update is literally w - alpha * grad."""
        schema = ActionSchema((ActionSpec("key_press", key="z"), ActionSpec("noop")),
                              d_max=5, w_max=9)
        g = self._one_connection_genome(schema, dst=2, weight=0.5)
        x = np.array([2.0])
        # duration 3 normalizes to 0, so the regression term vanishes
        label = ActionLabel("key_press", key="z", duration=3)
        tape = backward(g, x, label, schema)
        p0 = math.exp(1.0) / (math.exp(1.0) + 1.0)  # logits [w*x, 0] = [1, 0]
        assert math.isclose(tape.loss, -math.log(p0), rel_tol=0, abs_tol=1e-12)
        assert set(tape.gradients) == {0}
        grad = tape.gradients[0]
        assert math.isclose(grad, (p0 - 1.0) * 2.0, rel_tol=0, abs_tol=1e-12)
        out = sgd_step(g, tape, alpha=0.1)
        assert out.connections[0].weight == 0.5 - 0.1 * grad
        assert g.connections[0].weight == 0.5  # input untouched

    def test_sgd_step_exact_on_regression_head(self):
        """Single input->duration-head connection: dL/dw = 2(a-y)(1-a^2)x."""
        schema = ActionSchema((ActionSpec("key_press", key="z"), ActionSpec("noop")),
                              d_max=5, w_max=9)
        g = self._one_connection_genome(schema, dst=4, weight=0.3)
        x = np.array([1.0])
        label = ActionLabel("key_press", key="z", duration=2)  # y = -0.5
        tape = backward(g, x, label, schema)
        a = math.tanh(0.3)
        want_loss = -math.log(0.5) + (a - (-0.5)) ** 2
        assert math.isclose(tape.loss, want_loss, rel_tol=0, abs_tol=1e-12)
        grad = tape.gradients[0]
        assert math.isclose(grad, 2.0 * (a + 0.5) * (1.0 - a * a) * 1.0,
                            rel_tol=0, abs_tol=1e-12)
        out = sgd_step(g, tape, alpha=0.05)
        assert out.connections[0].weight == 0.3 - 0.05 * grad


class TestEarlyStopping:
    def test_scripted_plateau_stops_after_patience(self, monkeypatch):
        """Loss improves 5 epochs then plateaus 40: training must stop at
        epoch 5+30 (default patience) and restore the epoch-5 weights."""
        genome, _, schema, n_in = make_genome("paddle_ball", seed=5)
        snaps = _snapshots(schema, n_in, 10, seed=0)
        w0 = compile_network(genome, schema).w.copy()
        curve = iter([10.0, 9.0, 8.0, 7.0, 6.0, 5.0] + [5.5] * 40)
        epochs = 0

        def fake_batch_loss(*args):
            return next(curve)

        def fake_sgd_epoch(*args):
            nonlocal epochs
            epochs += 1
            args[5][:] += 1.0  # one unit of drift per epoch

        monkeypatch.setattr(training.K, "batch_loss", fake_batch_loss)
        monkeypatch.setattr(training.K, "sgd_epoch", fake_sgd_epoch)
        out = training.train(genome, snaps, schema, LossConfig())
        assert epochs == 35
        assert np.array_equal(compile_network(out, schema).w, w0 + 5.0)

    def test_monitored_minimum_restored_on_random_runs(self, monkeypatch):
        """20 random runs: the returned weights are exactly the ones that
        produced the smallest monitored loss."""
        real = training.K.batch_loss
        seen: list[tuple[float, np.ndarray]] = []

        def spy(*args):
            v = float(real(*args))
            seen.append((v, np.array(args[5])))
            return v

        monkeypatch.setattr(training.K, "batch_loss", spy)
        for r in range(20):
            genome, _, schema, n_in = make_genome("paddle_ball", seed=200 + r)
            snaps = _snapshots(schema, n_in, 12, seed=r)
            seen.clear()
            out = training.train(genome, snaps, schema,
                                 LossConfig(patience=3, max_epochs=25),
                                 rng=np.random.default_rng(r))
            best = min(range(len(seen)), key=lambda k: seen[k][0])
            assert np.array_equal(compile_network(out, schema).w, seen[best][1])


class TestRecorderSweep:
    def test_noop_counts_over_delta_sweep(self):
        """Same raw logs: infinite delta_t gives a 0.00 no-op share and the
        count never increases along 10 -> 100 -> infinity."""
        t0 = time.monotonic()
        for game, seed in (("paddle_ball", 3), ("fruit_catch", 4)):
            raw = record_expert_dataset(game, TICKS_PER_MINUTE, seed=seed)
            counts = []
            for dt in (10.0, 100.0, math.inf):
                d = rederive(raw, RecorderConfig(delta_t=dt))
                counts.append(sum(1 for s in d.all_snapshots() if s.label.kind == "noop"))
            assert counts[0] >= counts[1] >= counts[2]
            assert counts[2] == 0
            assert dataset_stats(rederive(raw, RecorderConfig(delta_t=math.inf))).noop_proportion == 0.0
        assert time.monotonic() - t0 < 5.0


class TestSearchDeterminism:
    def test_same_seed_twice_hashes_equal(self, tmp_path):
        """Full search on the mouse-paddle game, fixed seed, run twice:
        identical suite bytes, stats, and coverage timeline."""
        t0 = time.monotonic()

        def run(tag: str):
            cfg = SearchConfig(population_size=24, max_generations=200,
                               p_gradient_descent=0.5)
            suite, st = search("paddle_ball", _expert_dataset("paddle_ball", math.inf),
                               cfg, seed=2026)
            p = tmp_path / f"suite_{tag}.jsonl"
            save_suite(suite, str(p))
            sha = hashlib.sha256
            return (sha(p.read_bytes()).hexdigest(),
                    sha(json.dumps(st.to_dict(), sort_keys=True).encode()).hexdigest(),
                    sha(json.dumps([list(t) for t in st.timeline]).encode()).hexdigest())

        assert run("a") == run("b")
        assert time.monotonic() - t0 < 300.0


class _PlantedRunner:
    """Covers the target per seed with fixed reliability; no game involved."""

    def __init__(self, aschema: ActionSchema, reliability: float):
        self.aschema = aschema
        self.reliability = reliability
        self.calls = 0

    def run(self, net, seed: int, target: int) -> EpisodeResult:
        self.calls += 1
        cov = (self.reliability >= 1.0
               or float(np.random.default_rng(seed).random()) < self.reliability)
        return EpisodeResult(covered=frozenset(), ticks=0, won=False,
                             target_covered=cov, fitness=0.0 if cov else 1.0)


class TestRobustnessFilter:
    def test_half_reliable_genome_fails_the_check(self):
        """A 50%-reliable coverer must fail the 10-rep check in >= 99% of
        1000 trials (pass chance is 0.5^10)."""
        genome, _, schema, _ = make_genome("paddle_ball", seed=0)
        runner = _PlantedRunner(schema, reliability=0.5)
        passes = sum(
            robustness_check(genome, runner, 5, 10, np.random.default_rng(40_000 + t))[0]
            for t in range(1000))
        assert 1000 - passes >= 990

    def test_deterministic_coverer_always_passes(self):
        genome, _, schema, _ = make_genome("paddle_ball", seed=0)
        runner = _PlantedRunner(schema, reliability=1.0)
        for t in range(10):
            ok, seeds = robustness_check(genome, runner, 5, 10,
                                         np.random.default_rng(t))
            assert ok and len(seeds) == 10
        assert runner.calls == 100  # never short-circuits


class TestSpeciationWeightBlindness:
    def test_scaled_weights_are_zero_distance(self):
        genome, _, _, _ = make_genome("paddle_ball", seed=1)
        for k in (10.0, 0.1, 7.0):
            scaled = genome.copy()
            for c in scaled.connections.values():
                c.weight *= k
            assert compatibility(genome, scaled) == 0.0
            assert compatibility(scaled, genome) == 0.0


class TestDirectionalExperiments:
    def test_sgd_mutation_beats_pure_neat(self):
        """One minute of expert play (infinite delta_t): median generations
        to full coverage at p=1.0 beats p=0.0 on both games, Mann-Whitney
        two-sided p < 0.1, within the 200-generation budget per run."""
        t0 = time.monotonic()
        for game in ("paddle_ball", "fruit_catch"):
            g_sgd, _ = _search_arm(game, math.inf, 1.0)
            g_neat, _ = _search_arm(game, math.inf, 0.0)
            assert max(*g_sgd, *g_neat) <= RQ_BUDGET
            assert statistics.median(g_sgd) < statistics.median(g_neat)
            _, p = mann_whitney_u([float(v) for v in g_sgd],
                                  [float(v) for v in g_neat])
            assert p < 0.1
        assert time.monotonic() - t0 < 3600.0

    def test_noop_heavy_dataset_is_no_faster(self):
        """Same raw logs, same budget and seeds: the delta_t=10 dataset may
        not reach full coverage faster than the no-op-free one."""
        _, t_inf = _search_arm("paddle_ball", math.inf, 1.0)
        _, t_10 = _search_arm("paddle_ball", 10.0, 1.0)
        assert statistics.median(t_10) >= statistics.median(t_inf)


class TestMannWhitneyOracle:
    def test_exact_is_the_path_for_small_samples(self):
        rng = np.random.default_rng(9)
        for n, m in itertools.product(range(1, 7), range(1, 7)):
            a = [float(v) for v in rng.permutation(100)[:n]]
            b = [float(v) for v in rng.permutation(200)[n:n + m]]
            values = a + b
            u, p = mann_whitney_u(a, b)
            assert p == _exact_p(values, n, m, u)

    def test_normal_approximation_within_tolerance_at_six(self):
        """All 924 untied rank assignments at n = m = 6: exact enumeration
        and the normal approximation agree within 0.02."""
        values = [float(v) for v in range(12)]
        us = {_u_statistic(values, comb, 6, 6)
              for comb in itertools.combinations(range(12), 6)}
        assert us == {float(u) for u in range(37)}
        worst = max(abs(_exact_p(values, 6, 6, u) - _normal_p(values, 6, 6, u))
                    for u in us)
        assert worst <= 0.02
