"""Mann-Whitney statistics and the experiment-matrix runner."""

import math
import os

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from evoplay.experiments import (
    ExperimentPlan,
    PlanCell,
    _exact_p,
    _normal_p,
    format_report,
    mann_whitney_u,
    run_plan,
    time_to_coverage,
    write_report,
)
from evoplay.search import SearchConfig

samples = st.lists(st.integers(min_value=0, max_value=9).map(float),
                   min_size=1, max_size=7)


class TestMannWhitney:
    def test_frozen_separated_samples(self):
        # all of B above all of A: U=0, exact p = 2 * 1/C(6,3) = 0.1
        u, p = mann_whitney_u([1.0, 2.0, 3.0], [4.0, 5.0, 6.0])
        assert u == 0.0
        assert p == pytest.approx(0.1)

    def test_midranks_for_ties(self):
        # pooled ranks of [1, 2, 2, 3] are 1, 2.5, 2.5, 4
        u, _ = mann_whitney_u([1.0, 2.0], [2.0, 3.0])
        assert u == 0.5

    def test_identical_samples(self):
        u, p = mann_whitney_u([5.0, 5.0, 5.0], [5.0, 5.0, 5.0])
        assert u == 4.5  # nm/2
        assert p == 1.0

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            mann_whitney_u([], [1.0])
        with pytest.raises(ValueError):
            mann_whitney_u([1.0], [])

    @given(samples, samples)
    @settings(max_examples=40, deadline=None)
    def test_u_values_sum_to_nm(self, a, b):
        u_ab, p_ab = mann_whitney_u(a, b)
        u_ba, p_ba = mann_whitney_u(b, a)
        assert u_ab + u_ba == pytest.approx(len(a) * len(b))
        assert p_ab == pytest.approx(p_ba)

    @given(samples, samples)
    @settings(max_examples=40, deadline=None)
    def test_p_is_a_probability(self, a, b):
        _, p = mann_whitney_u(a, b)
        assert 0.0 <= p <= 1.0

    def test_large_samples_use_normal_path(self):
        a = [float(i) for i in range(15)]
        b = [float(i) + 0.5 for i in range(12)]
        u, p = mann_whitney_u(a, b)
        scipy_stats = pytest.importorskip("scipy.stats")
        ref = scipy_stats.mannwhitneyu(a, b, alternative="two-sided",
                                       method="asymptotic")
        assert u == pytest.approx(ref.statistic)
        assert p == pytest.approx(ref.pvalue, abs=1e-3)

    def test_exact_path_matches_scipy(self):
        scipy_stats = pytest.importorskip("scipy.stats")
        a = [3.0, 9.0, 1.0, 7.0]
        b = [4.0, 2.0, 8.0]
        u, p = mann_whitney_u(a, b)
        ref = scipy_stats.mannwhitneyu(a, b, alternative="two-sided",
                                       method="exact")
        assert u == pytest.approx(ref.statistic)
        assert p == pytest.approx(ref.pvalue, abs=1e-9)

    def test_exact_and_normal_agree_on_a_clear_case(self):
        values = [1.0, 2.0, 3.0, 4.0, 10.0, 11.0, 12.0, 13.0, 5.0, 6.0]
        n, m = 6, 4
        u = 8.0  # U of the first six values vs the rest
        assert abs(_exact_p(values, n, m, u) - _normal_p(values, n, m, u)) < 0.05

    def test_degenerate_variance_gives_one(self):
        assert _normal_p([2.0] * 8, 4, 4, 8.0) == 1.0


class TestTimeToCoverage:
    SERIES = [(0, 2), (100, 5), (250, 9)]

    def test_first_crossing(self):
        assert time_to_coverage(self.SERIES, 5) == 100
        assert time_to_coverage(self.SERIES, 3) == 100
        assert time_to_coverage(self.SERIES, 9) == 250

    def test_met_at_start(self):
        assert time_to_coverage(self.SERIES, 0) == 0
        assert time_to_coverage(self.SERIES, 2) == 0

    def test_never_reached(self):
        assert time_to_coverage(self.SERIES, 10) is None
        assert time_to_coverage([], 1) is None


class TestPlanValidation:
    def test_cell_kind(self):
        with pytest.raises(ValueError, match="cell kind"):
            PlanCell("x", kind="exhaustive")

    def test_default_seeds(self):
        plan = ExperimentPlan(games=["g"], cells=[PlanCell("a")], repetitions=4)
        assert plan.seeds == [1, 2, 3, 4]

    def test_seed_rules(self):
        with pytest.raises(ValueError, match="distinct"):
            ExperimentPlan(games=["g"], cells=[PlanCell("a")],
                           repetitions=2, seeds=[5, 5])
        with pytest.raises(ValueError, match="seed"):
            ExperimentPlan(games=["g"], cells=[PlanCell("a")],
                           repetitions=3, seeds=[1, 2])
        with pytest.raises(ValueError):
            ExperimentPlan(games=["g"], cells=[PlanCell("a")], repetitions=0)


def tiny_cfg():
    return SearchConfig(population_size=8, max_generations=2,
                        episode_ticks=80, robustness_reps=1)


def tiny_plan(**kw):
    defaults = dict(
        games=["fruit_catch"],
        cells=[
            PlanCell("neat", config=tiny_cfg()),
            PlanCell("rand", kind="random", budget_ticks=600),
        ],
        repetitions=3,
        baseline="rand",
    )
    defaults.update(kw)
    return ExperimentPlan(**defaults)


class TestRunPlan:
    def test_matrix_arithmetic(self):
        report = run_plan(tiny_plan())
        assert len(report.rows) == 2  # 1 game x 2 cells
        for row in report.rows:
            assert len(row.runs) == 3
            assert [r.seed for r in row.runs] == [1, 2, 3]

    def test_baseline_gets_no_p_value(self):
        report = run_plan(tiny_plan())
        assert report.row("fruit_catch", "rand").p_vs_baseline is None
        p = report.row("fruit_catch", "neat").p_vs_baseline
        assert p is not None and 0.0 <= p <= 1.0

    def test_identical_cells_identical_rows(self):
        plan = tiny_plan(cells=[
            PlanCell("a", config=tiny_cfg()),
            PlanCell("b", config=tiny_cfg()),
        ], baseline="")
        report = run_plan(plan)
        a, b = report.row("fruit_catch", "a"), report.row("fruit_catch", "b")
        assert a.runs == b.runs

    def test_missing_dataset_fails_only_its_cell(self):
        plan = tiny_plan(cells=[
            PlanCell("broken", config=tiny_cfg(), dataset="/does/not/exist-{game}.jsonl"),
            PlanCell("rand", kind="random", budget_ticks=600),
        ])
        report = run_plan(plan)
        broken = report.row("fruit_catch", "broken")
        assert broken.failed and broken.error
        assert broken.runs == [] and broken.p_vs_baseline is None
        ok = report.row("fruit_catch", "rand")
        assert not ok.failed and len(ok.runs) == 3

    def test_deterministic(self):
        r1, r2 = run_plan(tiny_plan()), run_plan(tiny_plan())
        assert format_report(r1) == format_report(r2)
        for a, b in zip(r1.rows, r2.rows):
            assert a.runs == b.runs


class TestReportOutput:
    def test_format_marks_failures_and_significance(self):
        plan = tiny_plan(cells=[
            PlanCell("broken", config=tiny_cfg(), dataset="/nope-{game}.jsonl"),
            PlanCell("rand", kind="random", budget_ticks=600),
        ])
        text = format_report(run_plan(plan))
        assert "FAILED" in text
        assert text.splitlines()[0].startswith("game")

    def test_write_report_inventory(self, tmp_path):
        report = run_plan(tiny_plan())
        out = tmp_path / "exp"
        write_report(report, str(out))
        files = sorted(os.listdir(out))
        assert "report.txt" in files
        assert "fruit_catch__neat.tsv" in files
        assert "fruit_catch__neat.series.tsv" in files
        assert "fruit_catch__rand.tsv" in files
        body = (out / "fruit_catch__neat.tsv").read_text().splitlines()
        assert body[0].split("\t") == ["seed", "coverage", "won", "generations",
                                       "ticks", "timeout", "full_coverage_tick"]
        assert len(body) == 4

    def test_plot_written_when_asked(self, tmp_path):
        pytest.importorskip("matplotlib")
        report = run_plan(tiny_plan())
        out = tmp_path / "exp"
        write_report(report, str(out), plot=True)
        assert (out / "coverage.png").exists()

    def test_failed_rows_have_no_files(self, tmp_path):
        plan = tiny_plan(cells=[
            PlanCell("broken", config=tiny_cfg(), dataset="/nope-{game}.jsonl"),
            PlanCell("rand", kind="random", budget_ticks=600),
        ])
        out = tmp_path / "exp"
        write_report(run_plan(plan), str(out))
        assert not (out / "fruit_catch__broken.tsv").exists()


class TestStatsMedian:
    def test_median_generations(self):
        from evoplay.experiments import ReportRow, RunRow

        def run(gens):
            return RunRow(seed=0, coverage=0.5, won=False, generations=gens,
                          ticks=0, timeout=False, full_coverage_tick=None,
                          timeline=[])

        row = ReportRow(game="g", label="l", runs=[run(5), run(1), run(9)])
        assert row.median_generations == 5
        row.runs.append(run(7))
        assert row.median_generations == 6.0
        assert math.isnan(ReportRow(game="g", label="l").median_generations)
