"""Desk-scale experiment matrices: search configs vs baselines across games,
with coverage/wins aggregation and Mann-Whitney significance testing.

Runs are deterministic given the plan's seed list; a missing dataset fails
only its own cell.
"""

from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass, field

from .recording.data import TrainingDataset, load_dataset
from .search import SearchConfig, SearchStats, random_tester, search

SIGNIFICANCE_LEVEL = 0.1  # two-sided threshold used in the reports


def _u_statistic(values: list[float], indices_a, n: int, m: int) -> float:
    in_a = set(indices_a)
    u = 0.0
    for i in in_a:
        for j in range(n + m):
            if j in in_a:
                continue
            if values[i] > values[j]:
                u += 1.0
            elif values[i] == values[j]:
                u += 0.5
    return u


def _exact_p(values: list[float], n: int, m: int, u_a: float) -> float:
    total = 0
    le = ge = 0
    for comb in itertools.combinations(range(n + m), n):
        u = _u_statistic(values, comb, n, m)
        total += 1
        le += u <= u_a
        ge += u >= u_a
    return min(1.0, 2.0 * min(le, ge) / total)


def _normal_p(values: list[float], n: int, m: int, u_a: float) -> float:
    mu = n * m / 2.0
    counts: dict[float, int] = {}
    for v in values:
        counts[v] = counts.get(v, 0) + 1
    big_n = n + m
    tie_term = sum(t**3 - t for t in counts.values())
    var = n * m / 12.0 * ((big_n + 1) - tie_term / (big_n * (big_n - 1)))
    if var <= 0 or u_a == mu:
        return 1.0
    z = (u_a - mu - math.copysign(0.5, u_a - mu)) / math.sqrt(var)
    return min(1.0, math.erfc(abs(z) / math.sqrt(2.0)))


def mann_whitney_u(sample_a: list[float], sample_b: list[float]) -> tuple[float, float]:
    """(U of sample_a, two-sided p).  Midranks for ties; exact enumeration
    of rank assignments when both samples have <= 8 values, otherwise the
    normal approximation with tie correction and continuity correction."""
    n, m = len(sample_a), len(sample_b)
    if n == 0 or m == 0:
        raise ValueError("mann_whitney_u needs nonempty samples")
    values = list(sample_a) + list(sample_b)
    u_a = _u_statistic(values, range(n), n, m)
    if n <= 8 and m <= 8:
        return u_a, _exact_p(values, n, m, u_a)
    return u_a, _normal_p(values, n, m, u_a)


def time_to_coverage(series: list[tuple[int, float]], level: float) -> int | None:
    """First tick at which the (monotone) coverage series reaches level."""
    for tick, value in series:
        if value >= level:
            return tick
    return None


@dataclass(frozen=True)
class PlanCell:
    label: str
    kind: str = "search"  # search | random
    config: SearchConfig = field(default_factory=SearchConfig)
    dataset: str | TrainingDataset | None = None  # path ({game} expands) or in-memory
    budget_ticks: int = 120_000  # random tester only

    def __post_init__(self):
        if self.kind not in ("search", "random"):
            raise ValueError(f"unknown cell kind {self.kind!r}")


@dataclass
class ExperimentPlan:
    games: list[str]
    cells: list[PlanCell]
    repetitions: int = 10
    seeds: list[int] = field(default_factory=list)
    baseline: str = ""  # label significance is computed against

    def __post_init__(self):
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        if not self.seeds:
            self.seeds = list(range(1, self.repetitions + 1))
        if len(set(self.seeds)) != len(self.seeds):
            raise ValueError("seeds must be distinct")
        if len(self.seeds) < self.repetitions:
            raise ValueError("need at least one seed per repetition")


@dataclass
class RunRow:
    seed: int
    coverage: float  # fraction
    won: bool
    generations: int
    ticks: int
    timeout: bool
    full_coverage_tick: int | None
    timeline: list[tuple[int, int]]


@dataclass
class ReportRow:
    game: str
    label: str
    failed: bool = False
    error: str = ""
    runs: list[RunRow] = field(default_factory=list)
    p_vs_baseline: float | None = None

    @property
    def mean_coverage(self) -> float:
        return sum(r.coverage for r in self.runs) / len(self.runs) if self.runs else 0.0

    @property
    def wins(self) -> int:
        return sum(r.won for r in self.runs)

    @property
    def median_generations(self) -> float:
        if not self.runs:
            return math.nan
        vals = sorted(r.generations for r in self.runs)
        k = len(vals)
        return (vals[k // 2] if k % 2 else (vals[k // 2 - 1] + vals[k // 2]) / 2.0)


@dataclass
class ExperimentReport:
    rows: list[ReportRow] = field(default_factory=list)

    def row(self, game: str, label: str) -> ReportRow:
        for r in self.rows:
            if r.game == game and r.label == label:
                return r
        raise KeyError((game, label))


def _run_cell(game: str, cell: PlanCell, seeds: list[int]) -> ReportRow:
    row = ReportRow(game=game, label=cell.label)
    dataset: TrainingDataset | None = None
    if cell.kind == "search" and cell.dataset is not None:
        if isinstance(cell.dataset, str):
            try:
                dataset = load_dataset(cell.dataset.format(game=game))
            except (OSError, ValueError) as e:
                row.failed = True
                row.error = str(e)
                return row
        else:
            dataset = cell.dataset
    for seed in seeds:
        if cell.kind == "search":
            _, stats = search(game, dataset, cell.config, seed=seed)
            n = stats.n_statements
            full = time_to_coverage(stats.timeline, n)
            row.runs.append(RunRow(
                seed=seed, coverage=stats.coverage_fraction, won=stats.won,
                generations=stats.total_generations, ticks=stats.total_ticks,
                timeout=stats.timeout, full_coverage_tick=full,
                timeline=list(stats.timeline)))
        else:
            st = random_tester(game, cell.budget_ticks, seed=seed)
            full = time_to_coverage(st.timeline, st.n_statements)
            row.runs.append(RunRow(
                seed=seed, coverage=st.coverage_fraction, won=st.won,
                generations=0, ticks=st.total_ticks, timeout=False,
                full_coverage_tick=full, timeline=list(st.timeline)))
    return row


def run_plan(plan: ExperimentPlan) -> ExperimentReport:
    report = ExperimentReport()
    seeds = plan.seeds[: plan.repetitions]
    for game in plan.games:
        for cell in plan.cells:
            report.rows.append(_run_cell(game, cell, seeds))
    if plan.baseline:
        for game in plan.games:
            try:
                base = report.row(game, plan.baseline)
            except KeyError:
                continue
            if base.failed or not base.runs:
                continue
            base_cov = [r.coverage for r in base.runs]
            for row in report.rows:
                if row.game != game or row.label == plan.baseline or row.failed:
                    continue
                _, p = mann_whitney_u([r.coverage for r in row.runs], base_cov)
                row.p_vs_baseline = p
    return report


def format_report(report: ExperimentReport) -> str:
    """Plain tabular text, one row per (game, config)."""
    header = f"{'game':<14}{'config':<18}{'C%':>7}{'W':>4}{'gen~':>7}{'p':>9}  note"
    lines = [header, "-" * len(header)]
    for r in report.rows:
        if r.failed:
            lines.append(f"{r.game:<14}{r.label:<18}{'-':>7}{'-':>4}{'-':>7}{'-':>9}  FAILED: {r.error}")
            continue
        p = "-" if r.p_vs_baseline is None else f"{r.p_vs_baseline:.3f}"
        sig = " *" if r.p_vs_baseline is not None and r.p_vs_baseline < SIGNIFICANCE_LEVEL else ""
        lines.append(f"{r.game:<14}{r.label:<18}{100 * r.mean_coverage:>7.1f}{r.wins:>4}"
                     f"{r.median_generations:>7.1f}{p:>9}{sig}")
    return "\n".join(lines) + "\n"


def write_report(report: ExperimentReport, out_dir: str, plot: bool = False):
    """Tabular summary plus per-run raw series files; optional coverage plot."""
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "report.txt"), "w") as f:
        f.write(format_report(report))
    for r in report.rows:
        if r.failed:
            continue
        name = f"{r.game}__{r.label}".replace(" ", "_")
        with open(os.path.join(out_dir, name + ".tsv"), "w") as f:
            f.write("seed\tcoverage\twon\tgenerations\tticks\ttimeout\tfull_coverage_tick\n")
            for run in r.runs:
                f.write(f"{run.seed}\t{run.coverage:.6f}\t{int(run.won)}\t{run.generations}"
                        f"\t{run.ticks}\t{int(run.timeout)}\t{run.full_coverage_tick}\n")
        with open(os.path.join(out_dir, name + ".series.tsv"), "w") as f:
            f.write("seed\ttick\tcovered\n")
            for run in r.runs:
                for tick, cov in run.timeline:
                    f.write(f"{run.seed}\t{tick}\t{cov}\n")
    if plot:
        _plot_report(report, out_dir)


def _plot_report(report: ExperimentReport, out_dir: str):
    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        return
    games = sorted({r.game for r in report.rows if not r.failed})
    fig, axes = plt.subplots(1, max(len(games), 1), figsize=(6 * max(len(games), 1), 4),
                             squeeze=False)
    for ax, game in zip(axes[0], games):
        for r in report.rows:
            if r.game != game or r.failed or not r.runs:
                continue
            run = r.runs[0]
            if run.timeline:
                xs, ys = zip(*run.timeline)
                ax.step(xs, ys, where="post", label=r.label)
        ax.set_title(game)
        ax.set_xlabel("ticks")
        ax.set_ylabel("covered statements")
        ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(os.path.join(out_dir, "coverage.png"), dpi=120)
    plt.close(fig)
