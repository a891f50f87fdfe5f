"""Command-line entry point: record play traces, run searches, replay and
verify suites, inspect datasets, and run experiment matrices.

Exit codes: 0 success, 1 usage error (bad flags or config values), 2 run
failure (missing files, failed replay entries, runtime errors).
"""

from __future__ import annotations

import argparse
import dataclasses
import sys

from .engine import builtin_game_ids
from .experiments import ExperimentPlan, PlanCell, format_report, run_plan, write_report
from .recording.data import RecorderConfig, load_dataset, stats
from .search import (SearchConfig, load_suite, replay_suite, save_stats, save_suite,
                     search)
from .training import LossConfig


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad flags; our contract reserves 2 for run failures
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _positive_float(text: str) -> float:
    # accepts "inf" for the no-op threshold
    v = float(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser() -> _Parser:
    parser = _Parser(prog="evoplay", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add_game(p):
        p.add_argument("--game", default="paddle_ball",
                       help=f"one of: {', '.join(builtin_game_ids())}")

    p = sub.add_parser("record", parents=[], help="serve the play UI and record traces")
    add_game(p)
    p.add_argument("--out", required=True, help="dataset file to write on exit")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8571)
    p.add_argument("--delta-t", type=_positive_float, default=float("inf"),
                   help="no-op synthesis threshold (ticks); inf disables")
    p.add_argument("--w-max", type=int, default=60, help="no-op duration cap")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--static", default=None, help="directory of browser UI files")
    p.add_argument("--once", action="store_true",
                   help="exit after the first client disconnects")
    p.set_defaults(func=cmd_record)

    p = sub.add_parser("search", help="evolve a test suite for a game")
    add_game(p)
    p.add_argument("--dataset", default=None, help="recorded traces for SGD mutation")
    p.add_argument("--out-suite", default=None, help="suite file (default GAME.suite)")
    p.add_argument("--out-stats", default=None, help="stats JSON (default GAME.stats.json)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--population", type=int, default=None)
    p.add_argument("--budget", type=int, default=None, help="total generation budget")
    p.add_argument("--p-sgd", type=float, default=None,
                   help="probability a weight mutation uses gradient descent")
    p.add_argument("--alpha", type=float, default=None, help="SGD learning rate")
    p.add_argument("--patience", type=int, default=None,
                   help="early-stopping patience (epochs)")
    p.add_argument("--robustness-reps", type=int, default=None)
    p.add_argument("--episode-ticks", type=int, default=None)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("replay", help="re-verify every entry of a saved suite")
    p.add_argument("--suite", required=True)
    p.add_argument("--game", default=None, help="override the suite's game id")
    p.add_argument("--robustness-reps", type=int, default=None)
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("stats", help="print summary statistics of a dataset")
    p.add_argument("--dataset", required=True)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("experiment", help="run an experiment plan file")
    p.add_argument("--plan", required=True)
    p.add_argument("--out", required=True, help="report directory")
    p.add_argument("--plot", action="store_true", help="also write coverage.png")
    p.set_defaults(func=cmd_experiment)

    return parser


def _search_config(args) -> SearchConfig:
    """Flags override module defaults; validation happens here, before any
    long-running work."""
    loss_kw = {}
    if args.alpha is not None:
        loss_kw["learning_rate"] = args.alpha
    if args.patience is not None:
        loss_kw["patience"] = args.patience
    try:
        kw = {"loss": LossConfig(**loss_kw)}
        if args.population is not None:
            kw["population_size"] = args.population
        if args.budget is not None:
            kw["max_generations"] = args.budget
        if args.p_sgd is not None:
            kw["p_gradient_descent"] = args.p_sgd
        if getattr(args, "robustness_reps", None) is not None:
            kw["robustness_reps"] = args.robustness_reps
        if getattr(args, "episode_ticks", None) is not None:
            kw["episode_ticks"] = args.episode_ticks
        return SearchConfig(**kw)
    except ValueError as e:
        raise UsageError(str(e)) from e


def _check_game(game: str):
    if game not in builtin_game_ids():
        raise UsageError(
            f"unknown game {game!r} (builtins: {', '.join(builtin_game_ids())})")


def cmd_record(args) -> int:
    from .bridge import create_app, serve

    _check_game(args.game)
    try:
        config = RecorderConfig(delta_t=args.delta_t, w_max=args.w_max)
    except ValueError as e:
        raise UsageError(str(e)) from e
    app = create_app(game=args.game, config=config, seed=args.seed,
                     out_path=args.out, once=args.once, static_dir=args.static)
    print(f"recording {args.game} on ws://{args.host}:{args.port}/ws "
          f"(dataset -> {args.out})")
    try:
        serve(app, host=args.host, port=args.port)
    except OSError as e:
        print(f"error: cannot bind {args.host}:{args.port}: {e}", file=sys.stderr)
        return 2
    app.state.save_all()
    if not app.state.sessions:
        print("no sessions recorded")
        return 0
    print(stats(load_dataset(args.out)))
    return 0


def cmd_search(args) -> int:
    _check_game(args.game)
    config = _search_config(args)
    dataset = None
    if args.dataset is not None:
        dataset = load_dataset(args.dataset)
        if dataset.game_id != args.game:
            raise UsageError(f"dataset is for {dataset.game_id!r}, not {args.game!r}")
    elif config.p_gradient_descent > 0:
        print("note: no dataset given; weight mutations fall back to perturbation",
              file=sys.stderr)
    suite, st = search(args.game, dataset, config, seed=args.seed)
    out_suite = args.out_suite or f"{args.game}.suite"
    out_stats = args.out_stats or f"{args.game}.stats.json"
    save_suite(suite, out_suite)
    save_stats(st, out_stats)
    print(f"covered {len(st.covered)}/{st.n_statements} statements "
          f"({100 * st.coverage_fraction:.1f}%) in {st.total_generations} generations, "
          f"{st.total_ticks} ticks{', timeout' if st.timeout else ''}")
    print(f"suite: {len(suite.entries)} entries -> {out_suite}")
    print(f"stats -> {out_stats}")
    return 0


def cmd_replay(args) -> int:
    suite = load_suite(args.suite)
    game = args.game or suite.game_id
    _check_game(game)
    results = replay_suite(suite, game)
    failed = 0
    for target, ok in results:
        print(f"target {target}: {'pass' if ok else 'FAIL'}")
        failed += not ok
    print(f"{len(results) - failed}/{len(results)} entries pass")
    return 2 if failed else 0


def cmd_stats(args) -> int:
    print(stats(load_dataset(args.dataset)))
    return 0


def parse_plan(path: str) -> ExperimentPlan:
    """Plan file: line-oriented text.

        plan v1
        games paddle_ball fruit_catch
        repetitions 10
        seeds 1 2 3 4 5 6 7 8 9 10
        baseline neat
        cell neat p_gradient_descent=0
        cell neat+sgd p_gradient_descent=1.0 dataset=traces/{game}.jsonl
        cell random kind=random budget_ticks=120000

    Cell options name SearchConfig fields; dataset paths may use a {game}
    placeholder; kind defaults to search.
    """
    games: list[str] = []
    cells: list[PlanCell] = []
    repetitions = 10
    seeds: list[int] = []
    baseline = ""
    numeric_fields = {f.name for f in dataclasses.fields(SearchConfig)} - {"loss"}
    with open(path) as f:
        lines = f.readlines()
    if not lines or lines[0].strip() != "plan v1":
        raise ValueError(f"{path}: line 1: expected header 'plan v1'")
    for ln, raw in enumerate(lines[1:], start=2):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        word, _, rest = line.partition(" ")
        try:
            if word == "games":
                games = rest.split()
            elif word == "repetitions":
                repetitions = int(rest)
            elif word == "seeds":
                seeds = [int(s) for s in rest.split()]
            elif word == "baseline":
                baseline = rest.strip()
            elif word == "cell":
                parts = rest.split()
                if not parts:
                    raise ValueError("cell needs a label")
                label, opts = parts[0], parts[1:]
                kind = "search"
                dataset = None
                budget_ticks = 120_000
                loss_kw: dict = {}
                cfg_kw: dict = {}
                for opt in opts:
                    key, eq, val = opt.partition("=")
                    if not eq:
                        raise ValueError(f"malformed option {opt!r}")
                    if key == "kind":
                        kind = val
                    elif key == "dataset":
                        dataset = val
                    elif key == "budget_ticks":
                        budget_ticks = int(val)
                    elif key in ("learning_rate", "patience", "max_epochs"):
                        loss_kw[key] = int(val) if key != "learning_rate" else float(val)
                    elif key in numeric_fields:
                        field_type = type(getattr(SearchConfig(), key))
                        cfg_kw[key] = field_type(val) if field_type is not bool else val == "true"
                    else:
                        raise ValueError(f"unknown option {key!r}")
                if loss_kw:
                    cfg_kw["loss"] = LossConfig(**loss_kw)
                cells.append(PlanCell(label=label, kind=kind,
                                      config=SearchConfig(**cfg_kw),
                                      dataset=dataset, budget_ticks=budget_ticks))
            else:
                raise ValueError(f"unknown directive {word!r}")
        except ValueError as e:
            raise ValueError(f"{path}: line {ln}: {e}") from None
    if not games:
        raise ValueError(f"{path}: no games listed")
    if not cells:
        raise ValueError(f"{path}: no cells listed")
    for g in games:
        if g not in builtin_game_ids():
            raise ValueError(f"{path}: unknown game {g!r}")
    return ExperimentPlan(games=games, cells=cells, repetitions=repetitions,
                          seeds=seeds, baseline=baseline)


def cmd_experiment(args) -> int:
    plan = parse_plan(args.plan)  # validates fully before any run starts
    report = run_plan(plan)
    write_report(report, args.out, plot=args.plot)
    print(format_report(report), end="")
    print(f"report -> {args.out}")
    return 2 if any(r.failed for r in report.rows) else 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except (OSError, ValueError, KeyError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
