"""CLI exit codes and the plan-file parser, all driven in-process."""

import numpy as np
import pytest

from evoplay.cli import main, parse_plan

DATA = "data/paddle_ball_expert.jsonl"

TINY_SEARCH = ["--population", "8", "--budget", "2", "--robustness-reps", "1",
               "--episode-ticks", "80"]


class TestUsageErrors:
    def test_unknown_game_is_1(self):
        assert main(["search", "--game", "pong_3d"]) == 1

    def test_bad_population_is_1(self):
        assert main(["search", "--game", "fruit_catch", "--population", "1"]) == 1

    def test_bad_alpha_is_1(self):
        assert main(["search", "--game", "fruit_catch", "--alpha", "-1"]) == 1

    def test_dataset_game_mismatch_is_1(self):
        assert main(["search", "--game", "fruit_catch", "--dataset", DATA]) == 1

    def test_argparse_failures_exit_1(self):
        with pytest.raises(SystemExit) as e:
            main(["record"])  # --out is required
        assert e.value.code == 1
        with pytest.raises(SystemExit) as e:
            main(["no_such_command"])
        assert e.value.code == 1


class TestRunFailures:
    def test_missing_dataset_is_2(self):
        assert main(["search", "--game", "paddle_ball",
                     "--dataset", "/no/such/file.jsonl"]) == 2

    def test_missing_suite_is_2(self):
        assert main(["replay", "--suite", "/no/such.suite"]) == 2

    def test_missing_stats_dataset_is_2(self):
        assert main(["stats", "--dataset", "/no/such.jsonl"]) == 2


class TestStats:
    def test_shipped_dataset_summary(self, capsys):
        assert main(["stats", "--dataset", DATA]) == 0
        out = capsys.readouterr().out
        assert "paddle_ball: 6 sessions, 23 snapshots" in out


class TestSearchAndReplay:
    def test_search_writes_suite_and_stats(self, tmp_path, capsys):
        suite = tmp_path / "fc.suite"
        stats = tmp_path / "fc.json"
        code = main(["search", "--game", "fruit_catch", "--seed", "0",
                     "--out-suite", str(suite), "--out-stats", str(stats),
                     *TINY_SEARCH])
        assert code == 0
        assert suite.exists() and stats.exists()
        out = capsys.readouterr().out
        assert "covered" in out and "suite:" in out

    def test_sgd_without_dataset_warns(self, tmp_path, capsys):
        code = main(["search", "--game", "fruit_catch", "--p-sgd", "0.5",
                     "--out-suite", str(tmp_path / "s"), "--out-stats",
                     str(tmp_path / "j"), *TINY_SEARCH])
        assert code == 0
        assert "fall back to perturbation" in capsys.readouterr().err

    def test_replay_round_trip(self, tmp_path, capsys):
        suite = tmp_path / "fc.suite"
        main(["search", "--game", "fruit_catch", "--seed", "1",
              "--out-suite", str(suite), "--out-stats", str(tmp_path / "j"),
              *TINY_SEARCH])
        code = main(["replay", "--suite", str(suite)])
        out = capsys.readouterr().out
        assert code == 0
        assert "FAIL" not in out

    def test_replay_failure_is_2(self, tmp_path, capsys):
        from evoplay.actions import action_schema
        from evoplay.engine import load_game
        from evoplay.features import feature_schema
        from evoplay.network import InnovationRegistry, initial_genome
        from evoplay.search import DynamicTestSuite, SuiteEntry, save_suite

        prog = load_game("fruit_catch").program
        g = initial_genome(len(feature_schema(prog)), action_schema(prog),
                           InnovationRegistry(), np.random.default_rng(0))
        for c in g.connections.values():
            c.weight = 0.0  # constant policy that cannot win
        win = sorted(prog.winning_ids)[0]
        path = tmp_path / "bad.suite"
        save_suite(DynamicTestSuite("fruit_catch", [SuiteEntry(win, g, [1])]),
                   str(path))
        assert main(["replay", "--suite", str(path)]) == 2
        assert "FAIL" in capsys.readouterr().out

    def test_replay_game_override_checked(self, tmp_path):
        from evoplay.search import DynamicTestSuite, save_suite

        path = tmp_path / "empty.suite"
        save_suite(DynamicTestSuite("fruit_catch"), str(path))
        assert main(["replay", "--suite", str(path), "--game", "pac_man"]) == 1


PLAN = """plan v1
games fruit_catch
repetitions 2
baseline rand
cell neat population_size=8 max_generations=2 episode_ticks=80 robustness_reps=1
cell rand kind=random budget_ticks=400
"""


class TestExperimentCommand:
    def test_plan_runs_and_reports(self, tmp_path, capsys):
        plan = tmp_path / "p.plan"
        plan.write_text(PLAN)
        out = tmp_path / "report"
        assert main(["experiment", "--plan", str(plan), "--out", str(out)]) == 0
        assert (out / "report.txt").exists()
        assert "fruit_catch" in capsys.readouterr().out

    def test_failed_cell_exits_2(self, tmp_path):
        plan = tmp_path / "p.plan"
        plan.write_text(PLAN.replace(
            "cell neat ", "cell neat dataset=/no/{game}.jsonl "))
        assert main(["experiment", "--plan", str(plan),
                     "--out", str(tmp_path / "r")]) == 2

    def test_invalid_plan_exits_2_before_running(self, tmp_path):
        plan = tmp_path / "p.plan"
        plan.write_text("plan v1\ngames fruit_catch\ncell a nope=1\n")
        assert main(["experiment", "--plan", str(plan),
                     "--out", str(tmp_path / "r")]) == 2
        assert not (tmp_path / "r").exists()


class TestParsePlan:
    def write(self, tmp_path, text):
        p = tmp_path / "x.plan"
        p.write_text(text)
        return str(p)

    def test_full_plan(self, tmp_path):
        path = self.write(tmp_path, """plan v1
# comment and blank lines are fine

games paddle_ball fruit_catch
repetitions 3
seeds 7 8 9
baseline neat
cell neat p_gradient_descent=0.0
cell neat+sgd p_gradient_descent=1.0 dataset=traces/{game}.jsonl learning_rate=0.05 patience=10
cell random kind=random budget_ticks=5000
""")
        plan = parse_plan(path)
        assert plan.games == ["paddle_ball", "fruit_catch"]
        assert plan.repetitions == 3
        assert plan.seeds == [7, 8, 9]
        assert plan.baseline == "neat"
        labels = [c.label for c in plan.cells]
        assert labels == ["neat", "neat+sgd", "random"]
        sgd = plan.cells[1]
        assert sgd.config.p_gradient_descent == 1.0
        assert sgd.config.loss.learning_rate == 0.05
        assert sgd.config.loss.patience == 10
        assert sgd.dataset == "traces/{game}.jsonl"
        assert plan.cells[2].kind == "random"
        assert plan.cells[2].budget_ticks == 5000

    def test_header_required(self, tmp_path):
        with pytest.raises(ValueError, match="line 1"):
            parse_plan(self.write(tmp_path, "plans v2\n"))

    def test_errors_carry_line_numbers(self, tmp_path):
        with pytest.raises(ValueError, match="line 3: unknown directive"):
            parse_plan(self.write(tmp_path, "plan v1\ngames fruit_catch\nwat 3\n"))
        with pytest.raises(ValueError, match="line 2: .*malformed option"):
            parse_plan(self.write(tmp_path, "plan v1\ncell a b\n"))
        with pytest.raises(ValueError, match="line 2: .*unknown option"):
            parse_plan(self.write(tmp_path, "plan v1\ncell a warp=9\n"))
        with pytest.raises(ValueError, match="line 2: .*cell needs a label"):
            parse_plan(self.write(tmp_path, "plan v1\ncell\n"))

    def test_games_and_cells_required(self, tmp_path):
        with pytest.raises(ValueError, match="no games"):
            parse_plan(self.write(tmp_path, "plan v1\ncell a\n"))
        with pytest.raises(ValueError, match="no cells"):
            parse_plan(self.write(tmp_path, "plan v1\ngames fruit_catch\n"))
        with pytest.raises(ValueError, match="unknown game"):
            parse_plan(self.write(tmp_path, "plan v1\ngames pong\ncell a\n"))

    def test_bad_config_value_rejected(self, tmp_path):
        with pytest.raises(ValueError, match="line 3"):
            parse_plan(self.write(
                tmp_path, "plan v1\ngames fruit_catch\ncell a population_size=1\n"))
