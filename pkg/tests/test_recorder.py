"""Play capture: labels, no-op synthesis, replay, and dataset files."""

import math

import numpy as np
import pytest

from evoplay.engine import builtin_game
from evoplay.features import feature_schema
from evoplay.recording import (
    EXPERTS,
    RecorderConfig,
    RecorderHandle,
    RecordingSession,
    TrainingDataset,
    load_dataset,
    record_expert_dataset,
    rederive,
    replay_events,
    save_dataset,
)


def noop_count(session):
    return sum(1 for s in session.snapshots if s.label.kind == "noop")


class TestKeyCapture:
    def test_duration_is_up_minus_down(self):
        h = RecorderHandle("fruit_catch", seed=3)
        h.advance(5)
        onset = feature_schema(h.program).extract_vector(h.instance.state)
        h.on_key("left", True, 5)
        h.advance(4)
        snap = h.on_key("left", False, 9)
        assert snap.label.kind == "key_press"
        assert snap.label.key == "left"
        assert snap.label.duration == 4
        assert snap.tick == 9
        np.testing.assert_array_equal(snap.features, onset)

    def test_same_tick_press_lasts_one_tick(self):
        h = RecorderHandle("fruit_catch", seed=3)
        h.on_key("right", True, 0)
        snap = h.on_key("right", False, 0)
        assert snap.label.duration == 1

    def test_unknown_key_logged_but_not_labeled(self):
        h = RecorderHandle("fruit_catch", seed=3)
        assert h.on_key("zzz", True, 0) is None
        assert h.on_key("zzz", False, 0) is None
        assert h.snapshots == []
        assert [e["key"] for e in h.events] == ["zzz", "zzz"]

    def test_key_up_without_down_warns(self):
        h = RecorderHandle("fruit_catch", seed=3)
        with pytest.warns(UserWarning, match="without a prior key_down"):
            assert h.on_key("left", False, 0) is None
        assert h.snapshots == []

    def test_interleaved_keys_keep_their_onsets(self):
        h = RecorderHandle("snake_grid", seed=5)
        h.on_key("left", True, 0)
        h.advance(2)
        h.on_key("up", True, 2)
        h.advance(1)
        a = h.on_key("left", False, 3)
        b = h.on_key("up", False, 3)
        assert (a.label.key, a.label.duration) == ("left", 3)
        assert (b.label.key, b.label.duration) == ("up", 1)


class TestMouseCapture:
    def test_debounce_fixture(self):
        # moves over ticks 5..20, then 6 stationary ticks: one snapshot at
        # tick 26 holding tick-5 features and the tick-20 position
        h = RecorderHandle("dot_chase", seed=1)
        h.advance(5)
        onset = feature_schema(h.program).extract_vector(h.instance.state)
        for t in range(5, 21):
            h.on_mouse_move(float(t), -10.0, t)
            h.advance()
        assert h.snapshots == []
        h.advance(5)
        assert len(h.snapshots) == 1
        snap = h.snapshots[0]
        assert snap.tick == 26
        assert snap.label.kind == "mouse_move"
        assert (snap.label.x, snap.label.y) == (20.0, -10.0)
        np.testing.assert_array_equal(snap.features, onset)

    def test_click_snapshots_immediately(self):
        h = RecorderHandle("dot_chase", seed=1)
        h.advance(3)
        snap = h.on_mouse_click(12.0, 34.0, 3)
        assert snap.label.kind == "mouse_click"
        assert (snap.label.x, snap.label.y) == (12.0, 34.0)
        assert snap.tick == 3

    def test_new_movement_restarts_debounce(self):
        h = RecorderHandle("dot_chase", seed=1)
        for t in range(0, 4):
            h.on_mouse_move(float(t), 0.0, t)
            h.advance()
        h.advance(6)  # first burst flushes
        for t in range(h.tick, h.tick + 3):
            h.on_mouse_move(100.0 + t, 0.0, t)
            h.advance()
        h.advance(6)  # second burst flushes
        kinds = [s.label.kind for s in h.snapshots]
        assert kinds == ["mouse_move", "mouse_move"]
        assert h.snapshots[1].label.x > 100.0


class TestNoopSynthesis:
    def test_gap_noop_fixture(self):
        # actions at ticks 0 and 25 with delta_t=10: one NoOp{25} in between
        cfg = RecorderConfig(delta_t=10)
        h = RecorderHandle("dot_chase", seed=1, config=cfg)
        h.on_mouse_click(0.0, 0.0, 0)
        h.advance(25)
        h.on_mouse_click(10.0, 5.0, 25)
        labels = [(s.label.kind, s.label.duration) for s in h.snapshots]
        assert labels == [("mouse_click", 0), ("noop", 25), ("mouse_click", 0)]
        assert h.snapshots[1].tick == 25

    def test_idle_cap_emits_w_max_noops(self):
        cfg = RecorderConfig(delta_t=10, w_max=20)
        h = RecorderHandle("dot_chase", seed=1, config=cfg)
        h.advance(50)
        noops = [s for s in h.snapshots if s.label.kind == "noop"]
        assert [(s.tick, s.label.duration) for s in noops] == [(20, 20), (40, 20)]

    def test_infinite_delta_t_never_synthesizes(self):
        h = RecorderHandle("dot_chase", seed=1)  # default delta_t = inf
        h.on_mouse_click(0.0, 0.0, 0)
        h.advance(150)
        h.on_mouse_click(10.0, 5.0, 150)
        assert noop_count(h.end_session()) == 0

    def test_short_gaps_stay_silent(self):
        cfg = RecorderConfig(delta_t=10)
        h = RecorderHandle("dot_chase", seed=1, config=cfg)
        for t in range(0, 50, 8):  # gaps of 8 <= delta_t
            if h.tick < t:
                h.advance(t - h.tick)
            h.on_mouse_click(0.0, 0.0, t)
        assert noop_count(h.end_session()) == 0


class TestSessionLifecycle:
    def test_end_reason_defaults(self):
        h = RecorderHandle("dot_chase", seed=1)
        h.advance(10)
        assert h.end_session().end_reason == "player_stop"

        h2 = RecorderHandle("flap_bird", seed=1)
        h2.advance(100)  # idle bird falls out
        assert h2.game_over
        assert h2.end_session().end_reason == "game_over"

    def test_explicit_reason_and_validation(self):
        h = RecorderHandle("dot_chase", seed=1)
        sess = h.end_session("player_stop")
        assert sess.end_reason == "player_stop"
        with pytest.raises(ValueError, match="end_reason"):
            RecordingSession([], 0, frozenset(), 0, "rage_quit")

    def test_handle_not_reusable(self):
        h = RecorderHandle("dot_chase", seed=1)
        h.end_session()
        with pytest.raises(RuntimeError):
            h.advance()
        with pytest.raises(RuntimeError):
            h.on_mouse_click(0.0, 0.0, 0)

    def test_session_covers_and_duration(self):
        h = RecorderHandle("fruit_catch", seed=2)
        h.on_key("left", True, 0)
        h.advance(3)
        h.on_key("left", False, 3)
        h.advance(7)
        sess = h.end_session()
        assert sess.duration_ticks == 10
        assert sess.covered == h.instance.covered_ids()
        assert sess.seed == 2


def scripted_session(delta_t=math.inf):
    cfg = RecorderConfig(delta_t=delta_t)
    h = RecorderHandle("fruit_catch", seed=9, config=cfg)
    h.on_key("left", True, 0)
    h.advance(4)
    h.on_key("left", False, 4)
    h.advance(20)
    h.on_key("right", True, 24)
    h.advance(2)
    h.on_key("right", False, 26)
    h.advance(30)
    return h.end_session()


class TestReplay:
    def test_replay_is_bit_exact(self):
        sess = scripted_session()
        back = replay_events("fruit_catch", sess.seed, sess.events,
                             sess.duration_ticks, RecorderConfig(),
                             end_reason=sess.end_reason)
        assert back == sess

    def test_rederive_sweeps_delta_t(self):
        raw = scripted_session()  # recorded without no-ops
        ds = TrainingDataset("fruit_catch", [raw], RecorderConfig())
        swept = rederive(ds, RecorderConfig(delta_t=10))
        assert noop_count(raw) == 0
        assert noop_count(swept.sessions[0]) > 0
        # non-noop labels survive the sweep unchanged
        keep = [s.label for s in swept.sessions[0].snapshots if s.label.kind != "noop"]
        assert keep == [s.label for s in raw.snapshots]
        # sweeping back to inf reproduces the original session
        restored = rederive(swept, RecorderConfig())
        assert restored.sessions[0] == raw

    def test_noop_count_non_increasing_in_delta_t(self):
        raw = scripted_session()
        ds = TrainingDataset("fruit_catch", [raw], RecorderConfig())
        counts = [noop_count(rederive(ds, RecorderConfig(delta_t=dt)).sessions[0])
                  for dt in (5, 10, 100, math.inf)]
        assert counts == sorted(counts, reverse=True)
        assert counts[-1] == 0

    def test_unknown_event_kind_rejected(self):
        with pytest.raises(ValueError, match="unknown event kind"):
            replay_events("fruit_catch", 0, [{"kind": "scroll", "tick": 0}], 5)


class TestDatasetFiles:
    def make_dataset(self):
        return TrainingDataset(
            "fruit_catch", [scripted_session(), scripted_session(delta_t=10)],
            RecorderConfig(delta_t=10),
            feature_names=tuple(feature_schema(builtin_game("fruit_catch")).names))

    def test_round_trip(self, tmp_path):
        ds = self.make_dataset()
        path = tmp_path / "d.jsonl"
        save_dataset(ds, path)
        assert load_dataset(path) == ds

    def test_truncation_detected(self, tmp_path):
        ds = self.make_dataset()
        path = tmp_path / "d.jsonl"
        save_dataset(ds, path)
        lines = path.read_text().splitlines()
        path.write_text("\n".join(lines[:-1]) + "\n")
        with pytest.raises(ValueError, match="truncated"):
            load_dataset(path)

    def test_missing_file_is_oserror(self, tmp_path):
        with pytest.raises(OSError):
            load_dataset(tmp_path / "nope.jsonl")

    def test_config_validation(self):
        with pytest.raises(ValueError):
            RecorderConfig(delta_t=0)
        with pytest.raises(ValueError):
            RecorderConfig(w_max=0)
        with pytest.raises(ValueError):
            RecorderConfig(stationary_steps=0)


class TestExperts:
    def test_every_builtin_has_an_expert(self):
        from evoplay.engine import builtin_game_ids
        assert set(EXPERTS) == set(builtin_game_ids())

    def test_expert_dataset_is_deterministic(self):
        a = record_expert_dataset("fruit_catch", total_ticks=400, seed=5)
        b = record_expert_dataset("fruit_catch", total_ticks=400, seed=5)
        assert a == b
        assert sum(s.duration_ticks for s in a.sessions) >= 400
        assert a.game_id == "fruit_catch"
        assert all(s.snapshots for s in a.sessions)

    def test_expert_sessions_replay(self):
        ds = record_expert_dataset("snake_grid", total_ticks=300, seed=2)
        for sess in ds.sessions:
            back = replay_events("snake_grid", sess.seed, sess.events,
                                 sess.duration_ticks, ds.config,
                                 end_reason=sess.end_reason)
            assert back == sess

    def test_unknown_game_rejected(self):
        with pytest.raises(ValueError, match="no expert"):
            record_expert_dataset("pong_3d", total_ticks=10)
