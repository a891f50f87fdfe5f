"""Snapshot / session / dataset containers and their file format.

A dataset file is line-delimited JSON: one header record (game id,
recorder config, feature-name fingerprint) followed by one record per
session.  Floats survive the round trip bit-exactly (json uses shortest
repr), which the replay-verification tests rely on.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from ..actions import ActionLabel

FORMAT_VERSION = 1
END_REASONS = ("player_stop", "game_over")


@dataclass(frozen=True)
class RecorderConfig:
    delta_t: float = math.inf  # no-op threshold, ticks; inf disables
    w_max: int = 60
    stationary_steps: int = 6

    def __post_init__(self):
        if self.delta_t <= 0:
            raise ValueError("delta_t must be positive (or inf)")
        if self.w_max < 1 or self.stationary_steps < 1:
            raise ValueError("w_max and stationary_steps must be >= 1")

    def to_dict(self) -> dict:
        dt = "inf" if math.isinf(self.delta_t) else self.delta_t
        return {"delta_t": dt, "w_max": self.w_max, "stationary_steps": self.stationary_steps}

    @staticmethod
    def from_dict(d: dict) -> "RecorderConfig":
        dt = d["delta_t"]
        return RecorderConfig(
            delta_t=math.inf if dt == "inf" else float(dt),
            w_max=int(d["w_max"]), stationary_steps=int(d["stationary_steps"]),
        )


class Snapshot:
    """One training example: features at action onset, the action label,
    and the onset tick."""

    __slots__ = ("features", "label", "tick")

    def __init__(self, features: np.ndarray, label: ActionLabel, tick: int):
        self.features = np.asarray(features, np.float64)
        self.label = label
        self.tick = int(tick)

    def __eq__(self, other) -> bool:
        return (isinstance(other, Snapshot)
                and np.array_equal(self.features, other.features)
                and self.label == other.label and self.tick == other.tick)

    def __repr__(self) -> str:
        return f"Snapshot(tick={self.tick}, label={self.label!r})"

    def to_dict(self) -> dict:
        return {"features": self.features.tolist(), "label": self.label.to_dict(),
                "tick": self.tick}

    @staticmethod
    def from_dict(d: dict) -> "Snapshot":
        return Snapshot(np.array(d["features"], np.float64),
                        ActionLabel.from_dict(d["label"]), d["tick"])


@dataclass
class RecordingSession:
    snapshots: list[Snapshot]
    seed: int
    covered: frozenset[int]
    duration_ticks: int
    end_reason: str
    events: list[dict] = field(default_factory=list)  # raw input log for replay

    def __post_init__(self):
        if self.end_reason not in END_REASONS:
            raise ValueError(f"unknown end_reason {self.end_reason!r}")
        self.covered = frozenset(int(i) for i in self.covered)

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "covered": sorted(self.covered),
            "duration_ticks": self.duration_ticks,
            "end_reason": self.end_reason,
            "snapshots": [s.to_dict() for s in self.snapshots],
            "events": self.events,
        }

    @staticmethod
    def from_dict(d: dict) -> "RecordingSession":
        return RecordingSession(
            snapshots=[Snapshot.from_dict(s) for s in d["snapshots"]],
            seed=int(d["seed"]), covered=frozenset(d["covered"]),
            duration_ticks=int(d["duration_ticks"]), end_reason=d["end_reason"],
            events=list(d.get("events", [])),
        )


@dataclass
class TrainingDataset:
    game_id: str
    sessions: list[RecordingSession]
    config: RecorderConfig = field(default_factory=RecorderConfig)
    feature_names: tuple[str, ...] = ()

    def all_snapshots(self) -> list[Snapshot]:
        out: list[Snapshot] = []
        for s in self.sessions:
            out.extend(s.snapshots)
        return out

    def __eq__(self, other) -> bool:
        return (isinstance(other, TrainingDataset)
                and self.game_id == other.game_id and self.config == other.config
                and self.feature_names == other.feature_names
                and len(self.sessions) == len(other.sessions)
                and all(a.to_dict() == b.to_dict() and a.snapshots == b.snapshots
                        for a, b in zip(self.sessions, other.sessions)))


def save_dataset(dataset: TrainingDataset, path: str):
    header = {
        "version": FORMAT_VERSION,
        "game_id": dataset.game_id,
        "config": dataset.config.to_dict(),
        "feature_names": list(dataset.feature_names),
        "n_sessions": len(dataset.sessions),
        "n_snapshots": sum(len(s.snapshots) for s in dataset.sessions),
    }
    with open(path, "w") as f:
        f.write(json.dumps(header) + "\n")
        for s in dataset.sessions:
            f.write(json.dumps(s.to_dict()) + "\n")


def load_dataset(path: str) -> TrainingDataset:
    with open(path) as f:
        lines = f.read().splitlines()
    if not lines:
        raise ValueError(f"{path}: line 1: empty dataset file")

    def parse(i: int) -> dict:
        try:
            return json.loads(lines[i])
        except json.JSONDecodeError as e:
            raise ValueError(f"{path}: line {i + 1}: {e.msg}") from None

    header = parse(0)
    for key in ("version", "game_id", "config"):
        if key not in header:
            raise ValueError(f"{path}: line 1: header missing {key!r}")
    if header["version"] != FORMAT_VERSION:
        raise ValueError(f"{path}: line 1: unsupported version {header['version']}")
    sessions = []
    for i in range(1, len(lines)):
        if not lines[i].strip():
            continue
        try:
            sessions.append(RecordingSession.from_dict(parse(i)))
        except (KeyError, TypeError, ValueError) as e:
            if isinstance(e, ValueError) and str(e).startswith(path):
                raise
            raise ValueError(f"{path}: line {i + 1}: bad session record ({e})") from None
    if "n_sessions" in header and header["n_sessions"] != len(sessions):
        raise ValueError(f"{path}: header says {header['n_sessions']} sessions, "
                         f"found {len(sessions)} (truncated file?)")
    if "n_snapshots" in header:
        found = sum(len(s.snapshots) for s in sessions)
        if header["n_snapshots"] != found:
            raise ValueError(f"{path}: header says {header['n_snapshots']} snapshots, "
                             f"found {found} (truncated file?)")
    return TrainingDataset(
        game_id=header["game_id"], sessions=sessions,
        config=RecorderConfig.from_dict(header["config"]),
        feature_names=tuple(header.get("feature_names", ())),
    )


@dataclass(frozen=True)
class DatasetStats:
    game_id: str
    n_sessions: int
    n_snapshots: int
    n_noops: int

    @property
    def noop_proportion(self) -> float:
        return self.n_noops / self.n_snapshots if self.n_snapshots else 0.0

    def __str__(self) -> str:
        return (f"{self.game_id}: {self.n_sessions} sessions, "
                f"{self.n_snapshots} snapshots ({self.noop_proportion:.2f} noop)")


def stats(dataset: TrainingDataset) -> DatasetStats:
    snaps = dataset.all_snapshots()
    return DatasetStats(
        game_id=dataset.game_id,
        n_sessions=len(dataset.sessions),
        n_snapshots=len(snaps),
        n_noops=sum(1 for s in snaps if s.label.kind == "noop"),
    )
