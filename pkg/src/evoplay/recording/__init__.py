from .data import (
    DatasetStats,
    RecorderConfig,
    RecordingSession,
    Snapshot,
    TrainingDataset,
    load_dataset,
    save_dataset,
    stats,
)
from .experts import EXPERTS, record_expert_dataset
from .recorder import RecorderHandle, rederive, replay_events

__all__ = [
    "DatasetStats", "EXPERTS", "RecorderConfig", "RecorderHandle",
    "RecordingSession", "Snapshot", "TrainingDataset", "load_dataset",
    "record_expert_dataset", "rederive", "replay_events", "save_dataset", "stats",
]
