"""Coverage-guided play-testing with neuroevolved input generators.

Small deterministic games are instrumented with statement coverage and a
control dependence graph; NEAT evolves networks that play them, and an
alternative weight mutation trains the networks with stochastic gradient
descent on recorded gameplay traces.
"""

from evoplay.actions import ActionLabel, ActionSchema, action_schema, label_to_event
from evoplay.engine import GameInstance, InputEvent, load_game
from evoplay.experiments import (ExperimentPlan, PlanCell, mann_whitney_u, run_plan,
                                 time_to_coverage, write_report)
from evoplay.features import extract, feature_schema
from evoplay.network import (CompiledNet, Genome, InnovationRegistry, activate,
                             compile_network, decode_action, initial_genome)
from evoplay.recording import (RecorderConfig, RecorderHandle, RecordingSession,
                               TrainingDataset, load_dataset, record_expert_dataset,
                               replay_events, save_dataset)
from evoplay.search import (DynamicTestSuite, SearchConfig, SearchStats, load_suite,
                            random_tester, replay_suite, save_suite, search)
from evoplay.training import LossConfig, hybrid_weight_change, sgd_step, train

__version__ = "0.1.0"

__all__ = [
    "ActionLabel", "ActionSchema", "CompiledNet", "DynamicTestSuite",
    "ExperimentPlan", "GameInstance", "Genome", "InnovationRegistry", "InputEvent",
    "LossConfig", "PlanCell", "RecorderConfig", "RecorderHandle", "RecordingSession",
    "SearchConfig", "SearchStats", "TrainingDataset", "action_schema", "activate",
    "compile_network", "decode_action", "extract", "feature_schema",
    "hybrid_weight_change", "initial_genome", "label_to_event", "load_dataset",
    "load_game", "load_suite", "mann_whitney_u", "random_tester",
    "record_expert_dataset", "replay_events", "replay_suite", "run_plan",
    "save_dataset", "save_suite", "search", "sgd_step", "time_to_coverage", "train",
    "write_report",
]
