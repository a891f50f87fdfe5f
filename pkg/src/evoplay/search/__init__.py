from .config import SearchConfig
from .loop import (
    EpisodeResult,
    EpisodeRunner,
    SearchStats,
    load_stats,
    replay_suite,
    robustness_check,
    save_stats,
    search,
    select_target,
)
from .neat import NeatPopulation, Species, compatibility, crossover
from .random_tester import RandomTesterStats, random_tester, save_random_stats
from .suite import DynamicTestSuite, SuiteEntry, load_suite, save_suite

__all__ = [
    "DynamicTestSuite", "EpisodeResult", "EpisodeRunner", "NeatPopulation",
    "RandomTesterStats", "SearchConfig", "SearchStats", "Species", "SuiteEntry",
    "compatibility", "crossover", "load_stats", "load_suite", "random_tester",
    "replay_suite", "robustness_check", "save_random_stats", "save_stats",
    "save_suite", "search", "select_target",
]
