import numpy as np
import pytest

from evoplay.actions import action_schema
from evoplay.engine import load_game
from evoplay.features import feature_schema
from evoplay.network import InnovationRegistry, initial_genome


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def make_genome(game="fruit_catch", seed=0):
    """Fresh initial genome + registry + schema for a builtin game."""
    program = load_game(game, seed=0).program
    schema = action_schema(program)
    n_inputs = len(feature_schema(program).entries)
    reg = InnovationRegistry()
    g = initial_genome(n_inputs, schema, reg, np.random.default_rng(seed))
    return g, reg, schema, n_inputs
