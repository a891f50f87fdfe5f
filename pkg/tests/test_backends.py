"""The numba and numpy kernel backends must be bit-identical."""

import hashlib
import os
import subprocess
import sys

import pytest

# one deterministic transcript exercising the VM, forward/backward kernels,
# and a short SGD run; printed as a sha256 so the comparison is all-or-nothing
PROBE = r"""
import hashlib, json
import numpy as np
from evoplay._backend import BACKEND
from evoplay.actions import ActionLabel, action_schema
from evoplay.engine import InputEvent, load_game
from evoplay.features import feature_schema
from evoplay.network import InnovationRegistry, initial_genome, activate
from evoplay.recording import Snapshot
from evoplay.search import SearchConfig, search
from evoplay.training import LossConfig, backward, train

h = hashlib.sha256()

inst = load_game("flap_bird", seed=5)
for t in range(300):
    if inst.game_over:
        break
    if t % 17 == 0:
        inst.apply_event(InputEvent("key_down", key="space"))
    elif t % 17 == 2:
        inst.apply_event(InputEvent("key_up", key="space"))
    inst.step([])
    h.update(inst.canonical_bytes())

prog = load_game("paddle_ball").program
fs, asch = feature_schema(prog), action_schema(prog)
g = initial_genome(len(fs), asch, InnovationRegistry(), np.random.default_rng(3))
x = np.linspace(-1, 1, len(fs))
pred = activate(g, x, asch)
h.update(pred.action_probs.tobytes())
h.update(pred.params.tobytes())
tape = backward(g, x, ActionLabel("mouse_move", x=30.0, y=-20.0), asch)
h.update(json.dumps(tape.gradients, sort_keys=True).encode())

rng = np.random.default_rng(8)
snaps = [Snapshot(rng.uniform(-1, 1, len(fs)),
                  ActionLabel("mouse_move", x=float(rng.uniform(-200, 200)),
                              y=float(rng.uniform(-150, 150))), t)
         for t in range(10)]
trained = train(g, snaps, asch, LossConfig(patience=3, max_epochs=15),
                np.random.default_rng(1))
h.update(json.dumps(trained.to_dict(), sort_keys=True).encode())

cfg = SearchConfig(population_size=8, max_generations=2, episode_ticks=80,
                   robustness_reps=1)
_, stats = search("fruit_catch", None, cfg, seed=0)
h.update(json.dumps(stats.to_dict(), sort_keys=True).encode())

print(BACKEND, h.hexdigest())
"""


def run_probe(backend: str) -> str:
    env = dict(os.environ, EVOPLAY_BACKEND=backend)
    out = subprocess.run([sys.executable, "-c", PROBE], env=env,
                         capture_output=True, text=True, timeout=300)
    assert out.returncode == 0, out.stderr
    name, digest = out.stdout.split()
    assert name == backend
    return digest


class TestBackendParity:
    def test_numpy_matches_numba(self):
        assert run_probe("numpy") == run_probe("numba")

    def test_numpy_backend_reruns_identically(self):
        assert run_probe("numpy") == run_probe("numpy")

    def test_invalid_backend_refused(self):
        env = dict(os.environ, EVOPLAY_BACKEND="cuda")
        out = subprocess.run([sys.executable, "-c", "import evoplay"], env=env,
                             capture_output=True, text=True, timeout=120)
        assert out.returncode != 0
        assert "EVOPLAY_BACKEND" in out.stderr

    def test_current_backend_is_declared(self):
        from evoplay._backend import BACKEND, jit

        assert BACKEND == os.environ.get("EVOPLAY_BACKEND", "numba").lower()
        if BACKEND == "numpy":
            f = jit(lambda v: v)
            assert f(3) == 3  # identity wrapper

    def test_py_func_unwraps(self):
        from evoplay._backend import BACKEND, py_func
        from evoplay.network import kernels as K

        f = py_func(K.sample_loss)
        assert callable(f)
        if BACKEND == "numba":
            assert f is K.sample_loss.py_func
