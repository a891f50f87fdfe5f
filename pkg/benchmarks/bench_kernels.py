"""Compare the numba kernels against the pure-numpy fallback.

The backend is chosen at import time from EVOPLAY_BACKEND, so the parent
process re-runs itself once per backend and prints a small table:

    python3 benchmarks/bench_kernels.py
"""

import json
import os
import subprocess
import sys
import time

WORKLOADS = ("vm_ticks", "predict", "train", "search")


def run_workloads() -> dict:
    import numpy as np

    from evoplay._backend import BACKEND
    from evoplay.engine import load_game
    from evoplay.network import compile_network
    from evoplay.recording.experts import record_expert_dataset
    from evoplay.search import SearchConfig, search
    from evoplay.training import LossConfig, train

    sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "tests"))
    from conftest import make_genome

    out = {"backend": BACKEND}

    # warm up the jit (no-op on the numpy path)
    inst = load_game("flap_bird", seed=0)
    inst.run_ticks(50)
    t0 = time.perf_counter()
    ticks = 0
    inst = load_game("flap_bird", seed=1)
    while ticks < 200_000:
        _, _, done = inst.run_ticks(500)
        ticks += done
        if inst.game_over:
            inst.reset(ticks)
    out["vm_ticks"] = (time.perf_counter() - t0, f"{ticks} game ticks")

    genome, _, schema, n_in = make_genome("paddle_ball", seed=0)
    net = compile_network(genome, schema)
    xs = np.random.default_rng(0).uniform(-1.0, 1.0, (20_000, n_in))
    net.predict(xs[0])
    t0 = time.perf_counter()
    for x in xs:
        net.predict(x)
    out["predict"] = (time.perf_counter() - t0, f"{len(xs)} forward passes")

    ds = record_expert_dataset("fruit_catch", 3600, seed=0)
    snaps = ds.all_snapshots()
    cfg = LossConfig(max_epochs=100, patience=100)
    g_fruit, _, fschema, _ = make_genome("fruit_catch", seed=0)
    train(g_fruit, snaps[:5], fschema, LossConfig(max_epochs=1, patience=1))
    t0 = time.perf_counter()
    train(g_fruit, snaps, fschema, cfg, rng=np.random.default_rng(0))
    out["train"] = (time.perf_counter() - t0, f"100 epochs x {len(snaps)} snapshots")

    t0 = time.perf_counter()
    search("fruit_catch", None,
           SearchConfig(population_size=8, max_generations=3, episode_ticks=120,
                        robustness_reps=2), seed=0)
    out["search"] = (time.perf_counter() - t0, "pop 8 x 3 generations")
    return out


def main() -> int:
    if "--child" in sys.argv:
        print(json.dumps(run_workloads()))
        return 0

    results = {}
    for backend in ("numba", "numpy"):
        env = dict(os.environ, EVOPLAY_BACKEND=backend)
        proc = subprocess.run([sys.executable, __file__, "--child"],
                              capture_output=True, text=True, env=env)
        if proc.returncode != 0:
            print(proc.stderr, file=sys.stderr)
            return 1
        results[backend] = json.loads(proc.stdout.splitlines()[-1])

    print(f"{'workload':<10} {'numba':>9} {'numpy':>9} {'speedup':>8}   size")
    for w in WORKLOADS:
        tb, note = results["numba"][w]
        tp, _ = results["numpy"][w]
        print(f"{w:<10} {tb:>8.3f}s {tp:>8.3f}s {tp / tb:>7.1f}x   {note}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
