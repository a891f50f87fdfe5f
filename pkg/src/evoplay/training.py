"""Gradient-based weight mutation: backprop through NEAT DAGs.

Sessions are filtered by target coverage, the multitask loss combines
cross-entropy over action heads with masked squared error on the labeled
action's parameters, and training is true SGD (batch size 1) with early
stopping and weight restoration.  The hybrid operator falls back to the
classic random perturbation when no recording covers the target.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .actions import ActionLabel, ActionSchema
from .network import Genome, Prediction, compile_network, perturb_weights
from .network import kernels as K
from .recording.data import Snapshot, TrainingDataset


@dataclass(frozen=True)
class LossConfig:
    learning_rate: float = 0.1
    patience: int = 30  # epochs without a new minimum before stopping
    max_epochs: int = 300
    validation_fraction: float = 0.2
    min_samples_for_validation: int = 25

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.patience < 1 or self.max_epochs < 1:
            raise ValueError("patience and max_epochs must be >= 1")
        if not 0 < self.validation_fraction < 1:
            raise ValueError("validation_fraction must be in (0, 1)")


@dataclass
class GradientTape:
    """Exact per-connection gradients plus the node activations and deltas
    of the pass that produced them.  Only enabled connections appear."""
    gradients: dict[int, float]  # innovation -> dL/dw
    activations: dict[int, float]  # node id -> forward value
    deltas: dict[int, float]  # node id -> backpropagated delta
    loss: float = 0.0


def _targets(label: ActionLabel, schema: ActionSchema) -> tuple[int, np.ndarray, np.ndarray]:
    i = schema.label_index(label)
    return i, schema.normalized_params(label), schema.reg_mask(i)


def loss(pred: Prediction, label: ActionLabel, schema: ActionSchema) -> float:
    """Cross-entropy on the labeled action plus squared error on that
    action's own regression heads."""
    i, y_params, mask = _targets(label, schema)
    return float(K.sample_loss(pred.action_probs, pred.params, i, y_params, mask))


def backward(genome: Genome, x: np.ndarray, label: ActionLabel,
             schema: ActionSchema) -> GradientTape:
    net = compile_network(genome, schema)
    i, y_params, mask = _targets(label, schema)
    sample_loss = K.net_backward(
        *net.net_args, *net.head_args, np.asarray(x, np.float64),
        net.values, net.probs, net.params, i, y_params, mask, net.delta, net.grad)
    return GradientTape(
        gradients={int(inn): float(g) for inn, g in zip(net.conn_innov, net.grad)},
        activations={nid: float(net.values[j]) for j, nid in enumerate(net.node_ids)},
        deltas={nid: float(net.delta[j]) for j, nid in enumerate(net.node_ids)},
        loss=float(sample_loss),
    )


def sgd_step(genome: Genome, tape: GradientTape, alpha: float) -> Genome:
    """One update of every enabled weight; structure untouched."""
    out = genome.copy()
    for innov, g in tape.gradients.items():
        out.connections[innov].weight -= alpha * g
    return out


def _tensorize(snapshots: list[Snapshot], schema: ActionSchema):
    n = len(snapshots)
    X = np.stack([s.features for s in snapshots]).astype(np.float64)
    y = np.empty(n, np.int64)
    Y = np.empty((n, schema.n_reg), np.float64)
    M = np.empty((n, schema.n_reg), np.float64)
    for k, s in enumerate(snapshots):
        y[k], Y[k], M[k] = _targets(s.label, schema)
    return X, y, Y, M


def train(genome: Genome, snapshots: list[Snapshot], schema: ActionSchema,
          config: LossConfig | None = None,
          rng: np.random.Generator | None = None) -> Genome:
    """True SGD over the snapshots with early stopping.

    With enough samples, every 5th snapshot (by index) is held out and the
    validation loss is monitored; below the threshold the full training
    loss is monitored instead.  Weights return to the monitored minimum.
    """
    if not snapshots:
        raise ValueError("train called with no snapshots")
    config = config or LossConfig()
    rng = rng or np.random.default_rng(0)
    out = genome.copy()
    net = compile_network(out, schema)
    X, y, Y, M = _tensorize(snapshots, schema)
    n = len(snapshots)

    if n >= config.min_samples_for_validation:
        stride = max(2, round(1.0 / config.validation_fraction))
        monitor_idx = np.arange(0, n, stride)
        train_idx = np.array([i for i in range(n) if i % stride != 0], np.int64)
    else:
        monitor_idx = np.arange(n)
        train_idx = np.arange(n)

    def monitored() -> float:
        return float(K.batch_loss(*net.net_args, *net.head_args, X, y, Y, M,
                                  monitor_idx, net.values, net.probs, net.params))

    best = monitored()
    best_w = net.w.copy()
    stale = 0
    for _ in range(config.max_epochs):
        order = train_idx[rng.permutation(len(train_idx))]
        K.sgd_epoch(*net.net_args, *net.head_args, X, y, Y, M, order,
                    config.learning_rate, net.values, net.probs, net.params, net.delta)
        m = monitored()
        if m < best:
            best, best_w, stale = m, net.w.copy(), 0
        else:
            stale += 1
            if stale >= config.patience:
                break
    net.w[:] = best_w
    net.write_back(out)
    return out


def filter_sessions(dataset: TrainingDataset, target: int) -> list[Snapshot]:
    """Snapshots of exactly the sessions that covered the target, in order."""
    out: list[Snapshot] = []
    for sess in dataset.sessions:
        if target in sess.covered:
            out.extend(sess.snapshots)
    return out


@dataclass
class HybridResult:
    genome: Genome
    used_sgd: bool
    n_snapshots: int = 0


def hybrid_weight_change(genome: Genome, dataset: TrainingDataset | None, target: int,
                         p: float, schema: ActionSchema,
                         config: LossConfig | None = None,
                         rng: np.random.Generator | None = None) -> HybridResult:
    """With probability p, train on target-covering sessions; otherwise (or
    when no session covers the target) apply the classic perturbation."""
    if not 0 <= p <= 1:
        raise ValueError("p must be in [0, 1]")
    rng = rng or np.random.default_rng(0)
    u = rng.random()
    if u < p and dataset is not None:
        snaps = filter_sessions(dataset, target)
        if snaps:
            return HybridResult(train(genome, snaps, schema, config, rng), True, len(snaps))
    out = genome.copy()
    perturb_weights(out, rng)
    return HybridResult(out, False)
