"""NEAT genomes with multitask heads and their feed-forward evaluation.

One classification head per available action (softmax over the raw head
values) plus one tanh regression head per action parameter.  `activate`
is the convenience one-shot path; hot loops compile once and reuse the
CompiledNet buffers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..actions import ActionLabel, ActionSchema, label_to_event
from ..engine import InputEvent
from .compiled import CompiledNet, compile_network
from .genome import (
    ConnectionGene,
    Genome,
    InnovationRegistry,
    NodeGene,
    add_connection,
    add_node,
    initial_genome,
    output_nodes,
    perturb_weights,
)

__all__ = [
    "ActionLabel", "ActionSchema", "CompiledNet", "ConnectionGene", "Genome",
    "InnovationRegistry", "NodeGene", "Prediction", "activate", "add_connection",
    "add_node", "compile_network", "decode_action", "decode_label",
    "initial_genome", "output_nodes", "perturb_weights",
]


@dataclass(frozen=True)
class Prediction:
    action_probs: np.ndarray
    params: np.ndarray

    def __post_init__(self):
        if abs(float(self.action_probs.sum()) - 1.0) > 1e-9 or (self.action_probs < 0).any():
            raise ValueError("action_probs is not a probability vector")


def activate(genome: Genome, x: np.ndarray, schema: ActionSchema) -> Prediction:
    net = compile_network(genome, schema)
    probs, params = net.predict(np.asarray(x, np.float64))
    return Prediction(probs.copy(), params.copy())


def decode_label(pred: Prediction, schema: ActionSchema) -> ActionLabel:
    """Argmax action (ties -> lowest index), parameters denormalized from
    [-1, 1] back to their ranges; durations round to whole ticks."""
    i = int(np.argmax(pred.action_probs))
    spec = schema.actions[i]
    off = schema.reg_offset(i)
    vals = []
    for j, (lo, hi) in enumerate(schema.param_bounds(i)):
        p = float(pred.params[off + j])
        vals.append(lo + (p + 1.0) * (hi - lo) / 2.0)
    if spec.kind in ("mouse_move", "mouse_click"):
        return ActionLabel(spec.kind, x=vals[0], y=vals[1])
    dur = int(min(max(np.floor(vals[0] + 0.5), 1.0),
                  schema.d_max if spec.kind == "key_press" else schema.w_max))
    return ActionLabel(spec.kind, key=spec.key, duration=dur)


def decode_action(pred: Prediction, schema: ActionSchema) -> InputEvent:
    return label_to_event(decode_label(pred, schema))
