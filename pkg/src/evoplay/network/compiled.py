"""Flattening genomes into the array form the kernels execute.

Compilation topologically sorts the nodes over enabled connections (Kahn,
lowest node id first, so the order is deterministic), groups connections
by destination, and locates the output heads.  The weight array is a
mutable copy; `write_back` returns trained weights to the genome.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np

from ..actions import ActionSchema
from . import kernels as K
from .genome import Genome


class CompiledNet:
    def __init__(self, genome: Genome, schema: ActionSchema):
        nodes = genome.nodes
        enabled = [c for i, c in sorted(genome.connections.items()) if c.enabled]
        incoming: dict[int, int] = {nid: 0 for nid in nodes}
        for c in enabled:
            if c.in_node not in nodes or c.out_node not in nodes:
                raise ValueError(f"connection {c.innovation} references a missing node")
            incoming[c.out_node] += 1
        ready = [nid for nid, deg in incoming.items() if deg == 0]
        heapq.heapify(ready)
        out_edges: dict[int, list[int]] = {}
        for c in enabled:
            out_edges.setdefault(c.in_node, []).append(c.out_node)
        order: list[int] = []
        while ready:
            nid = heapq.heappop(ready)
            order.append(nid)
            for m in out_edges.get(nid, ()):
                incoming[m] -= 1
                if incoming[m] == 0:
                    heapq.heappush(ready, m)
        if len(order) != len(nodes):
            raise ValueError("enabled-connection graph has a cycle")

        pos = {nid: j for j, nid in enumerate(order)}
        n = len(order)
        self.node_ids = order
        self.node_act = np.zeros(n, np.int32)
        self.node_arg = np.full(n, -1, np.int32)
        act_code = {"input": 0, "bias": 1, "hidden": 2, "class_output": 3, "reg_output": 3}
        for nid, j in pos.items():
            g = nodes[nid]
            self.node_act[j] = act_code[g.kind]
            if g.kind == "input":
                self.node_arg[j] = g.id  # input ids are feature indices

        by_dst = sorted(enabled, key=lambda c: (pos[c.out_node], pos[c.in_node]))
        self.conn_src = np.array([pos[c.in_node] for c in by_dst], np.int32)
        self.w = np.array([c.weight for c in by_dst], np.float64)
        self.conn_innov = np.array([c.innovation for c in by_dst], np.int64)
        self.in_start = np.zeros(n, np.int32)
        self.in_end = np.zeros(n, np.int32)
        k = 0
        for j in range(n):
            self.in_start[j] = k
            while k < len(by_dst) and pos[by_dst[k].out_node] == j:
                k += 1
            self.in_end[j] = k

        n_class = schema.n_actions
        class_pos = np.full(n_class, -1, np.int32)
        reg_pos = np.full(schema.n_reg, -1, np.int32)
        for nid, j in pos.items():
            g = nodes[nid]
            if g.kind == "class_output":
                if not (0 <= g.action < n_class) or class_pos[g.action] >= 0:
                    raise ValueError(f"bad class head for action {g.action}")
                class_pos[g.action] = j
            elif g.kind == "reg_output":
                slot = schema.reg_offset(g.action) + g.param
                if not (0 <= slot < schema.n_reg) or reg_pos[slot] >= 0:
                    raise ValueError(f"bad regression head ({g.action}, {g.param})")
                reg_pos[slot] = j
        if (class_pos < 0).any() or (reg_pos < 0).any():
            raise ValueError("genome is missing output heads for this action schema")
        self.class_pos = class_pos
        self.reg_pos = reg_pos

        self.n_inputs = int((self.node_act == 0).sum())
        self.values = np.zeros(n, np.float64)
        self.probs = np.zeros(n_class, np.float64)
        self.params = np.zeros(schema.n_reg, np.float64)
        self.delta = np.zeros(n, np.float64)
        self.grad = np.zeros(len(by_dst), np.float64)

    @property
    def net_args(self) -> tuple:
        return (self.node_act, self.node_arg, self.in_start, self.in_end, self.conn_src, self.w)

    @property
    def head_args(self) -> tuple:
        return (self.class_pos, self.reg_pos)

    def predict(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Forward pass; returns (probs, params) views into reused buffers."""
        if x.shape[0] != self.n_inputs:
            raise ValueError("feature vector length does not match network inputs")
        K.net_predict(*self.net_args, *self.head_args, x,
                      self.values, self.probs, self.params)
        return self.probs, self.params

    def write_back(self, genome: Genome):
        for k, innov in enumerate(self.conn_innov):
            genome.connections[int(innov)].weight = float(self.w[k])


def compile_network(genome: Genome, schema: ActionSchema) -> CompiledNet:
    return CompiledNet(genome, schema)
