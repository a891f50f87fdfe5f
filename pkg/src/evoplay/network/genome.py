"""NEAT genomes: node and connection genes, innovations, structural edits.

Node id layout is fixed per game: feature inputs take ids 0..n_inputs-1 in
schema order, the bias node follows, then one classification output per
action and one regression output per action parameter.  Hidden node ids
come from the innovation registry so the same split yields the same node
id in every lineage, keeping crossover aligned.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..actions import ActionSchema

NODE_KINDS = ("input", "bias", "hidden", "class_output", "reg_output")


@dataclass
class NodeGene:
    id: int
    kind: str
    action: int = -1  # class_output / reg_output: action index
    param: int = -1  # reg_output: parameter index within the action

    def to_dict(self) -> dict:
        d: dict = {"id": self.id, "kind": self.kind}
        if self.action >= 0:
            d["action"] = self.action
        if self.param >= 0:
            d["param"] = self.param
        return d

    @staticmethod
    def from_dict(d: dict) -> "NodeGene":
        if d["kind"] not in NODE_KINDS:
            raise ValueError(f"unknown node kind {d['kind']!r}")
        return NodeGene(int(d["id"]), d["kind"], int(d.get("action", -1)), int(d.get("param", -1)))


@dataclass
class ConnectionGene:
    in_node: int
    out_node: int
    weight: float
    enabled: bool
    innovation: int

    def to_dict(self) -> dict:
        return {"in": self.in_node, "out": self.out_node, "weight": self.weight,
                "enabled": self.enabled, "innovation": self.innovation}

    @staticmethod
    def from_dict(d: dict) -> "ConnectionGene":
        return ConnectionGene(int(d["in"]), int(d["out"]), float(d["weight"]),
                              bool(d["enabled"]), int(d["innovation"]))


@dataclass
class Genome:
    nodes: dict[int, NodeGene]
    connections: dict[int, ConnectionGene]  # keyed by innovation number
    fitness: float = math.inf  # minimised
    species_id: int = -1

    def copy(self) -> "Genome":
        return Genome(
            nodes={i: NodeGene(n.id, n.kind, n.action, n.param) for i, n in self.nodes.items()},
            connections={
                i: ConnectionGene(c.in_node, c.out_node, c.weight, c.enabled, c.innovation)
                for i, c in self.connections.items()
            },
            fitness=self.fitness,
            species_id=self.species_id,
        )

    @property
    def n_inputs(self) -> int:
        return sum(1 for n in self.nodes.values() if n.kind == "input")

    def max_innovation(self) -> int:
        return max(self.connections) if self.connections else -1

    def to_dict(self) -> dict:
        return {
            "nodes": [self.nodes[i].to_dict() for i in sorted(self.nodes)],
            "connections": [self.connections[i].to_dict() for i in sorted(self.connections)],
            "fitness": None if math.isinf(self.fitness) else self.fitness,
        }

    @staticmethod
    def from_dict(d: dict) -> "Genome":
        nodes = [NodeGene.from_dict(n) for n in d["nodes"]]
        conns = [ConnectionGene.from_dict(c) for c in d["connections"]]
        if len({n.id for n in nodes}) != len(nodes):
            raise ValueError("duplicate node ids")
        if len({c.innovation for c in conns}) != len(conns):
            raise ValueError("duplicate innovation numbers")
        g = Genome({n.id: n for n in nodes}, {c.innovation: c for c in conns})
        if d.get("fitness") is not None:
            g.fitness = float(d["fitness"])
        return g


class InnovationRegistry:
    """Assigns innovation numbers and hidden-node ids so that identical
    structural changes get identical numbers across the whole search."""

    def __init__(self):
        self._conn: dict[tuple[int, int], int] = {}
        self._split: dict[int, int] = {}
        self._next_innovation = 0
        self._next_node = 0

    def reserve_node_ids(self, n: int):
        self._next_node = max(self._next_node, n)

    def connection(self, in_node: int, out_node: int) -> int:
        key = (in_node, out_node)
        if key not in self._conn:
            self._conn[key] = self._next_innovation
            self._next_innovation += 1
        return self._conn[key]

    def node_for_split(self, innovation: int) -> int:
        if innovation not in self._split:
            self._split[innovation] = self._next_node
            self._next_node += 1
        return self._split[innovation]


def output_nodes(n_inputs: int, schema: ActionSchema) -> list[NodeGene]:
    """The fixed output layer: class head per action, then reg heads in the
    schema's flattened parameter order."""
    out: list[NodeGene] = []
    nid = n_inputs + 1
    for a in range(schema.n_actions):
        out.append(NodeGene(nid, "class_output", action=a))
        nid += 1
    for a in range(schema.n_actions):
        for p in range(len(schema.param_bounds(a))):
            out.append(NodeGene(nid, "reg_output", action=a, param=p))
            nid += 1
    return out


def initial_genome(n_inputs: int, schema: ActionSchema, registry: InnovationRegistry,
                   rng: np.random.Generator) -> Genome:
    """Minimal starting topology: inputs and bias fully connected to every
    output head, uniform random weights in [-1, 1], no hidden nodes."""
    nodes: dict[int, NodeGene] = {}
    for i in range(n_inputs):
        nodes[i] = NodeGene(i, "input")
    nodes[n_inputs] = NodeGene(n_inputs, "bias")
    outs = output_nodes(n_inputs, schema)
    for n in outs:
        nodes[n.id] = n
    registry.reserve_node_ids(n_inputs + 1 + len(outs))
    conns: dict[int, ConnectionGene] = {}
    for out in outs:
        for src in range(n_inputs + 1):
            innov = registry.connection(src, out.id)
            conns[innov] = ConnectionGene(src, out.id, float(rng.uniform(-1.0, 1.0)), True, innov)
    return Genome(nodes, conns)


def _reachable(connections, frm: int) -> set[int]:
    """Nodes reachable from `frm` over any (even disabled) connection."""
    adj: dict[int, list[int]] = {}
    for c in connections.values():
        adj.setdefault(c.in_node, []).append(c.out_node)
    seen = {frm}
    stack = [frm]
    while stack:
        n = stack.pop()
        for m in adj.get(n, ()):
            if m not in seen:
                seen.add(m)
                stack.append(m)
    return seen


def add_connection(genome: Genome, registry: InnovationRegistry,
                   rng: np.random.Generator) -> bool:
    """Insert one new feed-forward connection between unconnected nodes.
    Returns False when no legal pair exists."""
    existing = {(c.in_node, c.out_node) for c in genome.connections.values()}
    sources = sorted(n.id for n in genome.nodes.values() if n.kind in ("input", "bias", "hidden"))
    sinks = sorted(n.id for n in genome.nodes.values()
                   if n.kind in ("hidden", "class_output", "reg_output"))
    reach = {b: _reachable(genome.connections, b) for b in sinks}
    candidates = [
        (a, b)
        for a in sources
        for b in sinks
        # a -> b is legal unless it exists or b already reaches a (cycle)
        if a != b and (a, b) not in existing and a not in reach[b]
    ]
    if not candidates:
        return False
    a, b = candidates[int(rng.integers(len(candidates)))]
    innov = registry.connection(a, b)
    genome.connections[innov] = ConnectionGene(a, b, float(rng.uniform(-1.0, 1.0)), True, innov)
    return True


def add_node(genome: Genome, registry: InnovationRegistry, rng: np.random.Generator) -> bool:
    """Split a random enabled connection: disable it, insert a tanh hidden
    node, weight 1.0 in, old weight out (keeps initial behaviour close)."""
    enabled = sorted(i for i, c in genome.connections.items() if c.enabled)
    if not enabled:
        return False
    innov = enabled[int(rng.integers(len(enabled)))]
    old = genome.connections[innov]
    nid = registry.node_for_split(innov)
    if nid in genome.nodes:  # this exact split already exists in this lineage
        return False
    old.enabled = False
    genome.nodes[nid] = NodeGene(nid, "hidden")
    i1 = registry.connection(old.in_node, nid)
    i2 = registry.connection(nid, old.out_node)
    genome.connections[i1] = ConnectionGene(old.in_node, nid, 1.0, True, i1)
    genome.connections[i2] = ConnectionGene(nid, old.out_node, old.weight, True, i2)
    return True


def perturb_weights(genome: Genome, rng: np.random.Generator,
                    perturb_prob: float = 0.8, replace_prob: float = 0.1,
                    power: float = 0.5, init_range: float = 1.0):
    """Classic NEAT weight mutation, in place, deterministic given rng."""
    for innov in sorted(genome.connections):
        c = genome.connections[innov]
        r = rng.random()
        if r < perturb_prob:
            c.weight += float(rng.uniform(-power, power))
        elif r < perturb_prob + replace_prob:
            c.weight = float(rng.uniform(-init_range, init_range))
