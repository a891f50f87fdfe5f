"""Self-describing text form of a genome: one line per node, one per
connection, with innovation numbers.  Weights use repr so the round trip
is bit-exact."""

from __future__ import annotations

from .genome import ConnectionGene, Genome, NodeGene


def genome_to_text(genome: Genome) -> str:
    lines = []
    for nid in sorted(genome.nodes):
        n = genome.nodes[nid]
        parts = [f"node {n.id} {n.kind}"]
        if n.action >= 0:
            parts.append(f"action={n.action}")
        if n.param >= 0:
            parts.append(f"param={n.param}")
        lines.append(" ".join(parts))
    for innov in sorted(genome.connections):
        c = genome.connections[innov]
        lines.append(f"conn {c.innovation} {c.in_node} {c.out_node} "
                     f"{c.weight!r} {1 if c.enabled else 0}")
    return "\n".join(lines) + "\n"


def genome_from_text(text: str) -> Genome:
    nodes: dict[int, NodeGene] = {}
    conns: dict[int, ConnectionGene] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        try:
            if fields[0] == "node":
                nid, kind = int(fields[1]), fields[2]
                action = param = -1
                for extra in fields[3:]:
                    key, _, val = extra.partition("=")
                    if key == "action":
                        action = int(val)
                    elif key == "param":
                        param = int(val)
                    else:
                        raise ValueError(f"unknown node field {key!r}")
                nodes[nid] = NodeGene(nid, kind, action, param)
            elif fields[0] == "conn":
                innov, a, b = int(fields[1]), int(fields[2]), int(fields[3])
                conns[innov] = ConnectionGene(a, b, float(fields[4]),
                                              fields[5] == "1", innov)
            else:
                raise ValueError(f"unknown record {fields[0]!r}")
        except (IndexError, ValueError) as e:
            raise ValueError(f"genome text line {lineno}: {e}") from None
    if not nodes:
        raise ValueError("genome text has no node records")
    return Genome(nodes=nodes, connections=conns)
