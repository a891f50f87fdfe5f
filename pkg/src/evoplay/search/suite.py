"""Dynamic test suite: per-target reliable genomes plus the seeds they
passed the robustness check on, persisted as structured text."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..network import Genome
from ..network.serialize import genome_from_text, genome_to_text


@dataclass
class SuiteEntry:
    target: int
    genome: Genome
    seeds: list[int]


@dataclass
class DynamicTestSuite:
    game_id: str
    entries: list[SuiteEntry] = field(default_factory=list)

    def targets(self) -> list[int]:
        return [e.target for e in self.entries]


def save_suite(suite: DynamicTestSuite, path: str):
    lines = ["suite v1", f"game {suite.game_id}"]
    for e in suite.entries:
        lines.append(f"entry {e.target}")
        lines.append("seeds " + " ".join(str(s) for s in e.seeds))
        lines.append("genome")
        lines.append(genome_to_text(e.genome).rstrip("\n"))
        lines.append("end")
    with open(path, "w") as f:
        f.write("\n".join(lines) + "\n")


def load_suite(path: str) -> DynamicTestSuite:
    with open(path) as f:
        lines = f.read().splitlines()
    if not lines or lines[0] != "suite v1":
        raise ValueError(f"{path}: line 1: not a suite file")
    if len(lines) < 2 or not lines[1].startswith("game "):
        raise ValueError(f"{path}: line 2: missing game record")
    suite = DynamicTestSuite(game_id=lines[1][5:].strip())
    i = 2
    while i < len(lines):
        line = lines[i].strip()
        if not line:
            i += 1
            continue
        if not line.startswith("entry "):
            raise ValueError(f"{path}: line {i + 1}: expected entry record")
        target = int(line.split()[1])
        if not lines[i + 1].startswith("seeds"):
            raise ValueError(f"{path}: line {i + 2}: expected seeds record")
        seeds = [int(s) for s in lines[i + 1].split()[1:]]
        if lines[i + 2].strip() != "genome":
            raise ValueError(f"{path}: line {i + 3}: expected genome block")
        j = i + 3
        while j < len(lines) and lines[j].strip() != "end":
            j += 1
        if j == len(lines):
            raise ValueError(f"{path}: line {i + 3}: unterminated genome block")
        genome = genome_from_text("\n".join(lines[i + 3:j]))
        suite.entries.append(SuiteEntry(target, genome, seeds))
        i = j + 1
    return suite
