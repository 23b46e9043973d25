"""Path Set Diversity scoring.

Every path reward is ``1 / |manufacturers on the path|``. A flow collects the
rewards of its k shortest paths, skipping any path whose manufacturer set
repeats one seen earlier in the list. The network score is the
weight-averaged flow reward. All arithmetic is exact (``Fraction``).
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .paths import Combo, Path, PathSet, all_path_sets, path_combo
from .topology import Flow, FlowSet, Topology


class AssignmentError(ValueError):
    pass


@dataclass(frozen=True)
class Assignment:
    """Manufacturer index for every node, ``manufacturers[node] in range(num_manufacturers)``."""

    manufacturers: tuple[int, ...]
    num_manufacturers: int

    def __post_init__(self) -> None:
        if self.num_manufacturers < 1:
            raise AssignmentError("at least one manufacturer is required")
        object.__setattr__(self, "manufacturers", tuple(int(m) for m in self.manufacturers))
        for node, m in enumerate(self.manufacturers):
            if not 0 <= m < self.num_manufacturers:
                raise AssignmentError(
                    f"node {node} has manufacturer {m}, outside 0..{self.num_manufacturers - 1}"
                )

    @classmethod
    def uniform(cls, num_nodes: int, num_manufacturers: int, manufacturer: int = 0) -> Assignment:
        return cls((manufacturer,) * num_nodes, num_manufacturers)

    def __len__(self) -> int:
        return len(self.manufacturers)

    def __getitem__(self, node: int) -> int:
        return self.manufacturers[node]

    def classes(self) -> list[list[int]]:
        """Node lists per manufacturer."""
        out: list[list[int]] = [[] for _ in range(self.num_manufacturers)]
        for node, m in enumerate(self.manufacturers):
            out[m].append(node)
        return out

    def relabel(self, mapping: Sequence[int]) -> Assignment:
        return Assignment(tuple(mapping[m] for m in self.manufacturers), self.num_manufacturers)

    def check_covers(self, topology: Topology) -> None:
        if len(self.manufacturers) != topology.num_nodes:
            raise AssignmentError(
                f"assignment covers {len(self.manufacturers)} nodes, "
                f"topology {topology.name!r} has {topology.num_nodes}"
            )


@dataclass(frozen=True)
class PathScore:
    path: Path
    combo: Combo
    kept: bool
    duplicate_of: int | None  # index of the earlier path with the same combo
    reward: Fraction  # zero for removed paths


@dataclass(frozen=True)
class FlowScore:
    flow: Flow
    paths: tuple[PathScore, ...]
    reward: Fraction

    @property
    def no_paths(self) -> bool:
        return not self.paths

    @property
    def kept(self) -> list[PathScore]:
        return [p for p in self.paths if p.kept]


@dataclass(frozen=True)
class ScoreReport:
    k: int
    num_manufacturers: int
    flows: tuple[FlowScore, ...]
    weighted_sum: Fraction
    total_weight: Fraction

    @property
    def score(self) -> Fraction:
        return self.weighted_sum / self.total_weight

    @property
    def flows_without_paths(self) -> list[Flow]:
        return [fs.flow for fs in self.flows if fs.no_paths]


def path_reward(combo: Combo) -> Fraction:
    if not combo:
        raise ValueError("a path reward needs at least one manufacturer")
    return Fraction(1, len(combo))


def flow_reward(path_set: PathSet, assignment: Assignment) -> FlowScore:
    scored: list[PathScore] = []
    first_seen: dict[Combo, int] = {}
    total = Fraction(0)
    for idx, path in enumerate(path_set.paths):
        combo = path_combo(path, assignment)
        if combo in first_seen:
            scored.append(PathScore(path, combo, False, first_seen[combo], Fraction(0)))
            continue
        first_seen[combo] = idx
        reward = path_reward(combo)
        total += reward
        scored.append(PathScore(path, combo, True, None, reward))
    return FlowScore(path_set.flow, tuple(scored), total)


def score_path_sets(
    path_sets: Sequence[PathSet], assignment: Assignment, k: int
) -> ScoreReport:
    flow_scores = tuple(flow_reward(ps, assignment) for ps in path_sets)
    total_weight = sum((Fraction(fs.flow.weight) for fs in flow_scores), Fraction(0))
    if total_weight <= 0:
        raise ValueError("flow weights sum to zero; the score is undefined")
    weighted = sum((Fraction(fs.flow.weight) * fs.reward for fs in flow_scores), Fraction(0))
    return ScoreReport(k, assignment.num_manufacturers, flow_scores, weighted, total_weight)


def psd_score(topology: Topology, flows: FlowSet, assignment: Assignment, k: int) -> ScoreReport:
    assignment.check_covers(topology)
    return score_path_sets(all_path_sets(topology, flows, k), assignment, k)


def flow_reward_upper_bound(num_manufacturers: int) -> Fraction:
    """Best possible flow reward: every non-empty manufacturer subset used once.

    ``sum_{i=1..M} C(M, i) / i``.
    """
    if num_manufacturers < 1:
        raise ValueError("at least one manufacturer is required")
    return sum(
        (Fraction(comb(num_manufacturers, i), i) for i in range(1, num_manufacturers + 1)),
        Fraction(0),
    )
