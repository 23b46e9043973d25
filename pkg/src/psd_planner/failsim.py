"""Manufacturer failure scenarios and surviving-flow percentages."""

from __future__ import annotations

import itertools
from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction

from .metric import Assignment
from .paths import PathSet
from .topology import FlowSet, Topology

MODES = ("residual", "kpaths")


@dataclass(frozen=True)
class SuccessReport:
    scenario: tuple[int, ...]
    mode: str
    success: tuple[bool, ...]  # one flag per flow, in flow order
    flows_total: int
    flows_success: int
    pct_success: float
    pct_success_weighted: float


def failure_scenarios(num_manufacturers: int) -> list[tuple[int, ...]]:
    """Every non-empty strict subset of manufacturers, by size then members."""
    if num_manufacturers < 2:
        raise ValueError("failure scenarios need at least two manufacturers")
    return [
        combo
        for size in range(1, num_manufacturers)
        for combo in itertools.combinations(range(num_manufacturers), size)
    ]


def format_scenario(scenario: Sequence[int]) -> str:
    return "[" + ",".join(str(m) for m in scenario) + "]"


def _connected(topology: Topology, s: int, t: int, dead: Sequence[bool]) -> bool:
    seen = {s}
    stack = [s]
    while stack:
        u = stack.pop()
        for v in topology.neighbors(u):
            if v == t:
                return True
            if v not in seen and not dead[v]:
                seen.add(v)
                stack.append(v)
    return False


def simulate(
    topology: Topology,
    assignment: Assignment,
    flows: FlowSet,
    scenario: Sequence[int],
    mode: str = "residual",
    path_sets: Sequence[PathSet] | None = None,
) -> SuccessReport:
    """Fail every node built by a manufacturer in ``scenario``.

    Flow endpoints never fail. In ``residual`` mode a flow survives when its
    endpoints stay connected in what is left of the graph; in ``kpaths`` mode
    it survives when its direct edge or one of its scored paths avoids every
    failed node.
    """
    assignment.check_covers(topology)
    for m in scenario:
        if not 0 <= m < assignment.num_manufacturers:
            raise ValueError(
                f"scenario fails manufacturer {m}, assignment has {assignment.num_manufacturers}"
            )
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}; choose from {', '.join(MODES)}")
    if mode == "kpaths":
        if path_sets is None:
            raise ValueError("kpaths mode needs the precomputed path sets")
        if len(path_sets) != len(flows):
            raise ValueError("one path set per flow is required")

    failed = set(scenario)
    dead = [assignment[n] in failed for n in topology.nodes]
    success = []
    for r, flow in enumerate(flows):
        if topology.has_edge(flow.s, flow.t):
            success.append(True)
        elif mode == "residual":
            success.append(_connected(topology, flow.s, flow.t, dead))
        else:
            success.append(
                any(not any(dead[n] for n in p.interior) for p in path_sets[r].paths)
            )

    total_w = flows.total_weight
    ok_w = sum((Fraction(f.weight) for f, ok in zip(flows, success) if ok), Fraction(0))
    count = sum(success)
    return SuccessReport(
        scenario=tuple(sorted(failed)),
        mode=mode,
        success=tuple(success),
        flows_total=len(flows),
        flows_success=count,
        pct_success=100.0 * count / len(flows) if len(flows) else 100.0,
        pct_success_weighted=float(100 * ok_w / total_w) if total_w else 100.0,
    )


def simulate_all(
    topology: Topology,
    assignment: Assignment,
    flows: FlowSet,
    mode: str = "residual",
    path_sets: Sequence[PathSet] | None = None,
) -> list[SuccessReport]:
    return [
        simulate(topology, assignment, flows, scenario, mode, path_sets)
        for scenario in failure_scenarios(assignment.num_manufacturers)
    ]
