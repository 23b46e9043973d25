"""Centrality-ranked round-robin manufacturer assignments (baselines)."""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction

from .metric import Assignment
from .topology import FlowSet, Topology

METRICS = {
    "nd": "nodal degree",
    "bwc": "betweenness",
    "cc": "closeness",
}


@dataclass(frozen=True)
class CentralityRanking:
    kind: str
    values: tuple[Fraction, ...]
    order: tuple[int, ...]


def _single_source(topology: Topology, source: int) -> tuple[dict[int, Fraction], dict[int, int]]:
    """Exact shortest distances and shortest-path counts from ``source``."""
    dist = {source: Fraction(0)}
    sigma = {source: 1}
    done: set[int] = set()
    heap = [(Fraction(0), source)]
    while heap:
        d, u = heapq.heappop(heap)
        if u in done:
            continue
        done.add(u)
        for v in topology.neighbors(u):
            nd = d + Fraction(topology.weight(u, v))
            if v not in dist or nd < dist[v]:
                dist[v] = nd
                sigma[v] = sigma[u]
                heapq.heappush(heap, (nd, v))
            elif nd == dist[v] and v not in done:
                sigma[v] += sigma[u]
    return dist, sigma


def _betweenness(topology: Topology, flows: FlowSet) -> list[Fraction]:
    if not len(flows):
        raise ValueError("betweenness needs at least one flow")
    tables = [_single_source(topology, n) for n in topology.nodes]
    values = [Fraction(0)] * topology.num_nodes
    for flow in flows:
        dist_s, sig_s = tables[flow.s]
        dist_t, sig_t = tables[flow.t]
        if flow.t not in dist_s:
            continue
        total = dist_s[flow.t]
        for v in topology.nodes:
            if v in (flow.s, flow.t) or v not in dist_s or v not in dist_t:
                continue
            if dist_s[v] + dist_t[v] == total:
                values[v] += Fraction(sig_s[v] * sig_t[v], sig_s[flow.t])
    return values


def _closeness(topology: Topology) -> list[Fraction]:
    if not topology.is_connected():
        raise ValueError("closeness centrality needs a connected topology")
    n = topology.num_nodes
    values = []
    for v in topology.nodes:
        dist, _ = _single_source(topology, v)
        total = sum(dist.values(), Fraction(0))
        values.append(Fraction(n - 1) / total if total else Fraction(0))
    return values


def centrality_ranking(topology: Topology, kind: str, flows: FlowSet | None = None) -> CentralityRanking:
    """Nodes sorted by descending centrality; equal values keep node-id order.

    Betweenness only counts the endpoint pairs present in ``flows``.
    """
    if kind == "nd":
        values = [Fraction(topology.degree(v)) for v in topology.nodes]
    elif kind == "bwc":
        if flows is None:
            raise ValueError("betweenness needs the flow set")
        values = _betweenness(topology, flows)
    elif kind == "cc":
        values = _closeness(topology)
    else:
        raise ValueError(f"unknown centrality metric {kind!r}; choose from {', '.join(METRICS)}")
    order = sorted(topology.nodes, key=lambda v: (-values[v], v))
    return CentralityRanking(kind, tuple(values), tuple(order))


def round_robin_assign(ranking: CentralityRanking, num_manufacturers: int) -> Assignment:
    if num_manufacturers < 1:
        raise ValueError("at least one manufacturer is required")
    manufacturers = [0] * len(ranking.order)
    for i, node in enumerate(ranking.order):
        manufacturers[node] = i % num_manufacturers
    return Assignment(tuple(manufacturers), num_manufacturers)


def heuristic_assignment(
    topology: Topology, kind: str, num_manufacturers: int, flows: FlowSet | None = None
) -> Assignment:
    return round_robin_assign(centrality_ranking(topology, kind, flows), num_manufacturers)
