"""k shortest eligible simple paths per flow, and per-path manufacturer sets."""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING

from .topology import Flow, FlowSet, Topology, TopologyError

if TYPE_CHECKING:
    from .metric import Assignment

Combo = frozenset[int]


@dataclass(frozen=True)
class Path:
    nodes: tuple[int, ...]
    cost: Fraction

    @property
    def interior(self) -> tuple[int, ...]:
        return self.nodes[1:-1]

    @property
    def hops(self) -> int:
        return len(self.nodes) - 1


@dataclass(frozen=True)
class PathSet:
    flow: Flow
    k: int
    paths: tuple[Path, ...]

    def __len__(self) -> int:
        return len(self.paths)

    def __iter__(self):
        return iter(self.paths)

    def truncate(self, k: int) -> PathSet:
        """Path set for a smaller k; valid because results for k are a prefix of k+1."""
        if k > self.k:
            raise ValueError(f"cannot extend a path set computed for k={self.k} to k={k}")
        return PathSet(self.flow, k, self.paths[:k])


def _exact_adjacency(topology: Topology) -> dict[int, dict[int, Fraction]]:
    return {
        n: {m: Fraction(w) for m, w in nbrs.items()}
        for n, nbrs in topology.adjacency().items()
    }


def _distances_to(
    adj: dict[int, dict[int, Fraction]],
    target: int,
    blocked_nodes: set[int],
    blocked_edges: set[tuple[int, int]],
) -> dict[int, Fraction]:
    dist = {target: Fraction(0)}
    heap: list[tuple[Fraction, int]] = [(Fraction(0), target)]
    done: set[int] = set()
    while heap:
        d, u = heapq.heappop(heap)
        if u in done:
            continue
        done.add(u)
        for v, w in adj[u].items():
            if v in blocked_nodes or (v, u) in blocked_edges:
                continue
            nd = d + w
            if v not in dist or nd < dist[v]:
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    return dist


def _smallest_shortest_path(
    adj: dict[int, dict[int, Fraction]],
    source: int,
    target: int,
    blocked_nodes: set[int],
    blocked_edges: set[tuple[int, int]],
) -> tuple[Fraction, tuple[int, ...]] | None:
    """Minimum-cost path, ties broken by the lexicographically smallest node sequence."""
    dist = _distances_to(adj, target, blocked_nodes, blocked_edges)
    if source not in dist:
        return None
    # Positive weights make the greedy walk along tight edges simple and lex-minimal.
    path = [source]
    u = source
    while u != target:
        for v in sorted(adj[u]):
            if v in blocked_nodes or (u, v) in blocked_edges or v not in dist:
                continue
            if adj[u][v] + dist[v] == dist[u]:
                path.append(v)
                u = v
                break
    return dist[source], tuple(path)


def k_shortest_paths(topology: Topology, flow: Flow, k: int) -> PathSet:
    """The ``k`` cheapest simple paths between the flow endpoints.

    The direct edge between the endpoints, if any, is never returned: a
    one-hop path has no intermediate node and so carries no manufacturer.
    Paths are ordered by ``(cost, node sequence)``.
    """
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    for end in (flow.s, flow.t):
        if not 0 <= end < topology.num_nodes:
            raise TopologyError(f"flow endpoint {end} is not in the topology")
    adj = _exact_adjacency(topology)
    s, t = flow.s, flow.t
    adj[s].pop(t, None)
    adj[t].pop(s, None)

    first = _smallest_shortest_path(adj, s, t, set(), set())
    if first is None:
        return PathSet(flow, k, ())
    accepted: list[tuple[Fraction, tuple[int, ...]]] = [first]
    candidates: list[tuple[Fraction, tuple[int, ...]]] = []
    known = {first[1]}

    while len(accepted) < k:
        _, last = accepted[-1]
        root_cost = Fraction(0)
        for i in range(len(last) - 1):
            spur = last[i]
            root = last[: i + 1]
            if i:
                root_cost += adj[last[i - 1]][spur]
            blocked_edges: set[tuple[int, int]] = set()
            for _, p in accepted:
                if len(p) > i + 1 and p[: i + 1] == root:
                    blocked_edges.add((p[i], p[i + 1]))
                    blocked_edges.add((p[i + 1], p[i]))
            found = _smallest_shortest_path(adj, spur, t, set(root[:-1]), blocked_edges)
            if found is None:
                continue
            spur_cost, spur_path = found
            full = root[:-1] + spur_path
            if full not in known:
                known.add(full)
                heapq.heappush(candidates, (root_cost + spur_cost, full))
        if not candidates:
            break
        accepted.append(heapq.heappop(candidates))

    return PathSet(flow, k, tuple(Path(nodes, cost) for cost, nodes in accepted))


def all_path_sets(topology: Topology, flows: FlowSet, k: int) -> list[PathSet]:
    return [k_shortest_paths(topology, flow, k) for flow in flows]


def path_combo(path: Path, assignment: Assignment) -> Combo:
    """Set of manufacturers used by the intermediate nodes of ``path``."""
    manufacturers = assignment.manufacturers
    combo = set()
    for node in path.interior:
        if not 0 <= node < len(manufacturers):
            raise ValueError(f"node {node} has no manufacturer assigned")
        combo.add(manufacturers[node])
    return frozenset(combo)
