"""Graph model, topology documents, generators and flow enumeration."""

from __future__ import annotations

import itertools
import json
import random
from collections.abc import Mapping
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Any, NamedTuple


class TopologyError(ValueError):
    """Raised for malformed topology documents or invalid graph data."""


class Edge(NamedTuple):
    a: int
    b: int
    weight: float = 1.0


@dataclass(frozen=True)
class Topology:
    """Simple undirected graph with dense integer node ids.

    ``edges`` is normalised so that ``a < b`` and sorted; ``labels[i]`` is the
    display name of node ``i``.
    """

    name: str
    labels: tuple[str, ...]
    edges: tuple[Edge, ...]
    _adj: dict[int, dict[int, float]] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        n = len(self.labels)
        adj: dict[int, dict[int, float]] = {i: {} for i in range(n)}
        normalised = []
        for a, b, w in self.edges:
            if a == b:
                raise TopologyError(f"self-loop on node {a}")
            if not (0 <= a < n and 0 <= b < n):
                raise TopologyError(f"edge ({a}, {b}) references an unknown node")
            if not w > 0:
                raise TopologyError(f"edge ({a}, {b}) has non-positive weight {w}")
            if b in adj[a]:
                raise TopologyError(f"duplicate edge ({a}, {b})")
            adj[a][b] = float(w)
            adj[b][a] = float(w)
            normalised.append(Edge(min(a, b), max(a, b), float(w)))
        object.__setattr__(self, "edges", tuple(sorted(normalised)))
        object.__setattr__(self, "_adj", adj)

    @property
    def num_nodes(self) -> int:
        return len(self.labels)

    @property
    def nodes(self) -> range:
        return range(len(self.labels))

    def neighbors(self, node: int) -> list[int]:
        return sorted(self._adj[node])

    def degree(self, node: int) -> int:
        return len(self._adj[node])

    def has_edge(self, a: int, b: int) -> bool:
        return b in self._adj.get(a, {})

    def weight(self, a: int, b: int) -> float:
        return self._adj[a][b]

    def adjacency(self) -> dict[int, dict[int, float]]:
        """Copy of the adjacency map ``node -> {neighbour: weight}``."""
        return {n: dict(nbrs) for n, nbrs in self._adj.items()}

    def node_id(self, ref: int | str) -> int:
        """Resolve a node reference given as an id or a display label."""
        if isinstance(ref, int) and not isinstance(ref, bool):
            if 0 <= ref < self.num_nodes:
                return ref
            raise TopologyError(f"unknown node id {ref}")
        text = str(ref)
        if text in self.labels:
            return self.labels.index(text)
        if text.lstrip("-").isdigit():
            return self.node_id(int(text))
        raise TopologyError(f"unknown node {ref!r}")

    def is_connected(self) -> bool:
        if self.num_nodes == 0:
            return True
        seen = {0}
        stack = [0]
        while stack:
            for nbr in self._adj[stack.pop()]:
                if nbr not in seen:
                    seen.add(nbr)
                    stack.append(nbr)
        return len(seen) == self.num_nodes


@dataclass(frozen=True)
class Flow:
    """Unordered traffic demand between two distinct nodes; stored with ``s < t``."""

    s: int
    t: int
    weight: float = 1.0

    def __post_init__(self) -> None:
        if self.s == self.t:
            raise TopologyError(f"flow endpoints must differ, got ({self.s}, {self.t})")
        if self.weight < 0:
            raise TopologyError(f"flow ({self.s}, {self.t}) has negative weight")
        if self.s > self.t:
            s, t = self.t, self.s
            object.__setattr__(self, "s", s)
            object.__setattr__(self, "t", t)

    @property
    def pair(self) -> tuple[int, int]:
        return (self.s, self.t)


@dataclass(frozen=True)
class FlowSet:
    flows: tuple[Flow, ...]

    def __post_init__(self) -> None:
        pairs = [f.pair for f in self.flows]
        if len(set(pairs)) != len(pairs):
            raise TopologyError("flow set contains duplicate endpoint pairs")

    def __iter__(self):
        return iter(self.flows)

    def __len__(self) -> int:
        return len(self.flows)

    def __getitem__(self, idx: int) -> Flow:
        return self.flows[idx]

    @property
    def total_weight(self) -> Fraction:
        return sum((Fraction(f.weight) for f in self.flows), Fraction(0))


# --------------------------------------------------------------------------
# documents


def _fail(where: str, msg: str) -> TopologyError:
    return TopologyError(f"{where}: {msg}")


def parse_topology(text: str) -> Topology:
    """Parse a JSON topology document.

    Nodes receive dense ids in file order; edge endpoints refer to the
    ``id`` values used in the file.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TopologyError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise _fail("document", "expected an object")
    name = doc.get("name", "")
    if not isinstance(name, str):
        raise _fail("name", "expected a string")
    raw_nodes = doc.get("nodes")
    raw_edges = doc.get("edges", [])
    if not isinstance(raw_nodes, list):
        raise _fail("nodes", "expected an array")
    if not isinstance(raw_edges, list):
        raise _fail("edges", "expected an array")

    id_map: dict[int, int] = {}
    labels: list[str] = []
    for i, node in enumerate(raw_nodes):
        where = f"nodes[{i}]"
        if not isinstance(node, dict) or "id" not in node:
            raise _fail(where, "expected an object with an integer 'id'")
        nid = node["id"]
        if not isinstance(nid, int) or isinstance(nid, bool):
            raise _fail(where, f"id must be an integer, got {nid!r}")
        if nid in id_map:
            raise _fail(where, f"duplicate node id {nid}")
        label = node.get("label", str(nid))
        if not isinstance(label, str):
            raise _fail(where, "label must be a string")
        id_map[nid] = i
        labels.append(label)
    if len(set(labels)) != len(labels):
        raise _fail("nodes", "labels must be unique")

    edges: list[Edge] = []
    seen: set[frozenset[int]] = set()
    for i, edge in enumerate(raw_edges):
        where = f"edges[{i}]"
        if not isinstance(edge, dict) or "a" not in edge or "b" not in edge:
            raise _fail(where, "expected an object with 'a' and 'b'")
        a, b = edge["a"], edge["b"]
        for end in (a, b):
            if not isinstance(end, int) or isinstance(end, bool):
                raise _fail(where, f"endpoint must be an integer, got {end!r}")
        if a == b:
            raise _fail(where, f"self-loop on node {a}")
        for end in (a, b):
            if end not in id_map:
                raise _fail(where, f"dangling reference to node {end}")
        weight = edge.get("weight", 1.0)
        if isinstance(weight, bool) or not isinstance(weight, (int, float)) or not weight > 0:
            raise _fail(where, f"weight must be a positive number, got {weight!r}")
        key = frozenset((a, b))
        if key in seen:
            raise _fail(where, f"duplicate edge ({a}, {b})")
        seen.add(key)
        edges.append(Edge(id_map[a], id_map[b], float(weight)))
    return Topology(name, tuple(labels), tuple(edges))


def topology_to_dict(topology: Topology) -> dict[str, Any]:
    edges = []
    for a, b, w in topology.edges:
        item: dict[str, Any] = {"a": a, "b": b}
        if w != 1.0:
            item["weight"] = w
        edges.append(item)
    return {
        "name": topology.name,
        "nodes": [{"id": i, "label": lbl} for i, lbl in enumerate(topology.labels)],
        "edges": edges,
    }


def render_topology(topology: Topology) -> str:
    return json.dumps(topology_to_dict(topology), indent=2) + "\n"


def load_topology(path: str | Path) -> Topology:
    return parse_topology(Path(path).read_text(encoding="utf-8"))


BUILTIN_TOPOLOGIES = ("abilene", "polska", "sample8")


def builtin_topology(name: str) -> Topology:
    """Load one of the topology files shipped with the package."""
    if name not in BUILTIN_TOPOLOGIES:
        raise TopologyError(
            f"unknown builtin topology {name!r}; choose from {', '.join(BUILTIN_TOPOLOGIES)}"
        )
    text = resources.files("psd_planner.data").joinpath(f"{name}.json").read_text("utf-8")
    return parse_topology(text)


# --------------------------------------------------------------------------
# generators


def generate_ring(n: int) -> Topology:
    if n < 3:
        raise TopologyError(f"a ring needs at least 3 nodes, got {n}")
    edges = tuple(Edge(i, (i + 1) % n) for i in range(n))
    return Topology(f"ring{n}", tuple(str(i) for i in range(n)), edges)


def generate_complete(n: int) -> Topology:
    if n < 2:
        raise TopologyError(f"a complete graph needs at least 2 nodes, got {n}")
    edges = tuple(Edge(a, b) for a, b in itertools.combinations(range(n), 2))
    return Topology(f"complete{n}", tuple(str(i) for i in range(n)), edges)


def generate_random(n: int, num_edges: int, seed: int = 0) -> Topology:
    """Connected random graph: a random spanning tree plus uniformly drawn extra edges."""
    if n < 2:
        raise TopologyError(f"a random graph needs at least 2 nodes, got {n}")
    max_edges = n * (n - 1) // 2
    if not n - 1 <= num_edges <= max_edges:
        raise TopologyError(f"edge count for {n} nodes must lie in {n - 1}..{max_edges}")
    rng = random.Random(seed)
    order = list(range(n))
    rng.shuffle(order)
    chosen = {
        (min(order[i], order[j]), max(order[i], order[j]))
        for i in range(1, n)
        for j in [rng.randrange(i)]
    }
    rest = [pair for pair in itertools.combinations(range(n), 2) if pair not in chosen]
    chosen.update(rng.sample(rest, num_edges - len(chosen)))
    edges = tuple(Edge(a, b) for a, b in sorted(chosen))
    return Topology(f"random{n}_{num_edges}_{seed}", tuple(str(i) for i in range(n)), edges)


# --------------------------------------------------------------------------
# flows


def enumerate_flows(
    topology: Topology, weights: Mapping[tuple[int, int], float] | None = None
) -> FlowSet:
    """Any-to-any traffic: one flow per unordered node pair, in lexicographic order."""
    table: dict[tuple[int, int], float] = {}
    for (a, b), w in (weights or {}).items():
        if a == b or not (0 <= a < topology.num_nodes and 0 <= b < topology.num_nodes):
            raise TopologyError(f"weight given for unknown pair ({a}, {b})")
        if w < 0:
            raise TopologyError(f"negative weight {w} for pair ({a}, {b})")
        table[(min(a, b), max(a, b))] = float(w)
    return FlowSet(
        tuple(
            Flow(s, t, table.get((s, t), 1.0))
            for s, t in itertools.combinations(topology.nodes, 2)
        )
    )


def parse_weights(text: str, topology: Topology) -> dict[tuple[int, int], float]:
    """Parse a flow-weight document ``{"weights": [{"a", "b", "weight"}]}``.

    Endpoints may be node ids or labels.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TopologyError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    rows = doc.get("weights") if isinstance(doc, dict) else None
    if not isinstance(rows, list):
        raise _fail("weights", "expected an array")
    table: dict[tuple[int, int], float] = {}
    for i, row in enumerate(rows):
        where = f"weights[{i}]"
        if not isinstance(row, dict) or not {"a", "b", "weight"} <= row.keys():
            raise _fail(where, "expected an object with 'a', 'b' and 'weight'")
        try:
            a, b = topology.node_id(row["a"]), topology.node_id(row["b"])
        except TopologyError as exc:
            raise _fail(where, str(exc)) from None
        w = row["weight"]
        if isinstance(w, bool) or not isinstance(w, (int, float)):
            raise _fail(where, "weight must be a number")
        table[(a, b)] = float(w)
    return table
