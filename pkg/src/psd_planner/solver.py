"""Manufacturer assignment search maximising the weighted flow reward.

Every auxiliary quantity of the integer program (which manufacturers a path
uses, which combinations occur per path and per flow, the flow reward) is a
function of the node assignment alone, so the program is solved as a search
over assignments with the scoring routine as evaluator.
"""

from __future__ import annotations

import logging
import math
import random
import time
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction

from .heuristics import METRICS, heuristic_assignment
from .metric import Assignment, flow_reward, flow_reward_upper_bound
from .paths import Combo, PathSet, all_path_sets
from .topology import FlowSet, Topology

log = logging.getLogger(__name__)


class InvariantError(RuntimeError):
    """An internal consistency check failed."""


@dataclass(frozen=True)
class Instance:
    topology: Topology
    flows: FlowSet
    num_manufacturers: int
    k: int
    path_sets: tuple[PathSet, ...]
    combos: tuple[Combo, ...]
    combo_rewards: tuple[Fraction, ...]

    @property
    def total_weight(self) -> Fraction:
        return self.flows.total_weight


def combo_universe(num_manufacturers: int) -> list[Combo]:
    """All non-empty manufacturer subsets, by size then members."""
    combos = [
        frozenset(m for m in range(num_manufacturers) if mask >> m & 1)
        for mask in range(1, 1 << num_manufacturers)
    ]
    return sorted(combos, key=lambda c: (len(c), sorted(c)))


def combo_bits(combo: Combo, num_manufacturers: int) -> str:
    """Binary word with position ``m`` set when manufacturer ``m`` is present."""
    return "".join("1" if m in combo else "0" for m in range(num_manufacturers))


def build_instance(
    topology: Topology,
    flows: FlowSet,
    num_manufacturers: int,
    k: int,
    path_sets: Sequence[PathSet] | None = None,
) -> Instance:
    if num_manufacturers < 1:
        raise ValueError("at least one manufacturer is required")
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    if path_sets is None:
        path_sets = all_path_sets(topology, flows, k)
    else:
        path_sets = [ps.truncate(k) for ps in path_sets]
    combos = combo_universe(num_manufacturers)
    return Instance(
        topology,
        flows,
        num_manufacturers,
        k,
        tuple(path_sets),
        tuple(combos),
        tuple(Fraction(1, len(c)) for c in combos),
    )


def evaluate_objective(instance: Instance, assignment: Assignment) -> Fraction:
    """Weighted sum of flow rewards (not normalised by the total weight)."""
    if assignment.num_manufacturers > instance.num_manufacturers:
        raise ValueError(
            f"assignment uses {assignment.num_manufacturers} manufacturers, "
            f"instance allows {instance.num_manufacturers}"
        )
    assignment.check_covers(instance.topology)
    return sum(
        (Fraction(ps.flow.weight) * flow_reward(ps, assignment).reward for ps in instance.path_sets),
        Fraction(0),
    )


@dataclass
class OptimizationResult:
    assignment: Assignment
    objective: Fraction
    score: Fraction
    solver: str
    proven_optimal: bool
    status: str
    num_manufacturers: int
    k: int
    nodes_explored: int = 0
    iterations: int = 0
    wall_time: float = 0.0
    seed: int | None = None
    seed_values: dict[str, Fraction] = field(default_factory=dict)


class _Evaluator:
    """Integer-scaled evaluator: rewards are multiplied by lcm(1..M)."""

    def __init__(self, instance: Instance) -> None:
        self.instance = instance
        self.n = instance.topology.num_nodes
        self.m = instance.num_manufacturers
        self.scale = math.lcm(*range(1, self.m + 1))
        self.reward = [0] + [self.scale // c for c in range(1, self.m + 1)]
        self.cap = int(flow_reward_upper_bound(self.m) * self.scale)
        self.paths = [[p.interior for p in ps.paths] for ps in instance.path_sets]
        raw = [Fraction(ps.flow.weight) for ps in instance.path_sets]
        self.weights: list[int] | list[Fraction]
        if all(w.denominator == 1 for w in raw):
            self.weights = [int(w) for w in raw]
        else:
            self.weights = raw
        self.node_paths: list[list[tuple[int, int]]] = [[] for _ in range(self.n)]
        for r, interiors in enumerate(self.paths):
            for j, interior in enumerate(interiors):
                for node in interior:
                    self.node_paths[node].append((r, j))
        self.node_flows = [sorted({r for r, _ in np}) for np in self.node_paths]
        self.relevant = [bool(np) for np in self.node_paths]

    def flow_value(self, r: int, assign: Sequence[int]) -> int:
        seen = set()
        total = 0
        for interior in self.paths[r]:
            mask = 0
            for node in interior:
                mask |= 1 << assign[node]
            if mask not in seen:
                seen.add(mask)
                total += self.reward[mask.bit_count()]
        return total

    def flow_values(self, assign: Sequence[int]) -> list[int]:
        return [self.flow_value(r, assign) for r in range(len(self.paths))]

    def total(self, values: Iterable[int]) -> int | Fraction:
        return sum(w * v for w, v in zip(self.weights, values))

    def to_fraction(self, scaled: int | Fraction) -> Fraction:
        return Fraction(scaled) / self.scale

    def canonical(self, assign: Sequence[int]) -> tuple[int, ...]:
        """Label-symmetry representative: unused nodes on 0, labels by first use."""
        out = []
        relabel: dict[int, int] = {}
        for node, m in enumerate(assign):
            if not self.relevant[node]:
                m = 0
            if m not in relabel:
                relabel[m] = len(relabel)
            out.append(relabel[m])
        return tuple(out)


def _seed_assignments(instance: Instance) -> dict[str, Assignment]:
    topo, m = instance.topology, instance.num_manufacturers
    seeds = {"uniform": Assignment.uniform(topo.num_nodes, m)}
    for kind in METRICS:
        try:
            seeds[kind] = heuristic_assignment(topo, kind, m, instance.flows)
        except ValueError as exc:
            log.debug("skipping %s seed: %s", kind, exc)
    return seeds


def _finish(
    instance: Instance,
    ev: _Evaluator,
    assign: Sequence[int],
    scaled: int | Fraction,
    **fields,
) -> OptimizationResult:
    assignment = Assignment(tuple(assign), instance.num_manufacturers)
    objective = ev.to_fraction(scaled)
    check = evaluate_objective(instance, assignment)
    if check != objective:
        raise InvariantError(f"search value {objective} disagrees with re-evaluation {check}")
    return OptimizationResult(
        assignment=assignment,
        objective=objective,
        score=objective / instance.total_weight if instance.total_weight else Fraction(0),
        num_manufacturers=instance.num_manufacturers,
        k=instance.k,
        **fields,
    )


class _BudgetExhausted(Exception):
    pass


def solve_exact(
    instance: Instance,
    max_nodes: int | None = 10_000_000,
    time_limit: float | None = None,
) -> OptimizationResult:
    """Branch and bound over node -> manufacturer choices, nodes in id order.

    Returns the lexicographically smallest optimal assignment. Manufacturer
    labels are interchangeable, so node ``i`` may only use a label at most one
    above the largest label used by nodes ``0..i-1``. Nodes on no scored path
    are fixed to manufacturer 0. ``proven_optimal`` is false when the budget
    ran out before the search tree was exhausted.
    """
    if max_nodes is not None and max_nodes <= 0:
        raise ValueError("max_nodes must be positive")
    if time_limit is not None and time_limit <= 0:
        raise ValueError("time_limit must be positive")
    started = time.perf_counter()
    ev = _Evaluator(instance)
    n, num_m = ev.n, ev.m
    weights = ev.weights

    seed_values: dict[str, Fraction] = {}
    best_value: int | Fraction | None = None
    best_assign: tuple[int, ...] = ()
    for name, seed in _seed_assignments(instance).items():
        cand = ev.canonical(seed.manufacturers)
        value = ev.total(ev.flow_values(cand))
        seed_values[name] = ev.to_fraction(value)
        if best_value is None or value > best_value or (value == best_value and cand < best_assign):
            best_value, best_assign = value, cand

    assign = [0] * n
    masks = [[0] * len(p) for p in ev.paths]
    left = [[len(interior) for interior in p] for p in ev.paths]
    cap, reward = ev.cap, ev.reward

    def flow_bound(r: int) -> int:
        fixed = set()
        extra = 0
        for j, mask in enumerate(masks[r]):
            if left[r][j] == 0:
                fixed.add(mask)
            else:
                extra += reward[mask.bit_count()] if mask else ev.scale
        value = extra + sum(reward[mask.bit_count()] for mask in fixed)
        return min(value, cap)

    bounds = [flow_bound(r) for r in range(len(ev.paths))]
    state = {"bound": ev.total(bounds), "nodes": 0}

    def place(node: int, m: int) -> list[tuple[int, int, int]]:
        undo = []
        bit = 1 << m
        for r, j in ev.node_paths[node]:
            undo.append((r, j, masks[r][j]))
            masks[r][j] |= bit
            left[r][j] -= 1
        for r in ev.node_flows[node]:
            new = flow_bound(r)
            state["bound"] += weights[r] * (new - bounds[r])
            bounds[r] = new
        return undo

    def unplace(node: int, undo: list[tuple[int, int, int]]) -> None:
        for r, j, old in reversed(undo):
            masks[r][j] = old
            left[r][j] += 1
        for r in ev.node_flows[node]:
            new = flow_bound(r)
            state["bound"] += weights[r] * (new - bounds[r])
            bounds[r] = new

    def worth_exploring(depth: int) -> bool:
        b = state["bound"]
        if b > best_value:
            return True
        return b == best_value and tuple(assign[:depth]) <= best_assign[:depth]

    def dfs(i: int, max_used: int) -> None:
        nonlocal best_value, best_assign
        state["nodes"] += 1
        if max_nodes is not None and state["nodes"] > max_nodes:
            raise _BudgetExhausted
        if time_limit is not None and state["nodes"] % 64 == 0:
            if time.perf_counter() - started > time_limit:
                raise _BudgetExhausted
        if i == n:
            value = state["bound"]
            cand = tuple(assign)
            if value > best_value or (value == best_value and cand < best_assign):
                best_value, best_assign = value, cand
            return
        choices = range(min(num_m - 1, max_used + 1) + 1) if ev.relevant[i] else (0,)
        for m in choices:
            assign[i] = m
            undo = place(i, m)
            if worth_exploring(i + 1):
                dfs(i + 1, max(max_used, m))
            unplace(i, undo)
        assign[i] = 0

    proven = True
    try:
        dfs(0, -1)
    except _BudgetExhausted:
        proven = False
        log.warning("exact search budget exhausted after %d nodes", state["nodes"])

    return _finish(
        instance,
        ev,
        best_assign,
        best_value,
        solver="exact",
        proven_optimal=proven,
        status="optimal" if proven else "budget_exhausted",
        nodes_explored=state["nodes"],
        wall_time=time.perf_counter() - started,
        seed_values=seed_values,
    )


def solve_local(
    instance: Instance,
    restarts: int = 16,
    iterations: int | None = None,
    seed: int = 0,
) -> OptimizationResult:
    """Hill climbing over single-node relabels with restarts.

    Starting points are the uniform assignment, the three centrality
    assignments, then random assignments up to ``restarts`` runs in total.
    Each iteration applies the first strictly improving move found in a
    shuffled scan of the neighbourhood; a run stops early at a local optimum.
    """
    if restarts < 1:
        raise ValueError("restarts must be positive")
    if iterations is None:
        iterations = 10 * instance.topology.num_nodes * instance.num_manufacturers
    if iterations < 0:
        raise ValueError("iterations must be non-negative")
    started = time.perf_counter()
    ev = _Evaluator(instance)
    n, num_m = ev.n, ev.m
    weights = ev.weights
    movable = [node for node in range(n) if ev.relevant[node]]

    seeds = _seed_assignments(instance)
    starts: list[tuple[str, list[int]]] = [(name, list(a.manufacturers)) for name, a in seeds.items()]
    for r in range(max(0, restarts - len(starts))):
        rng = random.Random(seed * 1_000_003 + r)
        starts.append((f"random{r}", [rng.randrange(num_m) for _ in range(n)]))

    seed_values: dict[str, Fraction] = {}
    best_value: int | Fraction | None = None
    best_assign: list[int] = []
    total_iters = 0
    for run, (name, assign) in enumerate(starts):
        values = ev.flow_values(assign)
        current = ev.total(values)
        seed_values[name] = ev.to_fraction(current)
        rng = random.Random(seed * 7_919 + run)
        for _ in range(iterations):
            moves = [(node, m) for node in movable for m in range(num_m) if m != assign[node]]
            rng.shuffle(moves)
            improved = False
            for node, m in moves:
                old = assign[node]
                assign[node] = m
                changed = {r: ev.flow_value(r, assign) for r in ev.node_flows[node]}
                delta = sum(weights[r] * (v - values[r]) for r, v in changed.items())
                if delta > 0:
                    for r, v in changed.items():
                        values[r] = v
                    current += delta
                    improved = True
                    break
                assign[node] = old
            total_iters += 1
            if not improved:
                break
        if best_value is None or current > best_value:
            best_value, best_assign = current, list(assign)

    return _finish(
        instance,
        ev,
        best_assign,
        best_value,
        solver="local",
        proven_optimal=False,
        status="heuristic",
        iterations=total_iters,
        wall_time=time.perf_counter() - started,
        seed=seed,
        seed_values=seed_values,
    )
