import itertools
import random
from fractions import Fraction

import pytest

import oracle
from conftest import S, T, random_instances
from psd_planner import (
    Assignment,
    Flow,
    FlowSet,
    enumerate_flows,
    generate_complete,
    generate_random,
    generate_ring,
    heuristic_assignment,
)
from psd_planner.solver import (
    build_instance,
    combo_bits,
    evaluate_objective,
    solve_exact,
    solve_local,
)
from psd_planner.topology import Edge, Topology


def test_combo_universe_three_makers(sample8, st_flow):
    inst = build_instance(sample8, st_flow, 3, 7)
    words = {combo_bits(x, 3): q for x, q in zip(inst.combos, inst.combo_rewards)}
    assert words == {
        "001": 1, "010": 1, "100": 1,
        "011": Fraction(1, 2), "110": Fraction(1, 2), "101": Fraction(1, 2),
        "111": Fraction(1, 3),
    }
    assert combo_bits(frozenset({1, 2}), 3) == "011"


def test_combo_universe_one_maker(sample8, st_flow):
    inst = build_instance(sample8, st_flow, 1, 3)
    assert [combo_bits(x, 1) for x in inst.combos] == ["1"]
    assert inst.combo_rewards == (1,)


def test_ring_instance_path_sets():
    ring = generate_ring(6)
    inst = build_instance(ring, enumerate_flows(ring), 2, 10)
    assert all(len(ps) <= 2 for ps in inst.path_sets)


def test_evaluate_objective_examples(sample8, st_flow, worked_assignment):
    inst = build_instance(sample8, st_flow, 3, 7)
    assert evaluate_objective(inst, worked_assignment) == Fraction(7, 3)

    flows = enumerate_flows(sample8)
    inst = build_instance(sample8, flows, 2, 4)
    # every pair in sample8 has a multi-hop path, so each flow scores 1
    assert evaluate_objective(inst, Assignment.uniform(8, 2)) == len(flows)

    with pytest.raises(ValueError):
        evaluate_objective(inst, Assignment((0,) * 7, 2))
    with pytest.raises(ValueError):
        evaluate_objective(inst, Assignment((0,) * 8, 3))


def test_random_assignment_on_k5_matches_oracle():
    topo = generate_complete(5)
    flows = enumerate_flows(topo)
    inst = build_instance(topo, flows, 2, 4)
    paths = oracle.oracle_paths(topo.edges, 5, [f.pair for f in flows], 4)
    rng = random.Random(99)
    for _ in range(20):
        makers = tuple(rng.randrange(2) for _ in range(5))
        assert evaluate_objective(inst, Assignment(makers, 2)) == oracle.objective(paths, [1] * 10, makers)


def test_single_path_optimum_is_lexicographically_smallest():
    line = Topology("line", ("a", "b", "c", "d"), (Edge(0, 1), Edge(1, 2), Edge(2, 3)))
    inst = build_instance(line, FlowSet((Flow(0, 3),)), 2, 5)
    res = solve_exact(inst)
    assert res.objective == 1 and res.proven_optimal
    assert res.assignment.manufacturers == (0, 0, 0, 0)


@pytest.mark.parametrize("m, value", [(2, Fraction(5, 2)), (3, Fraction(13, 3))])
def test_sample8_single_flow_optimum(sample8, st_flow, m, value):
    inst = build_instance(sample8, st_flow, m, 7)
    res = solve_exact(inst)
    paths = oracle.oracle_paths(sample8.edges, 8, [(S, T)], 7)
    best, arg = oracle.brute_force_optimum(paths, [1], 8, m)
    assert res.objective == best == value
    assert res.assignment.manufacturers == arg
    assert res.proven_optimal and res.status == "optimal"


def test_ring8_optimum_at_least_uniform():
    ring = generate_ring(8)
    inst = build_instance(ring, enumerate_flows(ring), 2, 2)
    res = solve_exact(inst)
    assert res.proven_optimal
    assert res.score >= 1


@pytest.mark.parametrize("idx, topo, m, k", list(random_instances(40, max_nodes=7, seed=4)))
def test_exact_matches_brute_force(idx, topo, m, k):
    flows = enumerate_flows(topo)
    res = solve_exact(build_instance(topo, flows, m, k))
    paths = oracle.oracle_paths(topo.edges, topo.num_nodes, [f.pair for f in flows], k)
    best, arg = oracle.brute_force_optimum(paths, [1] * len(flows), topo.num_nodes, m)
    assert res.objective == best
    assert res.assignment.manufacturers == arg


def test_weighted_flows_change_the_optimum():
    topo = generate_complete(5)
    weights = {p: 0.0 for p in itertools.combinations(range(5), 2)}
    weights[(0, 1)] = 2.5
    flows = enumerate_flows(topo, weights)
    res = solve_exact(build_instance(topo, flows, 2, 4))
    paths = oracle.oracle_paths(topo.edges, 5, [f.pair for f in flows], 4)
    best, _ = oracle.brute_force_optimum(paths, [f.weight for f in flows], 5, 2)
    assert res.objective == best
    assert res.score == best / Fraction(5, 2)


def test_budget_exhaustion_is_reported(sample8):
    inst = build_instance(sample8, enumerate_flows(sample8), 3, 4)
    res = solve_exact(inst, max_nodes=5)
    assert not res.proven_optimal and res.status == "budget_exhausted"
    assert res.objective >= max(res.seed_values.values())
    with pytest.raises(ValueError):
        solve_exact(inst, max_nodes=0)


def test_time_limit_stops_search():
    topo = generate_random(11, 20, 1)
    inst = build_instance(topo, enumerate_flows(topo), 4, 8)
    res = solve_exact(inst, max_nodes=None, time_limit=0.05)
    assert not res.proven_optimal and res.status == "budget_exhausted"


def test_exact_dominates_heuristics(sample8):
    flows = enumerate_flows(sample8)
    for m in (2, 3):
        inst = build_instance(sample8, flows, m, 4)
        res = solve_exact(inst)
        for kind in ("nd", "bwc", "cc"):
            assert res.objective >= evaluate_objective(inst, heuristic_assignment(sample8, kind, m, flows))


def test_optimum_grows_with_manufacturers(sample8):
    flows = enumerate_flows(sample8)
    values = [solve_exact(build_instance(sample8, flows, m, 4)).objective for m in (1, 2, 3)]
    assert values == sorted(values)


def test_local_finds_sample8_optimum(sample8, st_flow):
    inst = build_instance(sample8, st_flow, 2, 7)
    res = solve_local(inst, restarts=8, seed=3)
    assert res.objective == Fraction(5, 2)
    assert not res.proven_optimal and res.status == "heuristic"


def test_local_zero_iterations_returns_best_seed(sample8):
    inst = build_instance(sample8, enumerate_flows(sample8), 3, 4)
    res = solve_local(inst, restarts=4, iterations=0)
    assert res.objective == max(res.seed_values.values())
    assert res.iterations == 0


def test_local_is_reproducible(sample8):
    inst = build_instance(sample8, enumerate_flows(sample8), 3, 6)
    first = solve_local(inst, restarts=12, seed=11)
    again = solve_local(inst, restarts=12, seed=11)
    assert first.assignment == again.assignment and first.objective == again.objective
    assert first.objective >= max(first.seed_values.values())


def test_local_parameter_checks(sample8, st_flow):
    inst = build_instance(sample8, st_flow, 2, 3)
    with pytest.raises(ValueError):
        solve_local(inst, restarts=0)
    with pytest.raises(ValueError):
        solve_local(inst, iterations=-1)
