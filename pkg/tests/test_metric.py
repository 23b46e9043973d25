import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracle
from conftest import S, T
from psd_planner import (
    Assignment,
    Flow,
    enumerate_flows,
    generate_complete,
    generate_random,
    generate_ring,
)
from psd_planner.metric import flow_reward, flow_reward_upper_bound, path_reward, psd_score
from psd_planner.paths import k_shortest_paths


def test_path_rewards():
    assert path_reward(frozenset({0})) == 1
    assert path_reward(frozenset({0, 1, 2})) == Fraction(1, 3)
    assert path_reward(frozenset({0, 2})) == Fraction(1, 2)
    with pytest.raises(ValueError):
        path_reward(frozenset())


def test_worked_flow_reward(sample8, worked_assignment):
    score = flow_reward(k_shortest_paths(sample8, Flow(S, T), 7), worked_assignment)
    assert [p.kept for p in score.paths] == [True, True, True, False, True, False, False]
    assert [p.duplicate_of for p in score.paths] == [None, None, None, 2, None, 4, 4]
    assert [p.reward for p in score.paths if p.kept] == [1, Fraction(1, 2), Fraction(1, 2), Fraction(1, 3)]
    assert score.reward == Fraction(7, 3)


def test_single_maker_flow_scores_one(sample8):
    score = flow_reward(k_shortest_paths(sample8, Flow(S, T), 10), Assignment.uniform(8, 3, 2))
    assert score.reward == 1


def test_sample8_random_assignments_match_oracle(sample8):
    expected_paths = oracle.oracle_paths(sample8.edges, 8, [(S, T)], 10)[0]
    ps = k_shortest_paths(sample8, Flow(S, T), 10)
    rng = random.Random(7)
    for _ in range(50):
        makers = tuple(rng.randrange(3) for _ in range(8))
        got = flow_reward(ps, Assignment(makers, 3)).reward
        assert got == oracle.literal_flow_reward(expected_paths, makers)


@pytest.mark.parametrize("k", [1, 2, 5, 10])
def test_uniform_ring13_scores_one(k):
    ring = generate_ring(13)
    report = psd_score(ring, enumerate_flows(ring), Assignment.uniform(13, 1), k)
    assert report.score == 1


def test_complete5_alternating():
    topo = generate_complete(5)
    alternating = Assignment(tuple(i % 2 for i in range(5)), 2)
    report = psd_score(topo, enumerate_flows(topo), alternating, 4)
    # frozen from oracle.objective over brute-force path lists
    assert report.weighted_sum == Fraction(45, 2)
    assert report.score == Fraction(9, 4)


def test_zero_path_flow_is_flagged():
    topo = generate_complete(2)
    report = psd_score(topo, enumerate_flows(topo), Assignment.uniform(2, 1), 3)
    assert report.score == 0
    assert len(report.flows_without_paths) == 1


def test_weighted_average():
    topo = generate_complete(4)
    flows = enumerate_flows(topo, {(0, 1): 3.0, (2, 3): 0.0})
    assignment = Assignment((0, 1, 0, 1), 2)
    report = psd_score(topo, flows, assignment, 4)
    num = sum(Fraction(f.weight) * fs.reward for f, fs in zip(flows, report.flows))
    assert report.score == num / Fraction(3 + 4)


def test_zero_total_weight_rejected():
    topo = generate_complete(3)
    flows = enumerate_flows(topo, {p: 0.0 for p in itertools.combinations(range(3), 2)})
    with pytest.raises(ValueError, match="zero"):
        psd_score(topo, flows, Assignment.uniform(3, 1), 2)


@pytest.mark.parametrize("m, expected", [(1, Fraction(1)), (2, Fraction(5, 2)), (3, Fraction(29, 6))])
def test_upper_bound(m, expected):
    assert flow_reward_upper_bound(m) == expected == oracle.combo_enumeration_bound(m)


def test_upper_bound_rejects_zero():
    with pytest.raises(ValueError):
        flow_reward_upper_bound(0)


def _random_case(seed):
    rng = random.Random(seed)
    n = rng.randint(3, 8)
    topo = generate_random(n, rng.randint(n - 1, n * (n - 1) // 2), seed)
    m = rng.randint(1, 4)
    return topo, Assignment(tuple(rng.randrange(m) for _ in range(n)), m), rng


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 6))
def test_psd_matches_oracle(seed, k):
    topo, assignment, _ = _random_case(seed)
    flows = enumerate_flows(topo)
    report = psd_score(topo, flows, assignment, k)
    path_lists = oracle.oracle_paths(topo.edges, topo.num_nodes, [f.pair for f in flows], k)
    assert report.weighted_sum == oracle.objective(path_lists, [1] * len(flows), assignment.manufacturers)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 6))
def test_relabel_invariance_and_bounds(seed, k):
    topo, assignment, rng = _random_case(seed)
    flows = enumerate_flows(topo)
    perm = list(range(assignment.num_manufacturers))
    rng.shuffle(perm)
    base = psd_score(topo, flows, assignment, k)
    assert psd_score(topo, flows, assignment.relabel(perm), k).score == base.score
    cap = flow_reward_upper_bound(assignment.num_manufacturers)
    for fs in base.flows:
        kept = fs.kept
        assert fs.reward <= cap
        assert fs.reward <= len(kept)
        assert len({p.combo for p in kept}) == len(kept) <= 2**assignment.num_manufacturers - 1
    # k monotonicity
    assert psd_score(topo, flows, assignment, k + 1).score >= base.score


def test_dedup_is_keep_first_and_idempotent(sample8, worked_assignment):
    ps = k_shortest_paths(sample8, Flow(S, T), 7)
    score = flow_reward(ps, worked_assignment)
    kept_paths = type(ps)(ps.flow, ps.k, tuple(p.path for p in score.kept))
    again = flow_reward(kept_paths, worked_assignment)
    assert all(p.kept for p in again.paths)
    assert again.reward == score.reward
