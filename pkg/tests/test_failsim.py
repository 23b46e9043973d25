import random

import pytest
from hypothesis import given, settings, strategies as st

from conftest import BLUE, RED, YELLOW, random_instances
from psd_planner import Assignment, builtin_topology, enumerate_flows, generate_ring
from psd_planner.failsim import failure_scenarios, format_scenario, simulate, simulate_all
from psd_planner.paths import all_path_sets


def test_scenarios_in_order():
    assert failure_scenarios(2) == [(0,), (1,)]
    assert failure_scenarios(3) == [(0,), (1,), (2,), (0, 1), (0, 2), (1, 2)]
    five = failure_scenarios(5)
    assert len(five) == 2**5 - 2
    assert [len(s) for s in five] == sorted(len(s) for s in five)
    with pytest.raises(ValueError):
        failure_scenarios(1)
    assert format_scenario((0, 2)) == "[0,2]"


def test_sample8_flow_survives(sample8, st_flow, worked_assignment):
    assert simulate(sample8, worked_assignment, st_flow, (RED,)).success == (True,)
    assert simulate(sample8, worked_assignment, st_flow, (YELLOW, BLUE)).success == (True,)
    both = simulate(sample8, worked_assignment, st_flow, (RED, YELLOW))
    # only D and E are left, and they do not reach T together with S
    paths = all_path_sets(sample8, st_flow, 7)
    expect = any(all(worked_assignment[n] == BLUE for n in p.interior) for p in paths[0].paths)
    assert both.success == (expect,)


def test_ring_uniform():
    ring = generate_ring(6)
    flows = enumerate_flows(ring)
    uniform = Assignment.uniform(6, 2)
    down = simulate(ring, uniform, flows, (0,))
    assert down.flows_success == 6 and down.pct_success == pytest.approx(40.0)
    up = simulate(ring, uniform, flows, (1,))
    assert up.pct_success == 100.0 and up.pct_success_weighted == 100.0


def test_weighted_percentage():
    ring = generate_ring(6)
    flows = enumerate_flows(ring, {(0, 3): 4.0})
    rep = simulate(ring, Assignment.uniform(6, 2), flows, (0,))
    # 6 direct-edge flows of weight 1 survive out of total weight 18
    assert rep.pct_success_weighted == pytest.approx(100 * 6 / 18)


def test_kpaths_mode(sample8, st_flow, worked_assignment):
    paths = all_path_sets(sample8, st_flow, 2)
    rep = simulate(sample8, worked_assignment, st_flow, (RED,), "kpaths", paths)
    assert rep.mode == "kpaths"
    with pytest.raises(ValueError):
        simulate(sample8, worked_assignment, st_flow, (RED,), "kpaths")
    with pytest.raises(ValueError):
        simulate(sample8, worked_assignment, st_flow, (RED,), "bogus")


def test_invalid_scenario(sample8, st_flow, worked_assignment):
    with pytest.raises(ValueError):
        simulate(sample8, worked_assignment, st_flow, (3,))
    with pytest.raises(ValueError):
        simulate(sample8, Assignment((0,) * 5, 3), st_flow, (0,))


INSTANCES = [(t, m) for _, t, m, _ in random_instances(60, max_nodes=8, seed=77) if m >= 2]


@pytest.mark.parametrize("topo, m", INSTANCES)
def test_anti_monotone_and_mode_order(topo, m):
    flows = enumerate_flows(topo)
    paths = all_path_sets(topo, flows, 3)
    rng = random.Random(topo.num_nodes * 31 + m)
    a = Assignment(tuple(rng.randrange(m) for _ in topo.nodes), m)
    res = {s: simulate(topo, a, flows, s) for s in failure_scenarios(m)}
    for s, rep in res.items():
        for bigger, other in res.items():
            if set(s) < set(bigger):
                assert all(x >= y for x, y in zip(rep.success, other.success))
        kp = simulate(topo, a, flows, s, "kpaths", paths)
        assert all(r or not q for r, q in zip(rep.success, kp.success))


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 1), min_size=8, max_size=8))
def test_unused_manufacturer_never_hurts(makers):
    sample8 = builtin_topology("sample8")
    a = Assignment(tuple(makers), 3)
    flows = enumerate_flows(sample8)
    for rep in simulate_all(sample8, a, flows):
        if rep.scenario == (2,):
            assert rep.pct_success == 100.0
