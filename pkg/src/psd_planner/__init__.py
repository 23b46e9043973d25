"""Manufacturer diversity planning for networks.

Scores how well a node-to-manufacturer assignment spreads each flow's
shortest paths over distinct manufacturer sets, searches for the best
assignment, and replays manufacturer outages.
"""

from .failsim import SuccessReport, failure_scenarios, simulate, simulate_all
from .heuristics import CentralityRanking, centrality_ranking, heuristic_assignment, round_robin_assign
from .lpmodel import LinearModel, build_linear_model, export_linear_model, induced_values
from .metric import (
    Assignment,
    AssignmentError,
    FlowScore,
    ScoreReport,
    flow_reward,
    flow_reward_upper_bound,
    path_reward,
    psd_score,
    score_path_sets,
)
from .paths import Path, PathSet, all_path_sets, k_shortest_paths, path_combo
from .solver import (
    Instance,
    InvariantError,
    OptimizationResult,
    build_instance,
    evaluate_objective,
    solve_exact,
    solve_local,
)
from .topology import (
    Flow,
    FlowSet,
    Topology,
    TopologyError,
    builtin_topology,
    enumerate_flows,
    generate_complete,
    generate_random,
    generate_ring,
    load_topology,
    parse_topology,
    render_topology,
)

__version__ = "0.1.0"
