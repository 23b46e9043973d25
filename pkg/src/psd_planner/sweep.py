"""Cross-product runs over manufacturer counts and k, with plot-ready CSV output."""

from __future__ import annotations

import logging
from collections.abc import Mapping, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import reports
from .failsim import simulate_all
from .heuristics import METRICS, heuristic_assignment
from .metric import Assignment, score_path_sets
from .paths import PathSet, all_path_sets
from .solver import OptimizationResult, build_instance, solve_exact, solve_local
from .topology import FlowSet, Topology

log = logging.getLogger(__name__)

PSD_COLUMNS = ("num_manufacturers", "k", "method", "psd_score", "psd_score_exact")
SUCCESS_COLUMNS = ("num_manufacturers", "k", "method") + reports.SIMULATION_COLUMNS


@dataclass
class RunConfig:
    topology: Topology
    flows: FlowSet
    manufacturers: Sequence[int] = (2, 3, 4, 5)
    ks: Sequence[int] = (2, 4, 6, 8, 10)
    solver: str = "exact"
    seed: int = 0
    time_limit: float | None = None
    node_limit: int | None = 10_000_000
    restarts: int = 16
    iterations: int | None = None
    mode: str = "residual"
    external: Mapping[str, Assignment] = field(default_factory=dict)
    jobs: int = 1

    def __post_init__(self) -> None:
        if not self.manufacturers or min(self.manufacturers) < 1:
            raise ValueError("manufacturer counts must be positive")
        if not self.ks or min(self.ks) < 1:
            raise ValueError("k values must be positive")
        if self.solver not in ("exact", "local"):
            raise ValueError(f"sweep solver must be 'exact' or 'local', got {self.solver!r}")


@dataclass
class SweepOutcome:
    results: dict[tuple[int, int], OptimizationResult]
    heuristics: dict[tuple[str, int], Assignment]
    psd_rows: list[list]
    success_rows: list[list]

    @property
    def unproven(self) -> list[tuple[int, int]]:
        return [cell for cell, res in self.results.items() if res.solver == "exact" and not res.proven_optimal]


def method_name(solver: str) -> str:
    return "optimal" if solver == "exact" else "local"


def _solve_cell(cfg: RunConfig, num_m: int, k: int, path_sets: Sequence[PathSet]) -> OptimizationResult:
    instance = build_instance(cfg.topology, cfg.flows, num_m, k, path_sets)
    if cfg.solver == "exact":
        return solve_exact(instance, max_nodes=cfg.node_limit, time_limit=cfg.time_limit)
    return solve_local(instance, restarts=cfg.restarts, iterations=cfg.iterations, seed=cfg.seed)


def run_sweep(cfg: RunConfig, out_dir: str | Path | None = None) -> SweepOutcome:
    """Solve every (manufacturers, k) cell and score all methods against it.

    Writes ``assignments/``, ``results/``, ``heuristics/``, ``psd_vs_k.csv``
    and ``success_vs_scenario.csv`` under ``out_dir`` when given.
    """
    topo, flows = cfg.topology, cfg.flows
    ms, ks = sorted(set(cfg.manufacturers)), sorted(set(cfg.ks))
    full_paths = all_path_sets(topo, flows, max(ks))
    cells = [(m, k) for m in ms for k in ks]
    paths_for = {k: [ps.truncate(k) for ps in full_paths] for k in ks}

    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            futures = [pool.submit(_solve_cell, cfg, m, k, paths_for[k]) for m, k in cells]
            solved = [f.result() for f in futures]
    else:
        solved = []
        for m, k in cells:
            log.info("solving |M|=%d k=%d", m, k)
            solved.append(_solve_cell(cfg, m, k, paths_for[k]))
    results = dict(zip(cells, solved))

    heuristics: dict[tuple[str, int], Assignment] = {}
    for m in ms:
        for kind in METRICS:
            try:
                heuristics[(kind, m)] = heuristic_assignment(topo, kind, m, flows)
            except ValueError as exc:
                log.warning("no %s assignment for |M|=%d: %s", kind, m, exc)

    method = method_name(cfg.solver)
    psd_rows: list[list] = []
    success_rows: list[list] = []
    for m, k in cells:
        series: list[tuple[str, Assignment]] = [(method, results[(m, k)].assignment)]
        series += [(kind, heuristics[(kind, mm)]) for kind, mm in heuristics if mm == m]
        series += [
            (name, a) for name, a in sorted(cfg.external.items()) if a.num_manufacturers == m
        ]
        for name, assignment in series:
            report = score_path_sets(paths_for[k], assignment, k)
            psd_rows.append([m, k, name, float(report.score), str(report.score)])
            if m >= 2:
                sims = simulate_all(topo, assignment, flows, cfg.mode, paths_for[k])
                for row in reports.simulation_rows(sims):
                    success_rows.append([m, k, name] + row)

    outcome = SweepOutcome(results, heuristics, psd_rows, success_rows)
    if out_dir is not None:
        _write(cfg, outcome, Path(out_dir))
    return outcome


def _write(cfg: RunConfig, outcome: SweepOutcome, out: Path) -> None:
    topo = cfg.topology
    method = method_name(cfg.solver)
    for (m, k), res in outcome.results.items():
        stem = f"{method}_m{m}_k{k}"
        reports.write_atomic(out / "assignments" / f"{stem}.json", reports.render_assignment(res.assignment, topo))
        reports.write_atomic(
            out / "results" / f"{stem}.json", reports.dump_json(reports.result_to_dict(res, topo))
        )
    for (kind, m), assignment in outcome.heuristics.items():
        reports.write_atomic(
            out / "heuristics" / f"{kind}_m{m}.json", reports.render_assignment(assignment, topo)
        )
    reports.write_atomic(out / "psd_vs_k.csv", reports.table_to_csv(PSD_COLUMNS, outcome.psd_rows))
    reports.write_atomic(
        out / "success_vs_scenario.csv", reports.table_to_csv(SUCCESS_COLUMNS, outcome.success_rows)
    )
