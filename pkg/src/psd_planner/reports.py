"""Assignment files, score/result reports and CSV tables."""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from collections.abc import Iterable, Sequence
from fractions import Fraction
from pathlib import Path
from typing import Any

from .failsim import SuccessReport, format_scenario
from .metric import Assignment, AssignmentError, ScoreReport
from .solver import OptimizationResult
from .topology import Topology, TopologyError

SIMULATION_COLUMNS = (
    "scenario",
    "mode",
    "flows_total",
    "flows_success",
    "pct_success",
    "pct_success_weighted",
)


def dump_json(doc: Any) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def write_atomic(path: str | Path, text: str) -> None:
    """Write via a temporary file in the same directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _exact(value: Fraction) -> str:
    return str(value)


# --------------------------------------------------------------------------
# assignments


def assignment_to_dict(assignment: Assignment, topology: Topology) -> dict[str, Any]:
    return {
        "topology_name": topology.name,
        "num_manufacturers": assignment.num_manufacturers,
        "assignment": [
            {"node": n, "label": topology.labels[n], "manufacturer": assignment[n]}
            for n in topology.nodes
        ],
    }


def render_assignment(assignment: Assignment, topology: Topology) -> str:
    return dump_json(assignment_to_dict(assignment, topology))


def parse_assignment(text: str, topology: Topology) -> Assignment:
    """Parse an assignment document; every node must appear exactly once."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise AssignmentError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise AssignmentError("document: expected an object")
    num_m = doc.get("num_manufacturers")
    if not isinstance(num_m, int) or isinstance(num_m, bool) or num_m < 1:
        raise AssignmentError("num_manufacturers: expected a positive integer")
    rows = doc.get("assignment")
    if not isinstance(rows, list):
        raise AssignmentError("assignment: expected an array")
    table: dict[int, int] = {}
    for i, row in enumerate(rows):
        where = f"assignment[{i}]"
        if not isinstance(row, dict) or "node" not in row or "manufacturer" not in row:
            raise AssignmentError(f"{where}: expected an object with 'node' and 'manufacturer'")
        try:
            node = topology.node_id(row["node"])
        except TopologyError as exc:
            raise AssignmentError(f"{where}: {exc}") from None
        m = row["manufacturer"]
        if not isinstance(m, int) or isinstance(m, bool):
            raise AssignmentError(f"{where}: manufacturer must be an integer")
        if node in table:
            raise AssignmentError(f"{where}: node {row['node']!r} assigned twice")
        table[node] = m
    missing = [topology.labels[n] for n in topology.nodes if n not in table]
    if missing:
        raise AssignmentError(f"assignment: no manufacturer for nodes {', '.join(missing)}")
    return Assignment(tuple(table[n] for n in topology.nodes), num_m)


# --------------------------------------------------------------------------
# score reports


def score_to_dict(report: ScoreReport, topology: Topology) -> dict[str, Any]:
    labels = topology.labels
    flows = []
    for r, fs in enumerate(report.flows):
        paths = []
        for j, ps in enumerate(fs.paths):
            paths.append(
                {
                    "index": j + 1,
                    "nodes": [labels[n] for n in ps.path.nodes],
                    "cost": float(ps.path.cost),
                    "combo": sorted(ps.combo),
                    "combo_size": len(ps.combo),
                    "kept": ps.kept,
                    "duplicate_of": None if ps.duplicate_of is None else ps.duplicate_of + 1,
                    "reward": float(ps.reward),
                    "reward_exact": _exact(ps.reward),
                }
            )
        flows.append(
            {
                "flow": r,
                "source": labels[fs.flow.s],
                "target": labels[fs.flow.t],
                "weight": fs.flow.weight,
                "no_paths": fs.no_paths,
                "flow_reward": float(fs.reward),
                "flow_reward_exact": _exact(fs.reward),
                "paths": paths,
            }
        )
    return {
        "topology_name": topology.name,
        "k": report.k,
        "num_manufacturers": report.num_manufacturers,
        "psd_score": float(report.score),
        "psd_score_exact": _exact(report.score),
        "weighted_sum": float(report.weighted_sum),
        "weighted_sum_exact": _exact(report.weighted_sum),
        "total_weight": float(report.total_weight),
        "flows_without_paths": len(report.flows_without_paths),
        "flows": flows,
    }


def _csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def score_to_csv(report: ScoreReport, topology: Topology) -> str:
    labels = topology.labels
    rows = []
    for r, fs in enumerate(report.flows):
        for j, ps in enumerate(fs.paths):
            rows.append(
                [
                    r,
                    labels[fs.flow.s],
                    labels[fs.flow.t],
                    fs.flow.weight,
                    j + 1,
                    "-".join(labels[n] for n in ps.path.nodes),
                    " ".join(str(m) for m in sorted(ps.combo)),
                    int(ps.kept),
                    "" if ps.duplicate_of is None else ps.duplicate_of + 1,
                    _exact(ps.reward),
                    _exact(fs.reward),
                ]
            )
        if fs.no_paths:
            rows.append([r, labels[fs.flow.s], labels[fs.flow.t], fs.flow.weight, "", "", "", "", "", "", "0"])
    header = ["flow", "source", "target", "weight", "path", "nodes", "combo", "kept", "duplicate_of", "reward", "flow_reward"]
    return _csv(header, rows)


# --------------------------------------------------------------------------
# optimisation results and simulations


def result_to_dict(result: OptimizationResult, topology: Topology) -> dict[str, Any]:
    """Result summary; wall time is left out so identical runs give identical files."""
    return {
        "topology_name": topology.name,
        "solver": result.solver,
        "status": result.status,
        "proven_optimal": result.proven_optimal,
        "num_manufacturers": result.num_manufacturers,
        "k": result.k,
        "objective": float(result.objective),
        "objective_exact": _exact(result.objective),
        "psd_score": float(result.score),
        "psd_score_exact": _exact(result.score),
        "nodes_explored": result.nodes_explored,
        "iterations": result.iterations,
        "seed": result.seed,
        "seed_objectives": {k: _exact(v) for k, v in result.seed_values.items()},
    }


def simulation_rows(reports: Sequence[SuccessReport]) -> list[list[Any]]:
    return [
        [
            format_scenario(rep.scenario),
            rep.mode,
            rep.flows_total,
            rep.flows_success,
            round(rep.pct_success, 6),
            round(rep.pct_success_weighted, 6),
        ]
        for rep in reports
    ]


def simulation_to_csv(reports: Sequence[SuccessReport]) -> str:
    return _csv(SIMULATION_COLUMNS, simulation_rows(reports))


def simulation_to_dict(reports: Sequence[SuccessReport], topology: Topology, flows) -> dict[str, Any]:
    labels = topology.labels
    return {
        "topology_name": topology.name,
        "scenarios": [
            {
                "scenario": list(rep.scenario),
                "mode": rep.mode,
                "flows_total": rep.flows_total,
                "flows_success": rep.flows_success,
                "pct_success": rep.pct_success,
                "pct_success_weighted": rep.pct_success_weighted,
                "failed_flows": [
                    [labels[f.s], labels[f.t]] for f, ok in zip(flows, rep.success) if not ok
                ],
            }
            for rep in reports
        ],
    }


def table_to_csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    return _csv(header, rows)
