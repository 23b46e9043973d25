"""Command line front end.

Exit codes: 0 success, 2 input error, 3 exact search budget exhausted,
4 internal invariant violation.
"""

from __future__ import annotations

import functools
import logging
import sys
from pathlib import Path

import click

from . import reports
from .failsim import MODES, simulate_all
from .heuristics import METRICS, heuristic_assignment
from .lpmodel import export_linear_model
from .metric import Assignment, AssignmentError, flow_reward_upper_bound, psd_score
from .paths import all_path_sets, k_shortest_paths, path_combo
from .solver import InvariantError, build_instance, solve_exact, solve_local
from .sweep import RunConfig, run_sweep
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
    parse_weights,
    render_topology,
)

EXIT_INPUT = 2
EXIT_BUDGET = 3
EXIT_INVARIANT = 4

log = logging.getLogger("psd_planner")


def _guard(func):
    """Map library exceptions onto the exit-code contract."""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except InvariantError as exc:
            click.echo(f"internal error: {exc}", err=True)
            sys.exit(EXIT_INVARIANT)
        except (TopologyError, AssignmentError, ValueError, OSError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_INPUT)

    return wrapper


def _int_list(ctx, param, value):
    if value is None:
        return None
    try:
        items = [int(v) for v in str(value).split(",") if v.strip()]
    except ValueError:
        raise click.BadParameter(f"expected N[,N...], got {value!r}") from None
    if not items or min(items) < 1:
        raise click.BadParameter("values must be positive integers")
    return items


def _single(values: list[int], name: str) -> int:
    if len(values) != 1:
        raise click.UsageError(f"{name} takes a single value for this command")
    return values[0]


def resolve_topology(source: str) -> Topology:
    """A file path, ``builtin:NAME``, ``ring:N``, ``complete:N`` or ``random:N:E[:SEED]``."""
    kind, _, rest = source.partition(":")
    try:
        if kind == "builtin" and rest:
            return builtin_topology(rest)
        if kind == "ring" and rest:
            return generate_ring(int(rest))
        if kind == "complete" and rest:
            return generate_complete(int(rest))
        if kind == "random" and rest:
            parts = [int(p) for p in rest.split(":")]
            return generate_random(*parts)
    except (TypeError, ValueError) as exc:
        raise TopologyError(f"bad topology spec {source!r}: {exc}") from None
    return load_topology(source)


def _flows(topology: Topology, weights: str | None) -> FlowSet:
    table = None
    if weights:
        table = parse_weights(Path(weights).read_text(encoding="utf-8"), topology)
    return enumerate_flows(topology, table)


def _load_assignment(path: str, topology: Topology) -> Assignment:
    assignment = reports.parse_assignment(Path(path).read_text(encoding="utf-8"), topology)
    assignment.check_covers(topology)
    return assignment


def _emit(text: str, out: str | None, filename: str) -> None:
    if out is None:
        click.echo(text, nl=False)
    else:
        reports.write_atomic(Path(out) / filename, text)


topology_option = click.option(
    "--topology", "topology_src", required=True, help="File, builtin:NAME, ring:N, complete:N or random:N:E[:SEED]."
)
weights_option = click.option("--weights", type=click.Path(dir_okay=False), help="Flow weight file.")
out_option = click.option("--out", type=click.Path(file_okay=False), help="Output directory (default: stdout).")


@click.group()
@click.option("-v", "--verbose", count=True, help="More logging on stderr.")
def main(verbose: int) -> None:
    """Manufacturer diversity planning: score, optimise and stress-test assignments."""
    logging.basicConfig(
        level=logging.WARNING - 10 * min(verbose, 2),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


@main.command()
@topology_option
@click.option("--assignment", "assignment_path", required=True, type=click.Path(dir_okay=False))
@click.option("--k", "k", required=True, type=int)
@weights_option
@out_option
@click.option("--format", "fmt", type=click.Choice(["structured", "csv"]), default="structured")
@_guard
def score(topology_src, assignment_path, k, weights, out, fmt):
    """Score an assignment: per-path combinations, flow rewards and the overall score."""
    topology = resolve_topology(topology_src)
    assignment = _load_assignment(assignment_path, topology)
    report = psd_score(topology, _flows(topology, weights), assignment, k)
    if fmt == "csv":
        _emit(reports.score_to_csv(report, topology), out, "score.csv")
    else:
        _emit(reports.dump_json(reports.score_to_dict(report, topology)), out, "score.json")


@main.command()
@topology_option
@click.option("--manufacturers", required=True, callback=_int_list)
@click.option("--k", "k", required=True, callback=_int_list)
@click.option("--solver", type=click.Choice(["exact", "local", "export-lp"]), default="exact")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--time-limit", type=float, help="Seconds for the exact search.")
@click.option("--node-limit", type=int, default=10_000_000, show_default=True)
@click.option("--restarts", type=int, default=16, show_default=True)
@click.option("--iterations", type=int, help="Local search iterations per restart (default 10*|V|*|M|).")
@click.option("--allow-heuristic-result", is_flag=True, help="Exit 0 even if the exact search ran out of budget.")
@weights_option
@out_option
@_guard
def optimize(topology_src, manufacturers, k, solver, seed, time_limit, node_limit, restarts,
             iterations, allow_heuristic_result, weights, out):
    """Search for the assignment with the highest score."""
    topology = resolve_topology(topology_src)
    num_m = _single(manufacturers, "--manufacturers")
    k = _single(k, "--k")
    instance = build_instance(topology, _flows(topology, weights), num_m, k)
    if solver == "export-lp":
        _emit(export_linear_model(instance), out, "model.lp")
        return
    if solver == "exact":
        result = solve_exact(instance, max_nodes=node_limit, time_limit=time_limit)
    else:
        result = solve_local(instance, restarts=restarts, iterations=iterations, seed=seed)
    log.info("%s search finished in %.2fs", solver, result.wall_time)
    result_text = reports.dump_json(reports.result_to_dict(result, topology))
    if out is None:
        click.echo(result_text, nl=False)
    else:
        reports.write_atomic(Path(out) / "assignment.json", reports.render_assignment(result.assignment, topology))
        reports.write_atomic(Path(out) / "result.json", result_text)
    if solver == "exact" and not result.proven_optimal and not allow_heuristic_result:
        click.echo("exact search budget exhausted; best assignment found was written", err=True)
        sys.exit(EXIT_BUDGET)


@main.command()
@topology_option
@click.option("--metric", type=click.Choice([*METRICS, "all"]), default="all", show_default=True)
@click.option("--manufacturers", required=True, callback=_int_list)
@weights_option
@out_option
@_guard
def heuristic(topology_src, metric, manufacturers, weights, out):
    """Centrality-ranked round-robin assignments."""
    topology = resolve_topology(topology_src)
    flows = _flows(topology, weights)
    kinds = list(METRICS) if metric == "all" else [metric]
    produced = {}
    for num_m in manufacturers:
        for kind in kinds:
            produced[f"{kind}_m{num_m}"] = heuristic_assignment(topology, kind, num_m, flows)
    if out is None:
        if len(produced) == 1:
            click.echo(reports.render_assignment(next(iter(produced.values())), topology), nl=False)
        else:
            doc = {name: reports.assignment_to_dict(a, topology) for name, a in produced.items()}
            click.echo(reports.dump_json(doc), nl=False)
        return
    for name, assignment in produced.items():
        reports.write_atomic(Path(out) / f"{name}.json", reports.render_assignment(assignment, topology))


@main.command()
@topology_option
@click.option("--assignment", "assignment_path", required=True, type=click.Path(dir_okay=False))
@click.option("--mode", type=click.Choice(MODES), default="residual", show_default=True)
@click.option("--k", "k", type=int, help="Paths per flow (kpaths mode).")
@weights_option
@out_option
@click.option("--format", "fmt", type=click.Choice(["csv", "structured"]), default="csv")
@_guard
def simulate(topology_src, assignment_path, mode, k, weights, out, fmt):
    """Fail every manufacturer subset in turn and report surviving flows."""
    topology = resolve_topology(topology_src)
    assignment = _load_assignment(assignment_path, topology)
    flows = _flows(topology, weights)
    path_sets = None
    if mode == "kpaths":
        if k is None:
            raise click.UsageError("--k is required in kpaths mode")
        path_sets = all_path_sets(topology, flows, k)
    sims = simulate_all(topology, assignment, flows, mode, path_sets)
    if fmt == "csv":
        _emit(reports.simulation_to_csv(sims), out, "simulation.csv")
    else:
        _emit(reports.dump_json(reports.simulation_to_dict(sims, topology, flows)), out, "simulation.json")


@main.command()
@topology_option
@click.option("--manufacturers", default="2,3,4,5", callback=_int_list, show_default=True)
@click.option("--k", "k", default="2,4,6,8,10", callback=_int_list, show_default=True)
@click.option("--solver", type=click.Choice(["exact", "local"]), default="exact", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--time-limit", type=float, help="Seconds per exact search cell.")
@click.option("--node-limit", type=int, default=10_000_000, show_default=True)
@click.option("--restarts", type=int, default=16, show_default=True)
@click.option("--iterations", type=int)
@click.option("--mode", type=click.Choice(MODES), default="residual", show_default=True)
@click.option("--external", multiple=True, metavar="NAME=PATH", help="Extra assignment series to compare.")
@click.option("--jobs", type=int, default=1, show_default=True)
@click.option("--allow-heuristic-result", is_flag=True)
@weights_option
@click.option("--out", type=click.Path(file_okay=False), required=True)
@_guard
def sweep(topology_src, manufacturers, k, solver, seed, time_limit, node_limit, restarts, iterations,
          mode, external, jobs, allow_heuristic_result, weights, out):
    """Solve every (manufacturers, k) cell and write plot-ready CSV tables."""
    topology = resolve_topology(topology_src)
    extra = {}
    for item in external:
        name, sep, path = item.partition("=")
        if not sep or not name:
            raise click.BadParameter(f"expected NAME=PATH, got {item!r}", param_hint="--external")
        extra[name] = _load_assignment(path, topology)
    cfg = RunConfig(
        topology=topology,
        flows=_flows(topology, weights),
        manufacturers=manufacturers,
        ks=k,
        solver=solver,
        seed=seed,
        time_limit=time_limit,
        node_limit=node_limit,
        restarts=restarts,
        iterations=iterations,
        mode=mode,
        external=extra,
        jobs=jobs,
    )
    outcome = run_sweep(cfg, out)
    click.echo(f"wrote {len(outcome.results)} assignments to {out}", err=True)
    if outcome.unproven and not allow_heuristic_result:
        cells = ", ".join(f"|M|={m} k={kk}" for m, kk in outcome.unproven)
        click.echo(f"exact search budget exhausted for {cells}", err=True)
        sys.exit(EXIT_BUDGET)


@main.command()
@topology_option
@click.option("--source", required=True)
@click.option("--target", required=True)
@click.option("--k", "k", type=int, default=10, show_default=True)
@click.option("--assignment", "assignment_path", type=click.Path(dir_okay=False))
@_guard
def paths(topology_src, source, target, k, assignment_path):
    """List the k shortest eligible paths of one flow."""
    topology = resolve_topology(topology_src)
    flow = Flow(topology.node_id(source), topology.node_id(target))
    assignment = _load_assignment(assignment_path, topology) if assignment_path else None
    labels = topology.labels
    # Keep the requested direction in the printout.
    reverse = topology.node_id(source) != flow.s
    for j, path in enumerate(k_shortest_paths(topology, flow, k), start=1):
        nodes = path.nodes[::-1] if reverse else path.nodes
        line = f"{j}\t{'-'.join(labels[n] for n in nodes)}\tcost={float(path.cost):g}"
        if assignment is not None:
            combo = sorted(path_combo(path, assignment))
            line += f"\tmanufacturers={','.join(map(str, combo))}"
        click.echo(line)


@main.command()
@click.option("--manufacturers", required=True, callback=_int_list)
@click.option("--exact", "show_exact", is_flag=True, help="Also print the exact fraction.")
def bound(manufacturers, show_exact):
    """Largest flow reward reachable with the given number of manufacturers."""
    for num_m in manufacturers:
        value = flow_reward_upper_bound(num_m)
        text = f"{float(value):.4f}"
        if show_exact:
            text += f"\t{value}"
        if len(manufacturers) > 1:
            text = f"{num_m}\t{text}"
        click.echo(text)


@main.group()
def gen() -> None:
    """Generate synthetic topologies."""


def _gen_output(topology: Topology, out: str | None) -> None:
    text = render_topology(topology)
    if out:
        reports.write_atomic(out, text)
    else:
        click.echo(text, nl=False)


@gen.command("ring")
@click.argument("n", type=int)
@click.option("--out", type=click.Path(dir_okay=False))
@_guard
def gen_ring(n, out):
    _gen_output(generate_ring(n), out)


@gen.command("complete")
@click.argument("n", type=int)
@click.option("--out", type=click.Path(dir_okay=False))
@_guard
def gen_complete(n, out):
    _gen_output(generate_complete(n), out)


@gen.command("random")
@click.argument("n", type=int)
@click.option("--edges", type=int, required=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False))
@_guard
def gen_random(n, edges, seed, out):
    _gen_output(generate_random(n, edges, seed), out)


if __name__ == "__main__":
    main()
