"""Command-line entry point: cut, map, and run pipelines with report emission.

Exit codes: 0 success, 2 infeasible input (nothing to cut, capacity exceeded),
3 search budget exhausted.
"""
from __future__ import annotations

import time

import click

from . import bench
from .circuit import Circuit, parse_qasm
from .cutsearch import (
    DEFAULT_BUDGET,
    CutSet,
    filter_critical,
    make_cut_set,
    search_min_cost,
)
from .dqc import DqcTopology, load_topology
from .errors import (
    BudgetExhaustedError,
    CutInfeasibleError,
    MappingError,
    SimLimitError,
    VariantLimitError,
)
from .igraph import build_graph
from .isomorph import ReuseConfig, contract_isomorphs, find_isomorphs
from .mapping import choose_policy, metrics, route
from .qpd import build_cut_plan
from .reconstruct import (
    error_report,
    evaluate_cuts,
    ground_truth_expectation,
    overheads,
)
from .report import build_report, render_figures, to_json, write_csv, write_json

EXIT_INFEASIBLE = 2
EXIT_BUDGET = 3


def load_circuit(bench_name: str | None, qubits: int | None, qasm: str | None,
                 seed: int | None) -> tuple[Circuit, str]:
    if qasm:
        with open(qasm, encoding="utf-8") as fh:
            return parse_qasm(fh.read()), qasm
    if not bench_name:
        raise click.UsageError("provide --qasm PATH or --bench NAME with --qubits N")
    if not qubits:
        raise click.UsageError("--bench needs --qubits")
    return bench.make(bench_name, qubits, seed=seed), f"{bench_name}-{qubits}"


def circuit_info(c: Circuit, name: str) -> dict:
    return {
        "name": name,
        "num_qubits": c.num_qubits,
        "gates": len(c.gates),
        "two_qubit_gates": len(c.two_qubit_gates()),
    }


def topo_info(topo: DqcTopology) -> dict:
    return {
        "name": topo.name,
        "qpus": len(topo.qpus),
        "data_per_qpu": len(topo.qpus[0].data_qubits),
        "comm_per_qpu": len(topo.qpus[0].comm),
        "max_data_capacity": topo.max_data_capacity,
    }


def stage_cut(c: Circuit, topo: DqcTopology, *, reuse: bool, restarts: int,
              seed: int, budget: int, dump_graph: str | None = None) -> dict:
    """Graph construction, optional isomorphic contraction, search, filtering."""
    t0 = time.perf_counter()
    graph = build_graph(c)
    block = None
    iso = None
    if reuse:
        block = find_isomorphs(graph, ReuseConfig(restarts=restarts), seed=seed,
                               max_qubits=topo.max_data_capacity)
        iso = {
            "found": block.found,
            "instance_count": len(block.instances),
            "template_nodes": len(block.template_nodes),
            "boundary_edges": block.boundary_edge_count,
        }
        if block.found:
            from .isomorph import extract_subcircuit

            template = extract_subcircuit(graph, block.template_nodes)
            iso["template_gates"] = [
                {"kind": g.kind.value, "qubits": list(g.qubits), "params": list(g.params)}
                for g in template.gates
            ]
            graph = contract_isomorphs(graph, block)
    if dump_graph:
        with open(dump_graph, "w", encoding="utf-8") as fh:
            fh.write(graph.to_dot())
    if c.num_qubits <= topo.max_data_capacity:
        # the whole circuit fits one QPU: nothing needs cutting
        cut_set = make_cut_set(graph, [])
        return {
            "graph": graph,
            "block": block,
            "iso": iso,
            "cut_set": cut_set,
            "search_cut_set": cut_set,
            "marginals": {},
            "critical_edges": [],
            "dropped_edges": [],
            "search": {"pops": 0, "goals": 0, "budget": budget},
            "seconds": time.perf_counter() - t0,
        }
    sol = search_min_cost(graph, topo, budget=budget)
    cut_set, marginals = filter_critical(sol, graph, topo)
    return {
        "graph": graph,
        "block": block,
        "iso": iso,
        "cut_set": cut_set,
        "search_cut_set": sol.cut_set,
        "marginals": marginals,
        "critical_edges": cut_set.edge_ids,
        "dropped_edges": sorted(set(sol.cut_edge_ids) - set(cut_set.edge_ids)),
        "search": {"pops": sol.pops, "goals": sol.goals_seen, "budget": budget},
        "seconds": time.perf_counter() - t0,
    }


def cut_report_dict(stage: dict) -> dict:
    cut_set: CutSet = stage["cut_set"]
    d = cut_set.to_dict()
    d["search_solution"] = stage["search_cut_set"].to_dict()
    d["marginals"] = {str(k): v for k, v in stage["marginals"].items()}
    d["critical_edges"] = stage["critical_edges"]
    d["dropped_edges"] = stage["dropped_edges"]
    d["search"] = stage["search"]
    return d


def stage_map(c: Circuit, topo: DqcTopology, dump_routed: str | None = None) -> dict:
    t0 = time.perf_counter()
    state = choose_policy(c, topo)
    routed = route(c, state, topo)
    if dump_routed:
        import json as _json

        from .mapping import routed_to_dict

        with open(dump_routed, "w", encoding="utf-8") as fh:
            _json.dump(routed_to_dict(routed), fh, indent=2)
    m = metrics(routed)
    m["policy"] = state.policy
    m["seconds"] = time.perf_counter() - t0
    return m


def stage_map_components(plan, topo: DqcTopology) -> dict:
    """Route each component template and aggregate the counters."""
    t0 = time.perf_counter()
    total = {"swaps": 0, "epr_pairs": 0, "remote_swaps": 0, "remote_gates": 0, "depth": 0}
    per_comp = []
    for comp in plan.components:
        template = Circuit(max(1, comp.num_wires))
        for _, kind, qubits, params in comp.ops:
            template.add(kind, qubits, params)
        state = choose_policy(template, topo)
        routed = route(template, state, topo)
        m = metrics(routed)
        per_comp.append({"component": comp.index, "wires": comp.num_wires, **m, "policy": state.policy})
        for key in ("swaps", "epr_pairs", "remote_swaps", "remote_gates"):
            total[key] += m[key]
        total["depth"] = max(total["depth"], m["depth"])
    total["per_component"] = per_comp
    total["seconds"] = time.perf_counter() - t0
    return total


def emit(report: dict, out: str | None, out_dir: str | None) -> None:
    if out:
        write_json(report, out)
    if out_dir:
        import os

        os.makedirs(out_dir, exist_ok=True)
        write_json(report, os.path.join(out_dir, "report.json"))
        write_csv(report, os.path.join(out_dir, "summary.csv"))
        figures = render_figures(report, out_dir)
        report.setdefault("artifacts", {})["figures"] = figures
    if not out and not out_dir:
        click.echo(to_json(report))


def _common(f):
    options = [
        click.option("--bench", "bench_name", type=str, default=None,
                     help="Built-in circuit: " + ", ".join(sorted(bench.GENERATORS)) + "."),
        click.option("--qubits", type=int, default=None, help="Qubit count for --bench."),
        click.option("--qasm", type=click.Path(exists=True), default=None,
                     help="OpenQASM 2 file to load instead of --bench."),
        click.option("--topology", default="manila-x20", show_default=True,
                     help="Preset name like toronto-x20, or a topology JSON path."),
        click.option("--seed", type=int, default=7, show_default=True,
                     help="Seed for generators and restarts."),
        click.option("--observable", default=None,
                     help="Pauli string over the qubits; defaults to all Z."),
        click.option("--out", type=click.Path(), default=None, help="Write the JSON report here."),
        click.option("--out-dir", type=click.Path(), default=None,
                     help="Write report.json, summary.csv, and figures into this directory."),
    ]
    for opt in reversed(options):
        f = opt(f)
    return f


@click.group()
@click.version_option()
def main():
    """Cut large quantum circuits, reuse isomorphic sub-circuits, map them
    across a chain of small QPUs, and reconstruct expectation values."""


@main.command("cut")
@_common
@click.option("--budget", type=int, default=DEFAULT_BUDGET, show_default=True,
              help="Search budget in heap pops.")
@click.option("--reuse/--no-reuse", default=False, show_default=True,
              help="Contract isomorphic sub-circuits before searching.")
@click.option("--restarts", type=int, default=10, show_default=True,
              help="Isomorphic-block search restarts.")
@click.option("--dump-graph", type=click.Path(), default=None,
              help="Write the interaction graph as DOT.")
def cmd_cut(bench_name, qubits, qasm, topology, seed, observable, out, out_dir,
            budget, reuse, restarts, dump_graph):
    """Search a cutting solution and keep only the critical cuts."""
    try:
        c, name = load_circuit(bench_name, qubits, qasm, seed)
        topo = load_topology(topology)
        stage = stage_cut(c, topo, reuse=reuse, restarts=restarts, seed=seed,
                          budget=budget, dump_graph=dump_graph)
    except BudgetExhaustedError as exc:
        raise SystemExit(_fail(EXIT_BUDGET, exc))
    except (CutInfeasibleError, MappingError) as exc:
        raise SystemExit(_fail(EXIT_INFEASIBLE, exc))
    report = build_report(
        "cut",
        {"topology": topology, "seed": seed, "budget": budget, "reuse": reuse},
        circuit_info(c, name),
        topo_info(topo),
        cut=cut_report_dict(stage),
        iso=stage["iso"],
        timings={"cut": stage["seconds"]},
    )
    emit(report, out, out_dir)


@main.command("map")
@_common
@click.option("--dump-routed", type=click.Path(), default=None,
              help="Write the routed gate stream (with EPR sessions) as JSON.")
def cmd_map(bench_name, qubits, qasm, topology, seed, observable, out, out_dir, dump_routed):
    """Place and route the whole circuit across the QPU chain."""
    try:
        c, name = load_circuit(bench_name, qubits, qasm, seed)
        topo = load_topology(topology)
        mapping = stage_map(c, topo, dump_routed=dump_routed)
    except MappingError as exc:
        raise SystemExit(_fail(EXIT_INFEASIBLE, exc))
    report = build_report(
        "map",
        {"topology": topology, "seed": seed},
        circuit_info(c, name),
        topo_info(topo),
        mapping=mapping,
        timings={"map": mapping.pop("seconds")},
    )
    emit(report, out, out_dir)


@main.command("run")
@_common
@click.option("--budget", type=int, default=DEFAULT_BUDGET, show_default=True)
@click.option("--reuse/--no-reuse", default=False, show_default=True)
@click.option("--reuse-count", type=int, default=0, show_default=True,
              help="How many isomorphic instances reuse another's results.")
@click.option("--restarts", type=int, default=10, show_default=True)
@click.option("--no-cut", is_flag=True, default=False, help="Map and simulate without cutting.")
@click.option("--exact/--shots-mode", "exact", default=True, show_default=True,
              help="Exact branch evaluation or sampled estimation.")
@click.option("--shots", type=int, default=10000, show_default=True,
              help="Shots per executed setting in shot mode.")
@click.option("--variant-cap", type=int, default=10**7, show_default=True)
@click.option("--threads", type=int, default=1, show_default=True,
              help="Reserved worker cap; evaluation currently runs serially.")
@click.option("--dump-graph", type=click.Path(), default=None)
@click.option("--dump-variants", type=click.Path(), default=None,
              help="Write the variant manifest (channels, coefficients, QASM) as JSON.")
def cmd_run(bench_name, qubits, qasm, topology, seed, observable, out, out_dir,
            budget, reuse, reuse_count, restarts, no_cut, exact, shots,
            variant_cap, threads, dump_graph, dump_variants):
    """Full pipeline: cut, map, simulate, reconstruct, and compare to ground truth."""
    timings: dict[str, float] = {}
    try:
        c, name = load_circuit(bench_name, qubits, qasm, seed)
        topo = load_topology(topology)
        obs = observable or "Z" * c.num_qubits
        if len(obs) != c.num_qubits or set(obs) - set("IXYZ"):
            raise click.UsageError(f"observable must be a {c.num_qubits}-letter Pauli string")

        if no_cut:
            cut_stage = None
            graph = None
            cut_set = None
        else:
            cut_stage = stage_cut(c, topo, reuse=reuse, restarts=restarts, seed=seed,
                                  budget=budget, dump_graph=dump_graph)
            graph = cut_stage["graph"]
            cut_set = cut_stage["cut_set"]
            timings["cut"] = cut_stage["seconds"]

        if cut_set is not None:
            plan = build_cut_plan(c, cut_set, graph=graph)
            space = plan.variant_space()
            if space > variant_cap:
                raise VariantLimitError(
                    f"{space} channel combinations exceed the cap of {variant_cap}; use fewer cuts"
                )
            mapping = stage_map_components(plan, topo)
            timings["map"] = mapping.pop("seconds")
            t0 = time.perf_counter()
            block = cut_stage["block"] if cut_stage else None
            evaluation = evaluate_cuts(
                plan, obs, block=block, reuse_count=reuse_count if reuse else 0,
                shots=None if exact else shots, seed=seed,
            )
            timings["simulate"] = time.perf_counter() - t0
            value = evaluation.expectation
            over = overheads(cut_set, executed_circuits=evaluation.executed_circuits)
            over["term_count"] = evaluation.term_count
            over["reused_instances"] = evaluation.reused_instances
            if dump_variants:
                import json as _json

                from .qpd import enumerate_variants, variants_manifest

                _, variants = enumerate_variants(c, cut_set, graph=graph, cap=variant_cap)
                with open(dump_variants, "w", encoding="utf-8") as fh:
                    _json.dump(variants_manifest(plan, variants), fh, indent=2)
        else:
            mapping = stage_map(c, topo)
            timings["map"] = mapping.pop("seconds")
            t0 = time.perf_counter()
            value = ground_truth_expectation(c, obs)
            timings["simulate"] = time.perf_counter() - t0
            if value is None:
                raise SimLimitError(f"{c.num_qubits} qubits exceed the simulator limit")
            over = overheads(_empty_cuts())
        t0 = time.perf_counter()
        truth = ground_truth_expectation(c, obs)
        timings["ground_truth"] = time.perf_counter() - t0
    except BudgetExhaustedError as exc:
        raise SystemExit(_fail(EXIT_BUDGET, exc))
    except (CutInfeasibleError, MappingError, VariantLimitError, SimLimitError) as exc:
        raise SystemExit(_fail(EXIT_INFEASIBLE, exc))
    result = error_report(value, truth, over)
    result["observable"] = obs
    result["mode"] = "exact" if exact else f"shots={shots}"
    report = build_report(
        "run",
        {"topology": topology, "seed": seed, "budget": budget, "reuse": reuse,
         "reuse_count": reuse_count, "exact": exact, "no_cut": no_cut},
        circuit_info(c, name),
        topo_info(topo),
        cut=cut_report_dict(cut_stage) if cut_stage else None,
        iso=cut_stage["iso"] if cut_stage else None,
        mapping=mapping,
        result=result,
        timings=timings,
    )
    emit(report, out, out_dir)


def _empty_cuts() -> CutSet:
    return CutSet([], [], [], [])


def _fail(code: int, exc: Exception) -> int:
    click.echo(f"error: {exc}", err=True)
    return code


if __name__ == "__main__":
    main()
