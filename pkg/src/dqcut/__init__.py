"""dqcut: cut, reuse, map, and reconstruct large quantum circuits on chains of small QPUs."""

from .circuit import Circuit, Gate, GateKind, parse_qasm
from .cutsearch import (
    CutSet,
    CutSolution,
    cut_marginals,
    filter_critical,
    make_cut_set,
    postproc_terms,
    sampling_terms,
    search_min_cost,
)
from .dqc import DqcTopology, Qpu, load_topology, preset
from .igraph import InteractionGraph, build_graph
from .isomorph import (
    IsoBlock,
    ReuseConfig,
    contract_isomorphs,
    find_isomorphs,
    label_match,
    variant_count,
)
from .mapping import (
    MappingState,
    RoutedCircuit,
    choose_policy,
    hotness_map,
    metrics,
    profile,
    route,
    weakness,
    weakness_map,
)
from .qpd import (
    QpdVariant,
    build_cut_plan,
    decompose_gate_cut,
    decompose_wire_cut,
    enumerate_variants,
)
from .reconstruct import (
    error_report,
    evaluate_cuts,
    ground_truth_expectation,
    overheads,
    reconstruct_expectation,
)
from .sim import branch_eval, expectation, sample, simulate

__version__ = "0.1.0"

__all__ = [
    "Circuit",
    "CutSet",
    "CutSolution",
    "DqcTopology",
    "Gate",
    "GateKind",
    "InteractionGraph",
    "IsoBlock",
    "MappingState",
    "QpdVariant",
    "Qpu",
    "ReuseConfig",
    "RoutedCircuit",
    "branch_eval",
    "build_cut_plan",
    "build_graph",
    "choose_policy",
    "contract_isomorphs",
    "cut_marginals",
    "decompose_gate_cut",
    "decompose_wire_cut",
    "enumerate_variants",
    "error_report",
    "evaluate_cuts",
    "expectation",
    "filter_critical",
    "find_isomorphs",
    "ground_truth_expectation",
    "hotness_map",
    "label_match",
    "load_topology",
    "make_cut_set",
    "metrics",
    "overheads",
    "parse_qasm",
    "postproc_terms",
    "preset",
    "profile",
    "reconstruct_expectation",
    "route",
    "sample",
    "sampling_terms",
    "search_min_cost",
    "simulate",
    "variant_count",
    "weakness",
    "weakness_map",
]
