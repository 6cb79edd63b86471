"""Cut-search and critical-cut filtering tests."""
import pytest

from dqcut import bench
from dqcut.circuit import Circuit
from dqcut.cutsearch import (
    CutCandidate,
    RemoteEstimator,
    cut_marginals,
    filter_critical,
    make_cut_set,
    postproc_terms,
    prune,
    sampling_terms,
    search_min_cost,
)
from dqcut.dqc import DqcTopology, make_qpu, preset
from dqcut.errors import BudgetExhaustedError, CutInfeasibleError
from dqcut.igraph import build_graph


@pytest.fixture(scope="module")
def manila():
    return preset("manila-x20")


def test_overhead_formulas():
    assert postproc_terms(2, 2) == 576
    assert sampling_terms(2, 2) == 20736
    assert postproc_terms(0, 0) == 1 and sampling_terms(0, 0) == 1


def test_ghz4_single_wire_cut(manila):
    g = build_graph(bench.ghz(4))
    sol = search_min_cost(g, manila)
    assert (sol.cut_set.k1, sol.cut_set.k2) == (1, 0)
    assert sol.cost == (0, 4, 16, -len(g.cuttable))


def test_bv4_single_wire_cut(manila):
    sol = search_min_cost(build_graph(bench.bv(4)), manila)
    assert (sol.cut_set.k1, sol.cut_set.k2) == (1, 0)


def test_qft4_min_cost_uses_both_cut_kinds(manila):
    g = build_graph(bench.qft(4))
    sol = search_min_cost(g, manila)
    assert (sol.cut_set.k1, sol.cut_set.k2) == (2, 1)
    part = g.cut_edges(set(sol.cut_edge_ids))
    assert len(part) >= 2
    assert all(w <= 3 for w in part.wire_counts())


def test_qft4_filter_keeps_the_two_wire_cuts(manila):
    g = build_graph(bench.qft(4))
    sol = search_min_cost(g, manila)
    cut_set, removed = filter_critical(sol, g, manila)
    assert (cut_set.k1, cut_set.k2) == (2, 0)
    kept_marginals = sorted(removed[e] for e in cut_set.edge_ids)
    assert kept_marginals == [2, 2]


def test_search_deterministic(manila):
    g = build_graph(bench.qft(4))
    a = search_min_cost(g, manila)
    b = search_min_cost(g, manila)
    assert a.cut_edge_ids == b.cut_edge_ids


def test_goal_requires_fit():
    # one QPU with a single data qubit cannot host the two wires of a cut CX
    qpu = make_qpu(0, 3, [(0, 1), (1, 2)], comm=(0, 2))
    topo = DqcTopology([qpu])
    c = Circuit(2)
    c.cx(0, 1)
    with pytest.raises(CutInfeasibleError):
        search_min_cost(build_graph(c), topo)


def test_budget_exhaustion(manila):
    g = build_graph(bench.qft(4))
    with pytest.raises(BudgetExhaustedError):
        search_min_cost(g, manila, budget=3)


def test_already_disconnected_needs_no_cuts(manila):
    c = Circuit(4)
    c.cx(0, 1).cx(2, 3)
    sol = search_min_cost(build_graph(c), manila)
    assert sol.cut_edge_ids == []


def test_prune_rules(manila):
    g = build_graph(bench.qft(4))
    n_edges = len(g.cuttable)
    # (ii) any candidate at least as costly as the incumbent is discarded
    assert prune(CutCandidate(()), g, manila, best=(0, 1, 1, 0)) is not None
    assert prune(CutCandidate(()), g, manila, best=None) is None
    # (iii) fully decided all-false vector leaves one component: not a goal
    assert "fully decided" in prune(CutCandidate((False,) * n_edges), g, manila, best=None)


def test_prune_rule_component_exceeds_original():
    # cutting every wire of the middle qubit folds 4 segments into components
    # joined by gate edges elsewhere, so a component outgrows the circuit
    c = Circuit(3)
    c.cx(0, 1).cx(1, 2).cx(1, 0).cx(2, 1).cx(0, 2)
    g = build_graph(c)
    manila = preset("manila-x20")
    wire_ids = {e.index for e in g.edges if e.kind == "wire" and e.qubit == 1}
    s = tuple(ei in wire_ids for ei in g.cuttable)
    reason = prune(CutCandidate(s), g, manila, best=None)
    assert reason is not None and "more qubits" in reason


def test_estimator_examples(manila):
    est = RemoteEstimator(manila)
    g = build_graph(bench.qft(4))
    # 4 qubits on 3-data QPUs: the balanced 2|2 split crosses 4 of the 6 CPs
    assert est.estimate(g.cut_edges(set())) == 4
    # anything fitting a single QPU costs nothing
    g2 = build_graph(bench.ghz(3))
    assert est.estimate(g2.cut_edges(set())) == 0


def test_marginals_worked_example(manila):
    # the independent 4-cut split of QFT-4 (wire cuts on q1, q2 after their
    # second occurrence plus gate cuts on the two CPs reaching q3): removals
    # are 2, 2, 1, 1, so only the wire cuts are critical at the 1.5 average
    g = build_graph(bench.qft(4))
    wire_q1 = next(e.index for e in g.edges if e.kind == "wire" and e.qubit == 1
                   and g.nodes[e.endpoints[0]].occurrence == 1)
    wire_q2 = next(e.index for e in g.edges if e.kind == "wire" and e.qubit == 2
                   and g.nodes[e.endpoints[0]].occurrence == 1)
    gate_03 = next(e.index for e in g.edges if e.kind == "gate" and e.gate_seq == 3)
    gate_13 = next(e.index for e in g.edges if e.kind == "gate" and e.gate_seq == 6)
    cuts = [wire_q1, wire_q2, gate_03, gate_13]
    removed = cut_marginals(cuts, g, manila)
    assert [removed[e] for e in cuts] == [2, 2, 1, 1]


def test_filter_single_cut_always_kept(manila):
    g = build_graph(bench.ghz(4))
    sol = search_min_cost(g, manila)
    cut_set, removed = filter_critical(sol, g, manila)
    assert cut_set.edge_ids == sol.cut_edge_ids


def test_filter_equal_marginals_all_kept():
    tor = preset("toronto-x20")
    g = build_graph(bench.ghz(64))
    sol = search_min_cost(g, tor)
    assert (sol.cut_set.k1, sol.cut_set.k2) == (2, 0)
    cut_set, removed = filter_critical(sol, g, tor)
    assert (cut_set.k1, cut_set.k2) == (2, 0)
    assert len(set(removed.values())) == 1


def test_filter_output_subset_and_nonempty(manila):
    for name, n in [("ghz", 4), ("qft", 4), ("rca", 4)]:
        g = build_graph(bench.make(name, n))
        sol = search_min_cost(g, manila)
        cut_set, _ = filter_critical(sol, g, manila)
        assert set(cut_set.edge_ids) <= set(sol.cut_edge_ids)
        assert cut_set.edge_ids


def test_cut_set_serialization(manila):
    g = build_graph(bench.ghz(4))
    sol = search_min_cost(g, manila)
    d = sol.cut_set.to_dict()
    assert d["k1"] == 1 and d["k2"] == 0
    assert d["postproc"] == 4 and d["sampling"] == 16
    assert d["wire_cuts"][0].keys() == {"qubit", "after_occurrence"}


def test_goal_pop_costs_nondecreasing(manila, monkeypatch):
    # instrument the search invariant: goals are accepted in nondecreasing cost order
    import dqcut.cutsearch as cs

    seen = []
    orig = cs._SearchState.is_goal

    def spy(self, part):
        ok = orig(self, part)
        if ok:
            seen.append(True)
        return ok

    monkeypatch.setattr(cs._SearchState, "is_goal", spy)
    search_min_cost(build_graph(bench.qft(4)), manila)
    assert seen  # at least one goal reached
