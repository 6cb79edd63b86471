"""Interaction graph construction, cutting, and contraction tests."""
import pytest

from dqcut import bench
from dqcut.circuit import Circuit
from dqcut.errors import CutInfeasibleError, DqcutError
from dqcut.igraph import GATE, WIRE, build_graph


def kinds(graph):
    return [e.kind for e in graph.edges]


def test_ghz4_counts():
    g = build_graph(bench.ghz(4))
    assert len(g.nodes) == 6
    assert kinds(g).count(GATE) == 3
    assert kinds(g).count(WIRE) == 2


def test_qft4_counts():
    g = build_graph(bench.qft(4))
    assert len(g.nodes) == 12
    assert kinds(g).count(GATE) == 6
    assert kinds(g).count(WIRE) == 8


def test_single_cx():
    c = Circuit(2)
    c.cx(0, 1)
    g = build_graph(c)
    assert len(g.nodes) == 2
    assert kinds(g) == [GATE]


def test_no_two_qubit_gates_is_an_error():
    c = Circuit(2)
    c.h(0)
    with pytest.raises(CutInfeasibleError, match="nothing to cut"):
        build_graph(c)


def test_edge_order_deterministic():
    c = bench.qft(5)
    g1, g2 = build_graph(c), build_graph(c)
    assert [(e.kind, e.endpoints) for e in g1.edges] == [(e.kind, e.endpoints) for e in g2.edges]


def test_edge_order_gate_before_wire_at_same_seq():
    g = build_graph(bench.ghz(4))
    # canonical order: G(seq0), W(q1 at seq0), G(seq1), W(q2 at seq1), G(seq2)
    assert kinds(g) == [GATE, WIRE, GATE, WIRE, GATE]


def test_apply_no_cuts_single_component():
    g = build_graph(bench.ghz(4))
    part = g.apply_cuts([])
    assert len(part) == 1
    assert part.wire_counts() == [4]


def test_ghz4_wire_cut_splits_in_two():
    g = build_graph(bench.ghz(4))
    # cut the wire edge on q1 between its two occurrences: the upstream half
    # keeps q0,q1 and the downstream half runs on the fresh wire plus q2,q3
    wire_q1 = next(e.index for e in g.edges if e.kind == WIRE and e.qubit == 1)
    part = g.cut_edges({wire_q1})
    assert len(part) == 2
    assert sorted(len(c) for c in part.components) == [2, 4]
    assert sorted(part.wire_counts()) == [2, 3]


def test_ghz4_middle_gate_cut_splits_in_two():
    g = build_graph(bench.ghz(4))
    gate_edges = [e for e in g.edges if e.kind == GATE]
    part = g.cut_edges({gate_edges[1].index})
    assert len(part) == 2
    assert sorted(part.wire_counts()) == [2, 2]


def test_all_cuts_isolate_every_node():
    g = build_graph(bench.ghz(4))
    part = g.apply_cuts([True] * len(g.cuttable))
    assert len(part) == len(g.nodes)


def test_wire_counts_track_segments():
    # cutting both wire edges of the middle qubit of a 3-qubit chain splits it
    # into 3 segments; components stay joined through gate edges elsewhere
    c = Circuit(3)
    c.cx(0, 1).cx(1, 2).cx(1, 0).cx(2, 1)
    g = build_graph(c)
    part = g.apply_cuts([])
    assert part.wire_counts() == [3]
    wire_edges_q1 = [e.index for e in g.edges if e.kind == WIRE and e.qubit == 1]
    assert len(wire_edges_q1) == 3
    part2 = g.cut_edges(set(wire_edges_q1))
    # two components remain, each holding two disjoint segments of q1
    assert len(part2) == 2
    assert part2.wire_counts() == [3, 3]


def test_contract_blocks_internal_cut():
    g = build_graph(bench.ghz(4))
    members = set(range(4))  # nodes of the first two gates
    g2 = g.contract(members)
    internal = [e.index for e in g.edges if set(e.endpoints) <= members]
    assert all(i not in g2.cuttable for i in internal)
    with pytest.raises(DqcutError, match="internal"):
        g2.cut_edges({internal[0]})


def test_contract_single_node_identity_on_edges():
    g = build_graph(bench.ghz(4))
    g2 = g.contract({0})
    assert g2.cuttable == g.cuttable


def test_contract_all_nodes_leaves_nothing_cuttable():
    g = build_graph(bench.ghz(4))
    g2 = g.contract(set(range(len(g.nodes))))
    assert g2.cuttable == []


def test_contract_disconnected_set_rejected():
    g = build_graph(bench.ghz(4))
    with pytest.raises(DqcutError, match="connected"):
        g.contract({0, 5})


def test_contracted_partition_keeps_super_node_whole():
    g = build_graph(bench.ghz(4))
    g2 = g.contract(set(range(4)))
    part = g2.apply_cuts([True] * len(g2.cuttable))
    comps = sorted(len(c) for c in part.components)
    assert comps == [1, 1, 4]


def test_dot_output():
    g = build_graph(bench.ghz(3))
    dot = g.to_dot()
    assert "style=dashed" in dot and "style=solid" in dot
    assert "q1^(0)" in dot


def test_wire_graph_of_component():
    g = build_graph(bench.qft(4))
    part = g.apply_cuts([])
    w, pairs = part.wire_graph(0)
    assert w == 4
    assert sorted(pairs) == [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
