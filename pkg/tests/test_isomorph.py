"""Isomorphic-block identification and reuse bookkeeping tests."""
import math

import pytest

from dqcut import bench
from dqcut.circuit import Circuit
from dqcut.igraph import build_graph
from dqcut.isomorph import (
    IsoBlock,
    ReuseConfig,
    contract_isomorphs,
    extract_subcircuit,
    find_isomorphs,
    label_match,
    variant_count,
)


def test_variant_count():
    assert variant_count(1, 1) == 12
    assert variant_count(0, 1) == 3
    assert variant_count(0, 0) == 1
    assert variant_count(2, 1) == 48
    with pytest.raises(ValueError):
        variant_count(-1, 0)


def test_label_match_relabeling_invariance():
    a = Circuit(2)
    a.cx(0, 1)
    b = Circuit(3)
    b.cx(2, 1)
    assert label_match(a, b)


def test_label_match_gate_kind():
    a = Circuit(2)
    a.cx(0, 1)
    b = Circuit(2)
    b.cz(0, 1)
    assert not label_match(a, b)


def test_label_match_cx_orientation():
    chain_down = Circuit(3)
    chain_down.cx(0, 1).cx(1, 2)
    chain_up = Circuit(3)
    chain_up.cx(0, 1).cx(2, 1)
    assert not label_match(chain_down, chain_up)


def test_label_match_angle_tolerance():
    a = Circuit(2)
    a.rz(0, 0.3)
    a.cx(0, 1)
    b = Circuit(2)
    b.rz(0, 0.3 + 1e-10)
    b.cx(0, 1)
    assert label_match(a, b)
    c = Circuit(2)
    c.rz(0, 0.31)
    c.cx(0, 1)
    assert not label_match(a, c)


def test_label_match_single_qubit_dressing():
    a = Circuit(2)
    a.h(0)
    a.cx(0, 1)
    b = Circuit(2)
    b.cx(0, 1)
    assert not label_match(a, b)


def test_find_isomorphs_bv():
    g = build_graph(bench.bv(16))
    block = find_isomorphs(g, ReuseConfig(), seed=7, max_qubits=13)
    assert block.found
    assert len(block.instances) >= 2
    subs = [extract_subcircuit(g, inst) for inst in block.instances]
    assert all(label_match(subs[0], s) for s in subs[1:])


def test_find_isomorphs_respects_qubit_cap():
    g = build_graph(bench.bv(16))
    block = find_isomorphs(g, ReuseConfig(), seed=7, max_qubits=5)
    if block.found:
        for inst in block.instances:
            assert len({g.nodes[n].qubit for n in inst}) <= 5


def test_find_isomorphs_hwea_empty():
    # arbitrary rotation angles make every wire label unique: no block
    g = build_graph(bench.hwea(8, seed=3))
    block = find_isomorphs(g, ReuseConfig(), seed=7, max_qubits=13)
    assert not block.found


def test_find_isomorphs_deterministic():
    g = build_graph(bench.ghz(12))
    a = find_isomorphs(g, ReuseConfig(), seed=5, max_qubits=3)
    b = find_isomorphs(g, ReuseConfig(), seed=5, max_qubits=3)
    assert a.template_nodes == b.template_nodes
    assert a.instances == b.instances


def test_instances_are_node_disjoint():
    g = build_graph(bench.ghz(16))
    block = find_isomorphs(g, ReuseConfig(), seed=3, max_qubits=5)
    assert block.found
    seen: set[int] = set()
    for inst in block.instances:
        assert not (seen & set(inst))
        seen.update(inst)


def test_contract_isomorphs_limits_cuttable():
    g = build_graph(bench.ghz(12))
    block = find_isomorphs(g, ReuseConfig(), seed=5, max_qubits=3)
    assert block.found
    g2 = contract_isomorphs(g, block)
    assert len(g2.cuttable) < len(g.cuttable)
    assert len(g2.super_groups) == len(block.instances)


def test_contract_empty_block_is_identity():
    g = build_graph(bench.ghz(4))
    assert contract_isomorphs(g, IsoBlock()) is g


def test_extract_subcircuit_includes_dressing():
    c = Circuit(3)
    c.h(0)
    c.cx(0, 1)
    c.t(1)
    c.cx(1, 2)
    g = build_graph(c)
    sub = extract_subcircuit(g, [0, 1])  # the first CX and its nodes
    kinds = [gate.kind.value for gate in sub.gates]
    assert kinds == ["h", "cx", "t"]
