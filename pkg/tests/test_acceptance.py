"""Acceptance suite: one test per criterion, each printing a pass line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
summary lines alongside the pytest verdicts.
"""
import math
import time

import numpy as np
import pytest

from dqcut import bench
from dqcut.circuit import Circuit, Gate, GateKind
from dqcut.cutsearch import (
    cut_marginals,
    filter_critical,
    make_cut_set,
    postproc_terms,
    sampling_terms,
    search_min_cost,
)
from dqcut.dqc import preset
from dqcut.igraph import build_graph
from dqcut.isomorph import IsoBlock, ReuseConfig, contract_isomorphs, find_isomorphs, variant_count
from dqcut.mapping import choose_policy, profile, route, weakness
from dqcut.qpd import build_cut_plan
from dqcut.reconstruct import evaluate_cuts, ground_truth_expectation
from dqcut.sim import apply_gate, zero_state

from test_mapping import routed_statevector, two_small_qpus
from test_qpd import channel_sum, ideal_map, random_density_matrix, rebuild_wire


def report(criterion: int, text: str) -> None:
    print(f"ACCEPTANCE {criterion}: PASS - {text}")


def test_criterion_1_gate_cut_oracle():
    start = time.perf_counter()
    rng = np.random.default_rng(1234)
    worst = 0.0
    for gate in (Gate(GateKind.CZ, (0, 1)), Gate(GateKind.CX, (0, 1))):
        for _ in range(20):
            rho = random_density_matrix(rng, 2)
            err = float(np.max(np.abs(channel_sum(gate, rho) - ideal_map(gate, rho))))
            worst = max(worst, err)
            assert err < 1e-9
    elapsed = time.perf_counter() - start
    assert elapsed < 1.0
    report(1, f"gate-cut channel sum matches the ideal map, max err {worst:.2e}, {elapsed:.2f}s")


def test_criterion_2_wire_cut_oracle():
    rng = np.random.default_rng(4321)
    worst = 0.0
    for _ in range(20):
        rho = random_density_matrix(rng, 1)
        err = float(np.max(np.abs(rebuild_wire(rho) - rho)))
        worst = max(worst, err)
        assert err < 1e-12
    report(2, f"wire-cut identity reconstruction, max err {worst:.2e}")


def test_criterion_3_end_to_end_exactness():
    start = time.perf_counter()
    manila = preset("manila-x20")
    errors = {}
    for name in ("ghz", "bv", "qft", "rca"):
        c = bench.make(name, 4)
        g = build_graph(c)
        sol = search_min_cost(g, manila)
        cut_set, _ = filter_critical(sol, g, manila)
        plan = build_cut_plan(c, cut_set, graph=g)
        obs = "Z" * 4
        result = evaluate_cuts(plan, obs)
        truth = ground_truth_expectation(c, obs)
        err = abs(result.expectation - truth)
        errors[name] = err
        assert err < 1e-9, f"{name}: {err}"
    elapsed = time.perf_counter() - start
    assert elapsed < 30.0
    report(3, f"exact reconstruction of GHZ/BV/QFT/RCA-4, worst err "
              f"{max(errors.values()):.2e}, {elapsed:.1f}s")


def _search_and_filter(name, n, topo, budget=200_000):
    g = build_graph(bench.make(name, n))
    sol = search_min_cost(g, topo, budget=budget)
    cut_set, _ = filter_critical(sol, g, topo)
    return sol.cut_set, cut_set


def test_criterion_4_cut_count_anchors():
    start = time.perf_counter()
    manila = preset("manila-x20")
    melbourne = preset("melbourne-x13")
    toronto = preset("toronto-x20")
    lines = []
    for name, n, topo, bound in (
        ("bv", 4, manila, 1),
        ("hwea", 4, manila, 1),
        ("rca", 4, manila, 1),
        ("qft", 4, manila, 3),
        ("bv", 16, melbourne, 1),
        ("hwea", 16, melbourne, 1),
        ("rca", 16, melbourne, 2),
    ):
        t0 = time.perf_counter()
        _, filtered = _search_and_filter(name, n, topo)
        took = time.perf_counter() - t0
        total = filtered.k1 + filtered.k2
        assert total <= bound, f"{name}-{n}: {total} > {bound}"
        assert took < 600
        lines.append(f"{name}-{n}:{total}")
    for name in ("ghz", "bv", "lc"):
        t0 = time.perf_counter()
        search_set, filtered = _search_and_filter(name, 64, toronto)
        took = time.perf_counter() - t0
        # the independent solution reproduces the published 0 gate + 2 wire row;
        # the critical filter may only keep fewer
        assert (search_set.k2, search_set.k1) == (0, 2), f"{name}-64: {search_set.k2}|{search_set.k1}"
        assert filtered.k2 == 0 and filtered.k1 <= 2
        assert took < 600
        lines.append(f"{name}-64:{search_set.k1}w")
    report(4, "cut-count anchors " + " ".join(lines) + f", total {time.perf_counter()-start:.0f}s")


def test_criterion_5_critical_cut_marginals():
    manila = preset("manila-x20")
    g = build_graph(bench.qft(4))
    wire_q1 = next(e.index for e in g.edges if e.kind == "wire" and e.qubit == 1
                   and g.nodes[e.endpoints[0]].occurrence == 1)
    wire_q2 = next(e.index for e in g.edges if e.kind == "wire" and e.qubit == 2
                   and g.nodes[e.endpoints[0]].occurrence == 1)
    gate_q0q3 = next(e.index for e in g.edges if e.kind == "gate" and e.gate_seq == 3)
    gate_q1q3 = next(e.index for e in g.edges if e.kind == "gate" and e.gate_seq == 6)
    four_cuts = [wire_q1, wire_q2, gate_q0q3, gate_q1q3]
    removed = cut_marginals(four_cuts, g, manila)
    assert [removed[e] for e in four_cuts] == [2, 2, 1, 1]
    avg = sum(removed.values()) / 4
    assert avg == pytest.approx(1.5)
    kept = [e for e in four_cuts if removed[e] >= avg]
    assert kept == [wire_q1, wire_q2]
    report(5, "4-cut QFT-4 solution filters to the two marginal-2 wire cuts (avg 1.5)")


def test_criterion_6_overhead_formulas():
    for k1 in range(11):
        for k2 in range(11):
            assert postproc_terms(k1, k2) == 4**k1 * 6**k2
            assert sampling_terms(k1, k2) == 16**k1 * 9**k2
    assert (postproc_terms(2, 2), sampling_terms(2, 2)) == (576, 20736)
    report(6, "overhead formulas exact on the [0,10]^2 grid incl. (2,2) -> (576, 20736)")


def test_criterion_7_iso_reuse_bv256():
    start = time.perf_counter()
    toronto = preset("toronto-x20")
    g = build_graph(bench.bv(256))
    block = find_isomorphs(g, ReuseConfig(), seed=7, max_qubits=toronto.max_data_capacity)
    assert len(block.instances) >= 10
    g2 = contract_isomorphs(g, block)
    sol = search_min_cost(g2, toronto)
    assert sol.cut_set.k2 == 0
    assert sol.cut_set.k1 <= 11
    elapsed = time.perf_counter() - start
    assert elapsed < 600
    assert variant_count(1, 1) == 12
    # executed-circuit count with full reuse of a 2-instance block halves
    c = Circuit(5)
    for i in range(4):
        c.cx(i, i + 1)
    gc = build_graph(c)
    wires = [e.index for e in gc.edges if e.kind == "wire"]
    cuts = make_cut_set(gc, wires)
    two_block = IsoBlock((2, 3), [(2, 3), (4, 5)], 4)
    plan = build_cut_plan(c, cuts, graph=gc)
    off = evaluate_cuts(plan, "Z" * 5, block=two_block, reuse_count=0)
    on = evaluate_cuts(plan, "Z" * 5, block=two_block, reuse_count=1)
    block_off = off.executed_circuits - 7  # minus the two end components
    block_on = on.executed_circuits - 7
    assert block_off == 24 and block_on == 12
    report(7, f"BV-256: {len(block.instances)} instances, {sol.cut_set.k1} wire cuts, "
              f"{elapsed:.0f}s; variant_count(1,1)=12; block execution 24 -> 12 with full reuse")


def test_criterion_8_reuse_exactness():
    manila = preset("manila-x20")
    diffs = []
    reused_total = 0
    for name in ("ghz", "lc"):
        c = bench.make(name, 8)
        g = build_graph(c)
        block = find_isomorphs(g, ReuseConfig(), seed=11, max_qubits=manila.max_data_capacity)
        assert block.found
        g2 = contract_isomorphs(g, block)
        # cut every edge leaving an instance (including edges joining two
        # instances) so each isomorphic block becomes its own executable
        # component, then compare reuse on and off
        owner = {n: k for k, inst in enumerate(block.instances) for n in inst}
        boundary = [
            e.index
            for e in g2.edges
            if owner.get(e.endpoints[0]) != owner.get(e.endpoints[1])
            and (e.endpoints[0] in owner or e.endpoints[1] in owner)
        ]
        cuts = make_cut_set(g2, boundary)
        plan = build_cut_plan(c, cuts, graph=g2)
        obs = "Z" * 8
        off = evaluate_cuts(plan, obs, block=block, reuse_count=0)
        on = evaluate_cuts(plan, obs, block=block, reuse_count=4)
        truth = ground_truth_expectation(c, obs)
        assert abs(off.expectation - truth) < 1e-9
        assert on.reused_instances >= 1
        assert on.executed_circuits < off.executed_circuits
        reused_total += on.reused_instances
        diffs.append(abs(on.expectation - off.expectation))
        assert diffs[-1] < 1e-9
    report(8, f"reuse on/off agree on GHZ-8 and LC-8 (max diff {max(diffs):.2e}, "
              f"{reused_total} instances reused); noisy-error increases are out of scope by design")


def test_criterion_9_mapping_anchors():
    manila = preset("manila-x20")
    results = {}
    for name, swap_bound, epr_bound in (("bv", 2, 1), ("hwea", 0, 1), ("qft", 3, 3)):
        c = bench.make(name, 4)
        routed = route(c, choose_policy(c, manila), manila)
        assert routed.swaps <= swap_bound, f"{name}: {routed.swaps} swaps"
        assert routed.epr_pairs <= epr_bound, f"{name}: {routed.epr_pairs} EPR"
        results[name] = (routed.swaps, routed.epr_pairs)
    # sharing rule: five consecutive remote CXs on one logical qubit, one EPR pair
    topo = two_small_qpus(phys=9)
    c = Circuit(6)
    for t in (1, 2, 3, 4, 5):
        c.cx(0, t)
    from dqcut.mapping import MappingState

    placement = {0: (0, 1), 1: (0, 2), 2: (0, 3), 3: (1, 1), 4: (1, 2), 5: (1, 3)}
    routed = route(c, MappingState(placement, topo), topo)
    remote = [op for op in routed.ops if op.kind == "remote_gate"]
    assert len(remote) == 3 and routed.epr_pairs == 1
    report(9, f"mapping anchors (swaps, epr) {results}; 5-consecutive-remote-CX run uses 1 EPR pair")


def test_criterion_10_routing_soundness():
    topo = two_small_qpus()
    worst = 0.0
    for seed in range(50):
        c = bench.random_circuit(4 + seed % 2, 3, seed=7000 + seed)
        routed = route(c, choose_policy(c, topo), topo)
        n = c.num_qubits
        for basis in range(2**n):
            expected = np.zeros(2**n, dtype=complex)
            expected[basis] = 1.0
            for g in c.gates:
                expected = apply_gate(expected, g, n)
            actual = routed_statevector(routed, topo, n, basis)
            k = int(np.argmax(np.abs(expected)))
            assert abs(actual[k]) > 1e-12
            phase = expected[k] / actual[k]
            err = float(np.max(np.abs(actual * phase - expected)))
            worst = max(worst, err)
            assert err < 1e-9, f"seed {seed}, basis {basis}: {err}"
    report(10, f"50 routed circuits match their input unitaries, worst err {worst:.2e}")


def test_criterion_11_profiles():
    c = Circuit(3)
    for _ in range(3):
        c.cx(0, 1)
    for _ in range(2):
        c.cx(0, 2)
    hot = profile(c)
    assert (hot[0], hot[1], hot[2]) == (5, 3, 2)
    cliques = Circuit(6)
    for a, b in [(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5), (2, 3)]:
        cliques.cx(a, b)
    w = weakness([[0, 1, 2], [3, 4, 5]], cliques)
    assert w[(0, 1)] == 1.0
    report(11, "hotness profile (5,3,2); two-clique weakness 1/1")


def test_criterion_12_large_scale_rows_out_of_scope():
    # 16-1024 qubit noisy simulations and CPU-hour timings are not reproducible
    # at desk scale; criteria 3, 8, and 10 stand in with exact oracles
    report(12, "large-scale noisy rows substituted by criteria 3, 8, and 10 as specified")
