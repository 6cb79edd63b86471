"""Quasi-probability channel oracles and variant enumeration tests.

The channel tables are validated against brute-force density-matrix
arithmetic that never touches the statevector path.
"""
import math

import numpy as np
import pytest

from dqcut import bench
from dqcut.circuit import Circuit, Gate, GateKind, PREP_IPLUS, PREP_ONE, PREP_PLUS, PREP_ZERO
from dqcut.cutsearch import make_cut_set
from dqcut.errors import DqcutError, VariantLimitError
from dqcut.igraph import build_graph
from dqcut.qpd import (
    WIRE_CHANNELS,
    build_cut_plan,
    decompose_gate_cut,
    decompose_wire_cut,
    enumerate_variants,
    gate_cut_weight,
    _core_channels,
)

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.diag([1, -1]).astype(complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
PAULI = {"I": I2, "X": X, "Y": Y, "Z": Z}

KETS = {
    PREP_ZERO: np.array([1, 0], dtype=complex),
    PREP_ONE: np.array([0, 1], dtype=complex),
    PREP_PLUS: np.array([1, 1], dtype=complex) / math.sqrt(2),
    PREP_IPLUS: np.array([1, 1j], dtype=complex) / math.sqrt(2),
}


def random_density_matrix(rng, n):
    dim = 2**n
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = a @ a.conj().T
    return rho / np.trace(rho)


# ---------------------------------------------------------------------------
# Wire-cut oracle
# ---------------------------------------------------------------------------


def rebuild_wire(rho):
    out = np.zeros((2, 2), dtype=complex)
    for ch in WIRE_CHANNELS:
        ket = KETS[ch.prepare_state]
        out += ch.coefficient * np.trace(rho @ PAULI[ch.measure_basis]) * np.outer(ket, ket.conj())
    return out


def test_wire_cut_identity_on_basis_state():
    rho = np.array([[1, 0], [0, 0]], dtype=complex)
    assert np.max(np.abs(rebuild_wire(rho) - rho)) < 1e-15


def test_wire_cut_identity_random_density_matrices():
    rng = np.random.default_rng(2024)
    for _ in range(20):
        rho = random_density_matrix(rng, 1)
        assert np.max(np.abs(rebuild_wire(rho) - rho)) < 1e-12


def test_wire_cut_trace_preserving():
    rng = np.random.default_rng(5)
    rho = random_density_matrix(rng, 1)
    assert np.trace(rebuild_wire(rho)).real == pytest.approx(1.0, abs=1e-12)


def test_wire_cut_table_shape():
    # 4 bases x 4 preparations = 16 weighted terms, 10 of them nonzero;
    # I and Z measure the same circuit, leaving 3 x 4 executable settings
    channels = decompose_wire_cut()
    assert len(channels) == 10
    bases = {ch.measure_basis for ch in channels}
    preps = {ch.prepare_state for ch in channels}
    assert bases == {"I", "X", "Y", "Z"} and len(preps) == 4
    settings = {("Z" if ch.measure_basis == "I" else ch.measure_basis) for ch in channels}
    assert len(settings) == 3


# ---------------------------------------------------------------------------
# Gate-cut oracle
# ---------------------------------------------------------------------------


def _op_matrix(op):
    if op[0] == "h":
        return H
    if op[0] == "s":
        return np.diag([1, 1j])
    if op[0] == "sdg":
        return np.diag([1, -1j])
    if op[0] == "z":
        return Z
    if op[0] == "rz":
        t = op[1] / 2
        return np.diag([np.exp(-1j * t), np.exp(1j * t)])
    raise AssertionError(op)


def _apply_side(rho, ops, qubit):
    """Apply an op-spec sequence on one qubit of a 2-qubit density matrix;
    the measurement op is the sign-folded projective channel."""
    p_plus = (I2 + Z) / 2
    p_minus = (I2 - Z) / 2
    for op in ops:
        if op[0] == "meas":
            kp = np.kron(p_plus, I2) if qubit == 0 else np.kron(I2, p_plus)
            km = np.kron(p_minus, I2) if qubit == 0 else np.kron(I2, p_minus)
            rho = kp @ rho @ kp - km @ rho @ km
        else:
            m = _op_matrix(op)
            full = np.kron(m, I2) if qubit == 0 else np.kron(I2, m)
            rho = full @ rho @ full.conj().T
    return rho


def channel_sum(gate, rho):
    out = np.zeros((4, 4), dtype=complex)
    for ch in decompose_gate_cut(gate):
        term = _apply_side(rho, ch.ops_a, 0)
        term = _apply_side(term, ch.ops_b, 1)
        out += ch.coefficient * term
    return out


def ideal_map(gate, rho):
    from dqcut.sim import gate_matrix

    u = gate_matrix(gate)
    return u @ rho @ u.conj().T


@pytest.mark.parametrize(
    "gate",
    [
        Gate(GateKind.CZ, (0, 1)),
        Gate(GateKind.CX, (0, 1)),
        Gate(GateKind.CP, (0, 1), (math.pi / 3,)),
        Gate(GateKind.CP, (0, 1), (-1.1,)),
        Gate(GateKind.RZZ, (0, 1), (0.7,)),
    ],
)
def test_gate_cut_superoperator_oracle(gate):
    rng = np.random.default_rng(99)
    for _ in range(20):
        rho = random_density_matrix(rng, 2)
        assert np.max(np.abs(channel_sum(gate, rho) - ideal_map(gate, rho))) < 1e-9


def test_gate_cut_channel_count_and_weight():
    cz = Gate(GateKind.CZ, (0, 1))
    channels = decompose_gate_cut(cz)
    assert len(channels) == 6
    # maximally entangling cut: 1-norm 3, sampling factor 9
    assert gate_cut_weight(cz) == pytest.approx(3.0, abs=1e-12)


def test_gate_cut_theta_zero_trivial():
    channels = [ch for ch in _core_channels(0.0) if abs(ch.coefficient) > 1e-15]
    assert len(channels) == 1
    assert channels[0].coefficient == pytest.approx(1.0)
    assert channels[0].ops_a == () and channels[0].ops_b == ()


def test_gate_cut_unsupported_kind():
    with pytest.raises(DqcutError, match="swap"):
        decompose_gate_cut(Gate(GateKind.SWAP, (0, 1)))


# ---------------------------------------------------------------------------
# Cut plan and variant enumeration
# ---------------------------------------------------------------------------


def ghz4_wire_cut():
    g = build_graph(bench.ghz(4))
    wire_q1 = next(e.index for e in g.edges if e.kind == "wire" and e.qubit == 1)
    return bench.ghz(4), make_cut_set(g, [wire_q1]), g


def test_variants_single_wire_cut_counts():
    c, cuts, g = ghz4_wire_cut()
    plan, variants = enumerate_variants(c, cuts, graph=g)
    assert len(variants) == 10  # nonzero entries of the 16-term table
    # executable settings: 3 upstream measurement circuits x 4 preparations,
    # a 12-way pairing space even though some pairs carry zero weight
    up_comp = plan.wire_slots[0].up_comp
    down_comp = plan.wire_slots[0].down_comp
    ups = {plan.component_key(up_comp, v.channel_indices) for v in variants}
    downs = {plan.component_key(down_comp, v.channel_indices) for v in variants}
    assert len(ups) == 3 and len(downs) == 4
    assert len(ups) * len(downs) == 12


def test_variants_no_cuts_single_unit():
    c = bench.ghz(4)
    g = build_graph(c)
    plan, variants = enumerate_variants(c, make_cut_set(g, []), graph=g)
    assert len(variants) == 1
    assert variants[0].coefficient == 1.0
    assert len(variants[0].components) == 1


def test_variants_two_wire_cuts_product_structure():
    c = bench.ghz(6)
    g = build_graph(c)
    wires = [e.index for e in g.edges if e.kind == "wire" and e.qubit in (1, 3)]
    cuts = make_cut_set(g, wires[:2])
    plan, variants = enumerate_variants(c, cuts, graph=g)
    assert len(variants) == 100  # 10 x 10 nonzero terms
    assert plan.variant_space() == 100


def test_variant_cap():
    c = bench.ghz(10)
    g = build_graph(c)
    wires = [e.index for e in g.edges if e.kind == "wire"][:4]
    with pytest.raises(VariantLimitError, match="fewer cuts"):
        enumerate_variants(c, make_cut_set(g, wires), graph=g, cap=100)


def test_plan_components_and_fragments():
    c, cuts, g = ghz4_wire_cut()
    plan = build_cut_plan(c, cuts, graph=g)
    assert len(plan.components) == 2
    up = plan.wire_slots[0].up_comp
    down = plan.wire_slots[0].down_comp
    # q1's observable letter lives downstream on the fresh wire
    assert plan.fragment(up, "ZZZZ") == "ZI"
    assert plan.fragment(down, "ZZZZ") == "ZZZ"


def test_plan_gate_cut_ops_replace_gate():
    c = bench.ghz(4)
    g = build_graph(c)
    middle_gate = next(e.index for e in g.edges if e.kind == "gate" and e.gate_seq == 2)
    plan, variants = enumerate_variants(c, make_cut_set(g, [middle_gate]), graph=g)
    assert len(variants) == 6
    for v in variants:
        for comp in v.components:
            assert all(gate.kind is not GateKind.CX or gate.seq >= 0 for gate in comp.gates)
            # the cut CX never appears as a two-qubit gate spanning components
            assert all(len(gate.qubits) == 1 or gate.kind is GateKind.CX for gate in comp.gates)


def test_spectator_qubits_get_own_components():
    c = Circuit(3)
    c.h(2)
    c.cx(0, 1)
    g = build_graph(c)
    plan = build_cut_plan(c, make_cut_set(g, []), graph=g)
    assert len(plan.components) == 2
    spec_comp = plan.components[plan.spectator_comps[2]]
    assert spec_comp.wires == [(2, 0)]
    assert plan.fragment(spec_comp.index, "ZZZ") == "Z"
