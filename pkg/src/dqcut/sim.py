"""Dense statevector simulator with projective-branch evaluation.

Qubit 0 is the least significant bit of the amplitude index.  MEASURE gates
are sign-folded projective Z measurements: branch_eval sums, over projector
outcome assignments, sign times the unnormalized branch expectation, which
equals the weighted form sign * probability * normalized expectation.
"""
from __future__ import annotations

import math

import numpy as np

from .circuit import Circuit, Gate, GateKind, PREP_IPLUS, PREP_ONE, PREP_PLUS, PREP_ZERO
from .errors import SimLimitError

MAX_QUBITS = 26
MAX_BRANCH_MEASURES = 8

_SQ2 = 1.0 / math.sqrt(2.0)

_FIXED_1Q = {
    GateKind.H: np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=complex),
    GateKind.X: np.array([[0, 1], [1, 0]], dtype=complex),
    GateKind.Y: np.array([[0, -1j], [1j, 0]], dtype=complex),
    GateKind.Z: np.array([[1, 0], [0, -1]], dtype=complex),
    GateKind.S: np.array([[1, 0], [0, 1j]], dtype=complex),
    GateKind.SDG: np.array([[1, 0], [0, -1j]], dtype=complex),
    GateKind.T: np.array([[1, 0], [0, np.exp(1j * math.pi / 4)]], dtype=complex),
    GateKind.TDG: np.array([[1, 0], [0, np.exp(-1j * math.pi / 4)]], dtype=complex),
}

PAULI_1Q = {
    "I": np.eye(2, dtype=complex),
    "X": _FIXED_1Q[GateKind.X],
    "Y": _FIXED_1Q[GateKind.Y],
    "Z": _FIXED_1Q[GateKind.Z],
}

_PREP_COLUMN = {
    PREP_ZERO: np.array([1, 0], dtype=complex),
    PREP_ONE: np.array([0, 1], dtype=complex),
    PREP_PLUS: np.array([_SQ2, _SQ2], dtype=complex),
    PREP_IPLUS: np.array([_SQ2, 1j * _SQ2], dtype=complex),
}


def gate_matrix(gate: Gate) -> np.ndarray:
    """Unitary for any non-measurement gate (2x2 or 4x4, first operand = MSB)."""
    k = gate.kind
    if k in _FIXED_1Q:
        return _FIXED_1Q[k]
    if k is GateKind.RX:
        t = gate.params[0] / 2
        return np.array([[math.cos(t), -1j * math.sin(t)], [-1j * math.sin(t), math.cos(t)]])
    if k is GateKind.RY:
        t = gate.params[0] / 2
        return np.array([[math.cos(t), -math.sin(t)], [math.sin(t), math.cos(t)]], dtype=complex)
    if k is GateKind.RZ:
        t = gate.params[0] / 2
        return np.array([[np.exp(-1j * t), 0], [0, np.exp(1j * t)]])
    if k is GateKind.PREPARE:
        col = _PREP_COLUMN[int(gate.params[0])]
        # unitary sending |0> to the prepared state; second column orthonormal
        return np.array([[col[0], -np.conj(col[1])], [col[1], np.conj(col[0])]])
    if k is GateKind.CX:
        return np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
    if k is GateKind.CZ:
        return np.diag([1, 1, 1, -1]).astype(complex)
    if k is GateKind.CP:
        return np.diag([1, 1, 1, np.exp(1j * gate.params[0])])
    if k is GateKind.SWAP:
        return np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)
    if k is GateKind.RZZ:
        t = gate.params[0] / 2
        return np.diag([np.exp(-1j * t), np.exp(1j * t), np.exp(1j * t), np.exp(-1j * t)])
    raise SimLimitError(f"no unitary for {k.value}")


def _apply_1q(state: np.ndarray, m: np.ndarray, q: int, n: int) -> np.ndarray:
    ax = n - 1 - q
    psi = np.moveaxis(state.reshape([2] * n), ax, 0)
    out = np.tensordot(m, psi, axes=(1, 0))
    return np.moveaxis(out, 0, ax).reshape(-1)


def _apply_2q(state: np.ndarray, m: np.ndarray, qa: int, qb: int, n: int) -> np.ndarray:
    axa, axb = n - 1 - qa, n - 1 - qb
    psi = np.moveaxis(state.reshape([2] * n), (axa, axb), (0, 1))
    out = np.tensordot(m.reshape(2, 2, 2, 2), psi, axes=([2, 3], [0, 1]))
    return np.moveaxis(out, (0, 1), (axa, axb)).reshape(-1)


def apply_gate(state: np.ndarray, gate: Gate, n: int) -> np.ndarray:
    if gate.kind is GateKind.MEASURE:
        raise SimLimitError("MEASURE requires branch_eval")
    m = gate_matrix(gate)
    if gate.kind.num_qubits == 1:
        return _apply_1q(state, m, gate.qubits[0], n)
    return _apply_2q(state, m, gate.qubits[0], gate.qubits[1], n)


def zero_state(n: int) -> np.ndarray:
    state = np.zeros(2**n, dtype=complex)
    state[0] = 1.0
    return state


def simulate(c: Circuit, max_qubits: int = MAX_QUBITS) -> np.ndarray:
    """Exact final state of a measurement-free circuit."""
    if c.num_qubits > max_qubits:
        raise SimLimitError(f"{c.num_qubits} qubits exceeds the {max_qubits}-qubit limit")
    state = zero_state(c.num_qubits)
    for g in c.gates:
        state = apply_gate(state, g, c.num_qubits)
    return state


def expectation(state: np.ndarray, obs: str) -> float:
    """<psi|P|psi> for a Pauli string; character k acts on qubit k."""
    return _raw_expectation(state, obs).real


def _raw_expectation(state: np.ndarray, obs: str) -> complex:
    n = int(round(math.log2(state.size)))
    if len(obs) != n:
        raise ValueError(f"observable length {len(obs)} != qubit count {n}")
    psi = state
    for q, ch in enumerate(obs):
        if ch == "I":
            continue
        psi = _apply_1q(psi, PAULI_1Q[ch], q, n)
    return np.vdot(state, psi)


def _project(state: np.ndarray, q: int, outcome: int, n: int) -> np.ndarray:
    ax = n - 1 - q
    out = state.reshape([2] * n).copy()
    sl = [slice(None)] * n
    sl[ax] = 1 - outcome
    out[tuple(sl)] = 0.0
    return out.reshape(-1)


def branch_eval(c: Circuit, obs: str, branch_cap: int = MAX_BRANCH_MEASURES,
                max_qubits: int = MAX_QUBITS) -> float:
    """Exact expectation of a circuit containing sign-folded MEASURE gates.

    A MEASURE whose qubit is never touched afterwards and whose observable
    letter is I is deferred into the observable as a Z; the rest enumerate
    both projector outcomes with the +/- eigenvalue folded into the sign.
    """
    n = c.num_qubits
    if n > max_qubits:
        raise SimLimitError(f"{n} qubits exceeds the {max_qubits}-qubit limit")
    if len(obs) != n:
        raise ValueError(f"observable length {len(obs)} != qubit count {n}")
    gates = c.gates
    touched_later: list[set[int]] = [set() for _ in gates]
    seen: set[int] = set()
    for i in range(len(gates) - 1, -1, -1):
        touched_later[i] = set(seen)
        seen.update(gates[i].qubits)
    deferrable = [
        g.kind is GateKind.MEASURE and g.qubits[0] not in touched_later[i] and obs[g.qubits[0]] == "I"
        for i, g in enumerate(gates)
    ]
    branching = sum(1 for i, g in enumerate(gates) if g.kind is GateKind.MEASURE and not deferrable[i])
    if branching > branch_cap:
        raise SimLimitError(f"{branching} branching measurements exceeds the cap of {branch_cap}")

    def run(state: np.ndarray, idx: int, deferred: tuple[int, ...]) -> float:
        while idx < len(gates):
            g = gates[idx]
            if g.kind is GateKind.MEASURE:
                q = g.qubits[0]
                if deferrable[idx]:
                    deferred = deferred + (q,)
                    idx += 1
                    continue
                plus = _project(state, q, 0, n)
                minus = _project(state, q, 1, n)
                return run(plus, idx + 1, deferred) - run(minus, idx + 1, deferred)
            state = apply_gate(state, g, n)
            idx += 1
        final_obs = "".join("Z" if q in deferred else ch for q, ch in enumerate(obs))
        return _raw_expectation(state, final_obs).real

    return run(zero_state(n), 0, ())


def sample(state: np.ndarray, shots: int, seed: int | None = None) -> dict[str, int]:
    """Seeded multinomial sample; bitstring character k is qubit k."""
    if shots < 1:
        raise ValueError("shots must be positive")
    n = int(round(math.log2(state.size)))
    probs = np.abs(state) ** 2
    probs = probs / probs.sum()
    rng = np.random.default_rng(seed)
    counts = rng.multinomial(shots, probs)
    return {
        format(i, f"0{n}b")[::-1]: int(cnt)
        for i, cnt in enumerate(counts)
        if cnt > 0
    }


def amplitudes_json(state: np.ndarray, max_qubits: int = 10) -> str:
    """Debug dump of the amplitudes, capped to keep the output readable."""
    import json

    n = int(round(math.log2(state.size)))
    if n > max_qubits:
        raise SimLimitError(f"amplitude dump capped at {max_qubits} qubits")
    return json.dumps(
        {
            format(i, f"0{n}b")[::-1]: [float(state[i].real), float(state[i].imag)]
            for i in range(state.size)
            if abs(state[i]) > 1e-12
        },
        indent=2,
    )


def expectation_from_counts(counts: dict[str, int], obs: str) -> float:
    """Z-basis estimator: parity of the measured bits under the observable support.

    Only valid when the circuit was already rotated so every non-I letter is Z.
    """
    total = sum(counts.values())
    acc = 0
    for bits, cnt in counts.items():
        parity = sum(int(bits[q]) for q, ch in enumerate(obs) if ch != "I")
        acc += cnt * (-1) ** (parity % 2)
    return acc / total
