"""Classical post-processing: recombines per-component expectations with the
channel coefficients, applies isomorphic-instance reuse, and computes the
overhead and error metrics."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .circuit import Circuit
from .cutsearch import CutSet, postproc_terms, sampling_terms
from .errors import SimLimitError
from .isomorph import IsoBlock
from .qpd import CutPlan
from .sim import MAX_QUBITS, branch_eval, expectation, simulate


def reconstruct_expectation(terms) -> float:
    """Sum of coefficient times the product of per-component expectations."""
    total = 0.0
    for coeff, values in terms:
        prod = coeff
        for v in values:
            prod *= v
        total += prod
    return total


def overheads(cuts: CutSet, reuse_divisor: int = 1, executed_circuits: int | None = None) -> dict:
    """Exact big-integer overhead figures for a cut set."""
    post = postproc_terms(cuts.k1, cuts.k2)
    samp = sampling_terms(cuts.k1, cuts.k2)
    out = {
        "postproc": post,
        "sampling": samp,
        "postproc_log10": math.log10(post) if post > 0 else 0.0,
        "sampling_log10": math.log10(samp) if samp > 0 else 0.0,
    }
    if reuse_divisor > 1:
        out["sampling_with_reuse"] = samp // reuse_divisor
    if executed_circuits is not None:
        out["executed_circuits"] = executed_circuits
    return out


def error_report(value: float, ground_truth: float | None, overhead: dict | None = None) -> dict:
    report = {"expectation": value, "ground_truth": ground_truth}
    if ground_truth is not None:
        report["absolute_error"] = abs(value - ground_truth)
    if overhead:
        report["overheads"] = overhead
    return report


def ground_truth_expectation(c: Circuit, observable: str, max_qubits: int = MAX_QUBITS) -> float | None:
    """All-gates exact expectation, or None when the circuit is too large."""
    if c.num_qubits > max_qubits:
        return None
    return expectation(simulate(c, max_qubits=max_qubits), observable)


# ---------------------------------------------------------------------------
# Reuse grouping
# ---------------------------------------------------------------------------

@dataclass
class ReusePlan:
    source_of: dict[int, int] = field(default_factory=dict)  # comp -> representative comp
    slot_order: dict[int, list] = field(default_factory=dict)  # comp -> canonical slot refs
    reused: int = 0
    sampling_divisor: int = 1


def plan_reuse(plan: CutPlan, block: IsoBlock | None, reuse_count: int,
               fragments: list[str] | None = None) -> ReusePlan:
    """Group instance components by boundary-slot structure and observable
    fragment; within a group, up to ``reuse_count`` members copy the first
    member's per-variant results instead of executing.

    Instances whose boundary differs (a chain-end block missing an incoming
    cut, say) land in separate groups and never substitute for each other.
    """
    out = ReusePlan()
    if block is None or not block.found or reuse_count <= 0:
        return out
    comp_by_nodes = {comp.node_set: comp.index for comp in plan.components}
    groups: dict[tuple, list[int]] = {}
    for inst in block.instances:
        ci = comp_by_nodes.get(frozenset(inst))
        if ci is None:
            continue  # the final cut set did not isolate this instance
        position = {node: k for k, node in enumerate(inst)}
        comp = plan.components[ci]
        refs = []
        ok = True
        for kind, idx, side in comp.slots:
            if kind == "wire":
                slot = plan.wire_slots[idx]
                node = slot.up_node if side == "up" else slot.down_node
            else:
                slot = plan.gate_slots[idx]
                node = slot.node_a if side == "a" else slot.node_b
            if node not in position:
                ok = False
                break
            refs.append((position[node], kind, idx, side))
        if not ok:
            continue
        refs.sort()
        shape = tuple((pos, kind, side) for pos, kind, _, side in refs)
        frag = fragments[ci] if fragments is not None else ""
        groups.setdefault((shape, frag), []).append(ci)
        out.slot_order[ci] = [(kind, idx, side) for _, kind, idx, side in refs]
    budget = reuse_count
    for key in sorted(groups, key=lambda k: (-len(groups[k]), k)):
        members = sorted(groups[key])
        if len(members) < 2:
            continue
        rep = members[0]
        for member in members[1:]:
            if budget <= 0:
                break
            out.source_of[member] = rep
            out.reused += 1
            budget -= 1
            share = 1
            for kind, _, _ in plan.components[member].slots:
                share *= 4 if kind == "wire" else 3
            out.sampling_divisor *= share
    return out


# ---------------------------------------------------------------------------
# Exact and sampled evaluation
# ---------------------------------------------------------------------------

@dataclass
class EvaluationResult:
    expectation: float
    executed_circuits: int
    evaluations: int
    term_count: int
    reused_instances: int = 0


def evaluate_cuts(plan: CutPlan, observable: str, block: IsoBlock | None = None,
                  reuse_count: int = 0, shots: int | None = None, seed: int | None = None,
                  max_qubits: int = MAX_QUBITS) -> EvaluationResult:
    """Evaluate every variant and recombine.  Exact mode uses projective
    branch enumeration; shot mode draws seeded samples per executed setting."""
    n_comps = len(plan.components)
    for comp in plan.components:
        if comp.num_wires > max_qubits:
            raise SimLimitError(
                f"component with {comp.num_wires} wires exceeds the {max_qubits}-qubit simulator limit"
            )
    frags = [plan.fragment(i, observable) for i in range(n_comps)]
    reuse = plan_reuse(plan, block, reuse_count, frags)
    rng = np.random.default_rng(seed)
    value_cache: dict[tuple, float] = {}
    exec_keys: set[tuple] = set()
    evaluations = 0

    def slot_positions(ci: int) -> list[int]:
        order = reuse.slot_order.get(ci, plan.components[ci].slots)
        n_wire = len(plan.wire_slots)
        positions = []
        for kind, idx, side in order:
            positions.append(idx if kind == "wire" else n_wire + idx)
        return positions

    positions = [slot_positions(ci) for ci in range(n_comps)]

    def comp_value(ci: int, combo) -> float:
        nonlocal evaluations
        src = reuse.source_of.get(ci, ci)
        vkey = (src, tuple(combo[p] for p in positions[ci]), frags[ci])
        hit = value_cache.get(vkey)
        if hit is not None:
            return hit
        circuit = plan.component_circuit(ci, combo)
        exec_keys.add((src, plan.component_key(ci, combo)))
        if shots is None:
            value = branch_eval(circuit, frags[ci], max_qubits=max_qubits)
        else:
            value = _shot_expectation(circuit, frags[ci], shots, rng, max_qubits)
        evaluations += 1
        value_cache[vkey] = value
        return value

    total = 0.0
    terms = 0
    for combo, coeff in plan.assignments():
        prod = coeff
        for ci in range(n_comps):
            prod *= comp_value(ci, combo)
        total += prod
        terms += 1
    return EvaluationResult(
        expectation=total,
        executed_circuits=len(exec_keys),
        evaluations=evaluations,
        term_count=terms,
        reused_instances=reuse.reused,
    )


def _shot_expectation(circuit: Circuit, frag: str, shots: int, rng, max_qubits: int) -> float:
    """Sampled estimate of a sign-folded component expectation: branches are
    enumerated exactly, then shots split across them by probability."""
    from .circuit import GateKind
    from .sim import _apply_1q, _project, apply_gate, zero_state

    n = circuit.num_qubits
    branches: list[tuple[int, np.ndarray]] = []

    def run(state, idx, sign):
        while idx < len(circuit.gates):
            g = circuit.gates[idx]
            if g.kind is GateKind.MEASURE:
                q = g.qubits[0]
                run(_project(state, q, 0, n), idx + 1, sign)
                run(_project(state, q, 1, n), idx + 1, -sign)
                return
            state = apply_gate(state, g, n)
            idx += 1
        branches.append((sign, state))

    run(zero_state(n), 0, 1)
    probs = np.array([float(np.vdot(s, s).real) for _, s in branches])
    probs = np.clip(probs, 0.0, None)
    if probs.sum() <= 0:
        return 0.0
    counts = rng.multinomial(shots, probs / probs.sum())
    basis_change = {"X": ("h",), "Y": ("sdg", "h"), "Z": (), "I": ()}
    estimate = 0.0
    for (sign, state), n_shots in zip(branches, counts):
        if n_shots == 0:
            continue
        norm = float(np.vdot(state, state).real)
        psi = state / math.sqrt(norm)
        for q, letter in enumerate(frag):
            for name in basis_change[letter]:
                psi = _apply_1q(psi, _BASIS_MATS[name], q, n)
        p = np.abs(psi) ** 2
        support = [q for q, letter in enumerate(frag) if letter != "I"]
        parity = np.array([
            (-1) ** sum(i >> q & 1 for q in support) for i in range(2**n)
        ])
        outcome_probs = p / p.sum()
        draws = rng.multinomial(n_shots, outcome_probs)
        estimate += sign * float(np.dot(draws, parity)) / shots
    return estimate


_BASIS_MATS = {
    "h": np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2),
    "sdg": np.diag([1, -1j]).astype(complex),
}
