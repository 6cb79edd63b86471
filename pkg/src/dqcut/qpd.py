"""Quasi-probability decomposition of wire and gate cuts.

A wire cut realizes the identity channel as a measure-and-prepare expansion:

    rho = 1/2 [ Tr(rho I)(|0><0| + |1><1|) + Tr(rho Z)(|0><0| - |1><1|)
              + Tr(rho X)(2|+><+| - |0><0| - |1><1|)
              + Tr(rho Y)(2|i><i| - |0><0| - |1><1|) ]

giving 16 (basis, state) pairs of which 10 carry nonzero weight; I and Z share
the executable measurement setting, so 3 upstream settings pair with 4
preparations.

A gate cut applies to any gate locally equivalent to exp(i*theta Z(x)Z) and
expands into six channel groups: identity, Z(x)Z, and four measure/rotate
cross terms with coefficients +-cos(theta)sin(theta).  The (I +- iZ) factors
are realized as RZ(-+pi/2) rotations and the (I +- Z) factors as sign-folded
projective measurements; the concrete tables below are validated against the
brute-force superoperator oracle in the test suite.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

from .circuit import (
    Circuit,
    Gate,
    GateKind,
    PREP_IPLUS,
    PREP_ONE,
    PREP_PLUS,
    PREP_ZERO,
)
from .cutsearch import CutSet
from .errors import DqcutError, VariantLimitError
from .igraph import GATE, InteractionGraph, build_graph

PREP_STATES = (PREP_ZERO, PREP_ONE, PREP_PLUS, PREP_IPLUS)

# basis-change gates mapping each measurement basis onto a Z measurement
MEASURE_PRELUDE = {"I": (), "Z": (), "X": ("h",), "Y": ("sdg", "h")}


@dataclass(frozen=True)
class WireCutChannel:
    measure_basis: str  # I, X, Y or Z on the upstream wire end
    prepare_state: int  # eigenstate index prepared on the fresh wire
    coefficient: float

    def upstream_ops(self) -> tuple:
        """Op specs inserted at the cut point; basis I needs no measurement."""
        if self.measure_basis == "I":
            return ()
        return tuple((name,) for name in MEASURE_PRELUDE[self.measure_basis]) + (("meas",),)

    def downstream_ops(self) -> tuple:
        return (("prepare", self.prepare_state),)


WIRE_CHANNELS: tuple[WireCutChannel, ...] = (
    WireCutChannel("I", PREP_ZERO, 0.5),
    WireCutChannel("I", PREP_ONE, 0.5),
    WireCutChannel("Z", PREP_ZERO, 0.5),
    WireCutChannel("Z", PREP_ONE, -0.5),
    WireCutChannel("X", PREP_PLUS, 1.0),
    WireCutChannel("X", PREP_ZERO, -0.5),
    WireCutChannel("X", PREP_ONE, -0.5),
    WireCutChannel("Y", PREP_IPLUS, 1.0),
    WireCutChannel("Y", PREP_ZERO, -0.5),
    WireCutChannel("Y", PREP_ONE, -0.5),
)


def decompose_wire_cut() -> tuple[WireCutChannel, ...]:
    """The nonzero channels of the 4x4 wire-cut expansion."""
    return WIRE_CHANNELS


@dataclass(frozen=True)
class GateCutChannel:
    ops_a: tuple  # op specs on the first operand wire
    ops_b: tuple  # op specs on the second operand wire
    coefficient: float


def _core_channels(theta: float) -> list[GateCutChannel]:
    c, s = math.cos(theta), math.sin(theta)
    half = math.pi / 2
    return [
        GateCutChannel((), (), c * c),
        GateCutChannel((("z",),), (("z",),), s * s),
        GateCutChannel((("meas",),), (("rz", -half),), c * s),
        GateCutChannel((("meas",),), (("rz", half),), -c * s),
        GateCutChannel((("rz", -half),), (("meas",),), c * s),
        GateCutChannel((("rz", half),), (("meas",),), -c * s),
    ]


def _zz_form(gate: Gate) -> tuple[float, tuple, tuple, tuple, tuple]:
    """(theta, pre_a, pre_b, post_a, post_b) bringing the gate to exp(i*theta ZZ)."""
    k = gate.kind
    if k is GateKind.RZZ:
        return -gate.params[0] / 2, (), (), (), ()
    if k is GateKind.CZ:
        lam = math.pi
    elif k is GateKind.CP:
        lam = gate.params[0]
    elif k is GateKind.CX:
        half = math.pi / 2
        return math.pi / 4, (), (("h",),), (("rz", half),), (("rz", half), ("h",))
    else:
        raise DqcutError(
            f"gate kind {k.value!r} has no local Z(x)Z form; cut the adjacent wires instead"
        )
    return lam / 4, (), (), (("rz", lam / 2),), (("rz", lam / 2),)


def decompose_gate_cut(gate: Gate) -> list[GateCutChannel]:
    """Six weighted channels whose sum reproduces the cut gate's superoperator."""
    theta, pre_a, pre_b, post_a, post_b = _zz_form(gate)
    return [
        GateCutChannel(pre_a + ch.ops_a + post_a, pre_b + ch.ops_b + post_b, ch.coefficient)
        for ch in _core_channels(theta)
    ]


def gate_cut_weight(gate: Gate) -> float:
    """One-norm of the decomposition coefficients (squares to the sampling factor)."""
    return sum(abs(ch.coefficient) for ch in decompose_gate_cut(gate))


# ---------------------------------------------------------------------------
# Cut plan: components, insertion slots, and variant enumeration
# ---------------------------------------------------------------------------

@dataclass
class WireSlot:
    index: int
    edge_id: int
    qubit: int
    up_comp: int
    up_wire: int
    up_key: tuple
    up_node: int
    down_comp: int
    down_wire: int
    down_key: tuple
    down_node: int


@dataclass
class GateSlot:
    index: int
    edge_id: int
    gate: Gate
    comp_a: int
    wire_a: int
    node_a: int
    comp_b: int
    wire_b: int
    node_b: int
    key: tuple


@dataclass
class ComponentPlan:
    index: int
    wires: list[tuple[int, int]]  # (qubit, segment), sorted
    ops: list[tuple[tuple, GateKind, tuple[int, ...], tuple[float, ...]]] = field(default_factory=list)
    slots: list[tuple[str, int, str]] = field(default_factory=list)  # (kind, slot index, side)
    node_set: frozenset[int] = frozenset()

    @property
    def num_wires(self) -> int:
        return len(self.wires)

    def local(self, wire: tuple[int, int]) -> int:
        return self.wires.index(wire)


class CutPlan:
    """Everything needed to materialize and evaluate the variants of a cut."""

    def __init__(self, circuit: Circuit, cuts: CutSet, graph: InteractionGraph | None = None):
        self.circuit = circuit
        self.cuts = cuts
        self.graph = graph if graph is not None else build_graph(circuit)
        self._build()

    # -- construction -------------------------------------------------------

    def _build(self) -> None:
        g = self.graph
        c = self.circuit
        part = g.cut_edges(set(self.cuts.edge_ids))
        self.partition = part
        seg_of = part.segment_of_node
        cut_gate_ids = set(self.cuts.gate_edge_ids)
        cut_wire_ids = set(self.cuts.wire_edge_ids)

        comps: list[ComponentPlan] = []
        for idx, nodes in enumerate(part.components):
            comps.append(ComponentPlan(idx, part.wires(idx), node_set=frozenset(nodes)))
        comp_of_node = part.comp_of_node
        wire_of_node = {
            n.index: (n.qubit, seg_of[n.index]) for n in g.nodes
        }
        # gateless qubits become single-wire components of their own
        graph_qubits = {n.qubit for n in g.nodes}
        self.spectator_comps: dict[int, int] = {}
        for q in range(c.num_qubits):
            if q not in graph_qubits:
                comp = ComponentPlan(len(comps), [(q, 0)])
                self.spectator_comps[q] = comp.index
                comps.append(comp)
        self.components = comps

        # final segment per qubit (where its observable letter lives)
        self.final_segment = {q: 0 for q in range(c.num_qubits)}
        for ei in cut_wire_ids:
            qubit = g.edges[ei].qubit
            self.final_segment[qubit] += 1

        # two-qubit gates: kept ones belong to their component, cut ones open slots
        self.gate_slots: list[GateSlot] = []
        for e in g.edges:
            if e.kind != GATE:
                continue
            gate = c.gates[e.gate_seq]
            na, nb = e.endpoints
            if e.index in cut_gate_ids:
                slot = GateSlot(
                    index=len(self.gate_slots),
                    edge_id=e.index,
                    gate=gate,
                    comp_a=comp_of_node[na],
                    wire_a=wire_of_node[na],
                    node_a=na,
                    comp_b=comp_of_node[nb],
                    wire_b=wire_of_node[nb],
                    node_b=nb,
                    key=(gate.seq, 0),
                )
                self.gate_slots.append(slot)
                comps[slot.comp_a].slots.append(("gate", slot.index, "a"))
                comps[slot.comp_b].slots.append(("gate", slot.index, "b"))
            else:
                comp = comps[comp_of_node[na]]
                comp.ops.append(
                    ((gate.seq, 0), gate.kind,
                     (comp.local(wire_of_node[na]), comp.local(wire_of_node[nb])), gate.params)
                )

        # wire cuts: measurement upstream, preparation downstream
        self.wire_slots: list[WireSlot] = []
        for ei in sorted(cut_wire_ids):
            e = g.edges[ei]
            up, down = e.endpoints
            down_seq = g.nodes[down].gate_seq
            slot = WireSlot(
                index=len(self.wire_slots),
                edge_id=ei,
                qubit=e.qubit,
                up_comp=comp_of_node[up],
                up_wire=wire_of_node[up],
                up_key=(down_seq, -1),
                up_node=up,
                down_comp=comp_of_node[down],
                down_wire=wire_of_node[down],
                down_key=(down_seq, -2),
                down_node=down,
            )
            self.wire_slots.append(slot)
            comps[slot.up_comp].slots.append(("wire", slot.index, "up"))
            comps[slot.down_comp].slots.append(("wire", slot.index, "down"))

        # single-qubit gates ride with the nearest preceding occurrence node
        occ_nodes: dict[int, list[int]] = {}
        for n in g.nodes:
            occ_nodes.setdefault(n.qubit, []).append(n.index)
        for ids in occ_nodes.values():
            ids.sort(key=lambda i: g.nodes[i].gate_seq)
        for gate in c.gates:
            if gate.is_two_qubit:
                continue
            q = gate.qubits[0]
            if q in self.spectator_comps:
                comp = comps[self.spectator_comps[q]]
                comp.ops.append(((gate.seq, 0), gate.kind, (0,), gate.params))
                continue
            owner = None
            for nid in occ_nodes[q]:
                if g.nodes[nid].gate_seq < gate.seq:
                    owner = nid
                else:
                    break
            if owner is None:
                owner = occ_nodes[q][0]
            comp = comps[comp_of_node[owner]]
            comp.ops.append(
                ((gate.seq, 0), gate.kind, (comp.local(wire_of_node[owner]),), gate.params)
            )
        for comp in comps:
            comp.ops.sort(key=lambda t: t[0])
            comp.slots.sort()

    # -- channel spaces -----------------------------------------------------

    def slot_channels(self) -> list[list]:
        """Per cut, the list of nonzero channels (wire slots first, then gate
        slots, matching the channel index vector layout)."""
        spaces: list[list] = [list(WIRE_CHANNELS) for _ in self.wire_slots]
        spaces.extend(decompose_gate_cut(slot.gate) for slot in self.gate_slots)
        return spaces

    def variant_space(self) -> int:
        total = 1
        for space in self.slot_channels():
            total *= len(space)
        return total

    def assignments(self):
        """Iterator over (channel index vector, coefficient) pairs."""
        spaces = self.slot_channels()
        for combo in itertools.product(*(range(len(s)) for s in spaces)):
            coeff = 1.0
            for space, i in zip(spaces, combo):
                coeff *= space[i].coefficient
            yield combo, coeff

    # -- component materialization -------------------------------------------

    def component_ops_for(self, comp_index: int, assignment: tuple[int, ...]):
        """Insertion op specs of one component under a channel assignment:
        list of (key, op spec tuple, local wire)."""
        comp = self.components[comp_index]
        spaces = self.slot_channels()
        n_wire = len(self.wire_slots)
        inserts = []
        for kind, idx, side in comp.slots:
            if kind == "wire":
                slot = self.wire_slots[idx]
                channel: WireCutChannel = spaces[idx][assignment[idx]]
                if side == "up":
                    for j, op in enumerate(channel.upstream_ops()):
                        inserts.append((slot.up_key + (j,), op, comp.local(slot.up_wire)))
                else:
                    for j, op in enumerate(channel.downstream_ops()):
                        inserts.append((slot.down_key + (j,), op, comp.local(slot.down_wire)))
            else:
                slot = self.gate_slots[idx]
                channel = spaces[n_wire + idx][assignment[n_wire + idx]]
                ops = channel.ops_a if side == "a" else channel.ops_b
                wire = slot.wire_a if side == "a" else slot.wire_b
                for j, op in enumerate(ops):
                    inserts.append((slot.key + (j,), op, comp.local(wire)))
        return inserts

    def component_circuit(self, comp_index: int, assignment: tuple[int, ...]) -> Circuit:
        comp = self.components[comp_index]
        inserts = self.component_ops_for(comp_index, assignment)
        stream: list[tuple[tuple, GateKind, tuple[int, ...], tuple[float, ...]]] = list(comp.ops)
        for key, op, wire in inserts:
            stream.append((key, _OP_KINDS[op[0]], (wire,), tuple(op[1:])))
        stream.sort(key=lambda t: t[0])
        out = Circuit(max(1, comp.num_wires))
        for _, kind, qubits, params in stream:
            out.add(kind, qubits, params)
        return out

    def component_key(self, comp_index: int, assignment: tuple[int, ...]) -> tuple:
        """Executable-circuit signature of a component's channel choices; the
        I and Z wire bases share a measurement circuit and collapse together."""
        comp = self.components[comp_index]
        spaces = self.slot_channels()
        n_wire = len(self.wire_slots)
        sig = []
        for kind, idx, side in comp.slots:
            if kind == "wire":
                channel = spaces[idx][assignment[idx]]
                if side == "up":
                    basis = "Z" if channel.measure_basis == "I" else channel.measure_basis
                    sig.append(("meas", basis))
                else:
                    sig.append(("prep", channel.prepare_state))
            else:
                channel = spaces[n_wire + idx][assignment[n_wire + idx]]
                sig.append(("gate", channel.ops_a if side == "a" else channel.ops_b))
        return tuple(sig)

    def fragment(self, comp_index: int, observable: str) -> str:
        """Observable letters owned by a component: each original qubit's
        letter lives on its final wire segment."""
        comp = self.components[comp_index]
        letters = []
        for q, seg in comp.wires:
            letters.append(observable[q] if seg == self.final_segment[q] else "I")
        return "".join(letters)


_OP_KINDS = {
    "h": GateKind.H,
    "s": GateKind.S,
    "sdg": GateKind.SDG,
    "z": GateKind.Z,
    "rz": GateKind.RZ,
    "meas": GateKind.MEASURE,
    "prepare": GateKind.PREPARE,
}


@dataclass
class QpdVariant:
    coefficient: float
    channel_indices: tuple[int, ...]
    components: list[Circuit]
    execute: list[bool]


def build_cut_plan(c: Circuit, cuts: CutSet, graph: InteractionGraph | None = None) -> CutPlan:
    return CutPlan(c, cuts, graph)


def enumerate_variants(c: Circuit, cuts: CutSet, graph: InteractionGraph | None = None,
                       cap: int = 10**7) -> tuple[CutPlan, list[QpdVariant]]:
    """Materialize every nonzero-coefficient variant of a cut circuit.

    The Cartesian channel space is capped; connected leftovers of a partial
    cut stay as one executable unit.
    """
    plan = build_cut_plan(c, cuts, graph)
    space = plan.variant_space()
    if space > cap:
        raise VariantLimitError(
            f"{space} channel combinations exceed the cap of {cap}; use fewer cuts"
        )
    variants = []
    for combo, coeff in plan.assignments():
        components = [plan.component_circuit(i, combo) for i in range(len(plan.components))]
        variants.append(QpdVariant(coeff, combo, components, [True] * len(components)))
    return plan, variants


def variants_manifest(plan: CutPlan, variants: list[QpdVariant],
                      reused_components: set[int] | None = None) -> list[dict]:
    """JSON-ready manifest: channel vector, coefficient, component QASM, and
    an execute flag per component (False for reused instances)."""
    reused = reused_components or set()
    manifest = []
    for v in variants:
        manifest.append(
            {
                "channels": list(v.channel_indices),
                "coefficient": v.coefficient,
                "components": [
                    {"qasm": comp.to_qasm(), "execute": i not in reused}
                    for i, comp in enumerate(v.components)
                ],
            }
        )
    return manifest
