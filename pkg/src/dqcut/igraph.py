"""Interaction graph over per-gate qubit occurrences.

Nodes are (qubit, occurrence-among-two-qubit-gates) pairs.  WIRE edges join
consecutive occurrences of one qubit, GATE edges join the two operands of one
two-qubit gate.  Cutting a WIRE edge is a wire cut, cutting a GATE edge is a
gate cut.  Super nodes mark groups whose internal edges may not be cut.

Edge ids follow the canonical order (min gate seq involved, GATE before WIRE,
qubit index), a pure function of the circuit.
"""
from __future__ import annotations

from dataclasses import dataclass

from .circuit import Circuit, Gate
from .errors import CutInfeasibleError, DqcutError

WIRE = "wire"
GATE = "gate"


@dataclass(frozen=True)
class IgNode:
    index: int
    qubit: int
    occurrence: int
    gate_seq: int
    operand_pos: int


@dataclass(frozen=True)
class IgEdge:
    index: int
    kind: str
    endpoints: tuple[int, int]  # WIRE: (earlier, later); GATE: (operand0, operand1)
    gate_seq: int = -1  # GATE edges: seq of the source gate
    qubit: int = -1  # WIRE edges: the qubit the wire belongs to


class InteractionGraph:
    def __init__(self, circuit: Circuit, nodes: list[IgNode], edges: list[IgEdge]):
        self.circuit = circuit
        self.nodes = nodes
        self.edges = edges
        self.node_at: dict[tuple[int, int], int] = {(n.qubit, n.occurrence): n.index for n in nodes}
        self.qubit_nodes: dict[int, list[int]] = {}
        for n in nodes:
            self.qubit_nodes.setdefault(n.qubit, []).append(n.index)
        for ids in self.qubit_nodes.values():
            ids.sort(key=lambda i: nodes[i].occurrence)
        # wire edge id between occurrence k and k+1 of each qubit
        self.wire_edge_of: dict[tuple[int, int], int] = {
            (e.qubit, nodes[e.endpoints[0]].occurrence): e.index for e in edges if e.kind == WIRE
        }
        self.adjacent: dict[int, list[int]] = {n.index: [] for n in nodes}
        for e in edges:
            self.adjacent[e.endpoints[0]].append(e.index)
            self.adjacent[e.endpoints[1]].append(e.index)
        self.super_groups: list[frozenset[int]] = []
        self.node_group: dict[int, int] = {}
        self.cuttable: list[int] = [e.index for e in edges]

    # -- super-node contraction ---------------------------------------------

    def contract(self, members: set[int]) -> "InteractionGraph":
        """Contract ``members`` into a super node whose internal edges become uncuttable."""
        members = frozenset(members)
        for m in members:
            if m in self.node_group:
                raise DqcutError("node already belongs to a super node")
        if not self._connected_subset(members):
            raise DqcutError("super node members must induce a connected subgraph")
        g = InteractionGraph(self.circuit, self.nodes, self.edges)
        g.super_groups = self.super_groups + [members]
        g.node_group = dict(self.node_group)
        gid = len(g.super_groups) - 1
        for m in members:
            g.node_group[m] = gid
        internal = {
            e.index
            for e in self.edges
            if g.node_group.get(e.endpoints[0]) == g.node_group.get(e.endpoints[1])
            and e.endpoints[0] in g.node_group
        }
        g.cuttable = [i for i in self.cuttable if i not in internal]
        return g

    def _connected_subset(self, members: frozenset[int]) -> bool:
        if not members:
            return False
        start = next(iter(members))
        seen = {start}
        stack = [start]
        while stack:
            v = stack.pop()
            for ei in self.adjacent[v]:
                e = self.edges[ei]
                other = e.endpoints[1] if e.endpoints[0] == v else e.endpoints[0]
                if other in members and other not in seen:
                    seen.add(other)
                    stack.append(other)
        return seen == members

    @property
    def internal_edges(self) -> set[int]:
        cut_set = set(self.cuttable)
        return {e.index for e in self.edges if e.index not in cut_set}

    # -- partitioning ---------------------------------------------------------

    def partition(self, kept_edges, cut_wire_edges) -> "Partition":
        """Connected components under ``kept_edges`` plus super-internal edges;
        wire segmentation splits at ``cut_wire_edges``."""
        parent = list(range(len(self.nodes)))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        kept = set(kept_edges) | self.internal_edges
        for ei in kept:
            e = self.edges[ei]
            ra, rb = find(e.endpoints[0]), find(e.endpoints[1])
            if ra != rb:
                parent[ra] = rb
        comp_ids: dict[int, int] = {}
        comp_nodes: list[list[int]] = []
        for n in self.nodes:
            r = find(n.index)
            if r not in comp_ids:
                comp_ids[r] = len(comp_nodes)
                comp_nodes.append([])
            comp_nodes[comp_ids[r]].append(n.index)
        seg = self._segments(cut_wire_edges)
        return Partition(self, comp_nodes, [comp_ids[find(n.index)] for n in self.nodes], seg, kept)

    def _segments(self, cut_wire_edges) -> dict[int, int]:
        """node id -> wire segment ordinal of its qubit (splits at cut wire edges)."""
        cuts = set(cut_wire_edges)
        seg: dict[int, int] = {}
        for q, ids in self.qubit_nodes.items():
            s = 0
            prev = None
            for nid in ids:
                if prev is not None:
                    ei = self.wire_edge_of.get((q, self.nodes[prev].occurrence))
                    if ei is not None and ei in cuts:
                        s += 1
                seg[nid] = s
                prev = nid
        return seg

    def apply_cuts(self, s) -> "Partition":
        """Partition after deleting cuttable edges whose decision is True.

        ``s`` is a boolean sequence over the canonical cuttable edge list; a
        shorter-than-full list leaves the remaining edges undecided (kept).
        """
        if len(s) > len(self.cuttable):
            raise ValueError("decision vector longer than the cuttable edge list")
        cut = {self.cuttable[i] for i, flag in enumerate(s) if flag}
        return self.cut_edges(cut)

    def cut_edges(self, cut_edge_ids) -> "Partition":
        cut = set(cut_edge_ids)
        bad = cut - set(self.cuttable)
        if bad:
            raise DqcutError(f"edges {sorted(bad)} are internal to a super node and cannot be cut")
        kept = [e.index for e in self.edges if e.index not in cut]
        cut_wires = {ei for ei in cut if self.edges[ei].kind == WIRE}
        return self.partition(kept, cut_wires)

    # -- export ----------------------------------------------------------------

    def to_dot(self) -> str:
        lines = ["graph interaction {", "  rankdir=LR;"]
        for gid, group in enumerate(self.super_groups):
            lines.append(f"  subgraph cluster_super{gid} {{ label=\"super {gid}\";")
            for nid in sorted(group):
                n = self.nodes[nid]
                lines.append(f'    n{nid} [label="q{n.qubit}^({n.occurrence})"];')
            lines.append("  }")
        for n in self.nodes:
            if n.index not in self.node_group:
                lines.append(f'  n{n.index} [label="q{n.qubit}^({n.occurrence})"];')
        for e in self.edges:
            style = "dashed" if e.kind == GATE else "solid"
            lines.append(f"  n{e.endpoints[0]} -- n{e.endpoints[1]} [style={style}, label=\"e{e.index}\"];")
        lines.append("}")
        return "\n".join(lines) + "\n"


class Partition:
    """Connected components with per-component wire bookkeeping."""

    def __init__(self, graph: InteractionGraph, comp_nodes, comp_of_node, seg, kept_edges):
        self.graph = graph
        self.components: list[list[int]] = comp_nodes
        self.comp_of_node: list[int] = comp_of_node
        self.segment_of_node: dict[int, int] = seg
        self.kept_edges: set[int] = set(kept_edges)

    def __len__(self) -> int:
        return len(self.components)

    def wires(self, comp_index: int) -> list[tuple[int, int]]:
        """Distinct (qubit, segment) wires of one component, sorted."""
        seen = {
            (self.graph.nodes[nid].qubit, self.segment_of_node[nid])
            for nid in self.components[comp_index]
        }
        return sorted(seen)

    def wire_counts(self) -> list[int]:
        return [len(self.wires(i)) for i in range(len(self.components))]

    def wire_graph(self, comp_index: int) -> tuple[int, list[tuple[int, int]]]:
        """Wire-level interaction multigraph of a component: wires renumbered
        0..w-1 in sorted order, one entry per kept internal gate edge."""
        wires = self.wires(comp_index)
        local = {w: i for i, w in enumerate(wires)}
        nodes = self.graph.nodes
        pairs = []
        comp = comp_index
        for nid in self.components[comp_index]:
            for ei in self.graph.adjacent[nid]:
                e = self.graph.edges[ei]
                if e.kind != GATE or e.index not in self.kept_edges:
                    continue
                a, b = e.endpoints
                if nid != a:  # count each gate edge once, from its first endpoint
                    continue
                if self.comp_of_node[b] != comp:
                    continue
                wa = local[(nodes[a].qubit, self.segment_of_node[a])]
                wb = local[(nodes[b].qubit, self.segment_of_node[b])]
                pairs.append((min(wa, wb), max(wa, wb)))
        return len(wires), sorted(pairs)


def build_graph(c: Circuit) -> InteractionGraph:
    """Interaction graph of a circuit; raises when there is nothing to cut."""
    two_qubit = c.two_qubit_gates()
    if not two_qubit:
        raise CutInfeasibleError("nothing to cut: the circuit has no two-qubit gates")
    nodes: list[IgNode] = []
    occ_count: dict[int, int] = {}
    node_of: dict[tuple[int, int], int] = {}
    gate_nodes: list[tuple[Gate, int, int]] = []
    for g in two_qubit:
        pair = []
        for pos, q in enumerate(g.qubits):
            occ = occ_count.get(q, 0)
            occ_count[q] = occ + 1
            nid = len(nodes)
            nodes.append(IgNode(nid, q, occ, g.seq, pos))
            node_of[(q, occ)] = nid
            pair.append(nid)
        gate_nodes.append((g, pair[0], pair[1]))

    raw_edges: list[tuple[tuple, str, tuple[int, int], int, int]] = []
    for g, na, nb in gate_nodes:
        key = (g.seq, 0, min(g.qubits))
        raw_edges.append((key, GATE, (na, nb), g.seq, -1))
    for q, count in occ_count.items():
        for occ in range(count - 1):
            na, nb = node_of[(q, occ)], node_of[(q, occ + 1)]
            key = (nodes[na].gate_seq, 1, q)
            raw_edges.append((key, WIRE, (na, nb), -1, q))
    raw_edges.sort(key=lambda t: t[0])
    edges = [
        IgEdge(i, kind, endpoints, gate_seq=seq, qubit=qubit)
        for i, (_, kind, endpoints, seq, qubit) in enumerate(raw_edges)
    ]
    return InteractionGraph(c, nodes, edges)
