"""Isomorphic sub-circuit identification, contraction, and reuse bookkeeping.

Matching works on the interaction graph with labels rich enough that two
matched node sets extract to literally identical sub-circuits: gate edges
carry the gate kind and parameters, wire edges are oriented by time, and each
node carries the single-qubit gate runs riding on its qubit before the next
occurrence.  Circuits whose rotation angles differ everywhere (hardware
efficient ansatz) therefore produce no repeated blocks, while uniform
structures (GHZ chains, Bernstein-Vazirani fans) tile into many instances.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field

from .circuit import ANGLE_TOL, Circuit, Gate
from .igraph import GATE, WIRE, InteractionGraph


def variant_count(w_in: int, w_out: int) -> int:
    """Executable variants of a sub-circuit with w_in prepared and w_out
    measured cut wires: four eigenstate initializations, three measurement
    settings (I and Z share a circuit)."""
    if w_in < 0 or w_out < 0:
        raise ValueError("cut wire counts must be non-negative")
    return 4**w_in * 3**w_out


@dataclass
class ReuseConfig:
    restarts: int = 10
    reuse_count: int = 0

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be positive")
        if self.reuse_count < 0:
            raise ValueError("reuse_count must be non-negative")


@dataclass
class IsoBlock:
    template_nodes: tuple[int, ...] = ()
    instances: list[tuple[int, ...]] = field(default_factory=list)
    boundary_edge_count: int = 0

    @property
    def found(self) -> bool:
        return len(self.instances) >= 2

    def instance_sets(self) -> list[frozenset[int]]:
        return [frozenset(inst) for inst in self.instances]


def _round_params(params) -> tuple[int, ...]:
    return tuple(int(round(p / ANGLE_TOL)) for p in params)


class LabeledView:
    """Node and edge labels over an interaction graph for matching."""

    def __init__(self, g: InteractionGraph):
        self.g = g
        c = g.circuit
        prefix: dict[int, list[Gate]] = {}
        suffix: dict[int, list[Gate]] = {}
        occ_seqs: dict[int, list[tuple[int, int]]] = {}  # qubit -> [(gate seq, node id)]
        for n in g.nodes:
            occ_seqs.setdefault(n.qubit, []).append((n.gate_seq, n.index))
        for seqs in occ_seqs.values():
            seqs.sort()
        for gate in c.gates:
            if gate.is_two_qubit:
                continue
            q = gate.qubits[0]
            seqs = occ_seqs.get(q)
            if not seqs:
                continue  # gateless-from-the-graph qubit; nothing to label
            owner = None
            for seq, nid in seqs:
                if seq < gate.seq:
                    owner = nid
                else:
                    break
            if owner is None:
                prefix.setdefault(seqs[0][1], []).append(gate)
            else:
                suffix.setdefault(owner, []).append(gate)
        self.node_prefix = prefix
        self.node_suffix = suffix
        self.node_label: list[tuple] = []
        for n in g.nodes:
            pre = tuple((x.kind.value, _round_params(x.params)) for x in prefix.get(n.index, ()))
            suf = tuple((x.kind.value, _round_params(x.params)) for x in suffix.get(n.index, ()))
            self.node_label.append((pre, suf))
        self.edge_between: dict[tuple[int, int], int] = {}
        self.edge_label: dict[int, tuple] = {}
        self.edge_oriented: dict[int, bool] = {}
        for e in g.edges:
            a, b = e.endpoints
            self.edge_between[(a, b)] = e.index
            self.edge_between[(b, a)] = e.index
            if e.kind == WIRE:
                self.edge_label[e.index] = ("W",)
                self.edge_oriented[e.index] = True
            else:
                gate = c.gates[e.gate_seq]
                self.edge_label[e.index] = ("G", gate.kind.value, _round_params(gate.params))
                self.edge_oriented[e.index] = not gate.kind.symmetric
        self.neighbors: dict[int, list[int]] = {n.index: [] for n in g.nodes}
        for e in g.edges:
            a, b = e.endpoints
            self.neighbors[a].append(b)
            self.neighbors[b].append(a)
        self.label_count: dict[tuple, int] = {}
        for lbl in self.node_label:
            self.label_count[lbl] = self.label_count.get(lbl, 0) + 1

    def edges_match(self, t_edge: int, t_first: bool, h_edge: int, h_first: bool) -> bool:
        if self.edge_label[t_edge] != self.edge_label[h_edge]:
            return False
        if self.edge_oriented[t_edge]:
            return t_first == h_first
        return True


class _Matcher:
    """Backtracking search for induced labeled embeddings of a template node
    set into its own host graph (VF2-style candidate pruning)."""

    def __init__(self, view: LabeledView, template: tuple[int, ...]):
        self.view = view
        self.template = template
        self.tset = set(template)
        self.order = self._order_nodes()

    def _order_nodes(self) -> list[int]:
        view = self.view
        remaining = set(self.template)
        order: list[int] = []
        while remaining:
            in_order = set(order)
            frontier = [t for t in remaining if any(nb in in_order for nb in view.neighbors[t])]
            pool = frontier or list(remaining)
            nxt = min(pool, key=lambda t: (view.label_count[view.node_label[t]],
                                           -len(view.neighbors[t]), t))
            order.append(nxt)
            remaining.discard(nxt)
        return order

    def first_embedding(self, forbidden: set[int]) -> dict[int, int] | None:
        view = self.view
        g = view.g
        mapping: dict[int, int] = {}
        used: set[int] = set()

        def candidates(t: int):
            lbl = view.node_label[t]
            mapped_nbrs = [nb for nb in view.neighbors[t] if nb in mapping]
            if mapped_nbrs:
                anchor = mapped_nbrs[0]
                pool = view.neighbors[mapping[anchor]]
            else:
                pool = range(len(g.nodes))
            for h in sorted(pool):
                if h in used or h in forbidden or view.node_label[h] != lbl:
                    continue
                if len(view.neighbors[h]) < sum(1 for nb in view.neighbors[t] if nb in self.tset):
                    continue
                yield h

        def consistent(t: int, h: int) -> bool:
            for t2, h2 in mapping.items():
                te = view.edge_between.get((t, t2))
                he = view.edge_between.get((h, h2))
                if (te is None) != (he is None):
                    return False
                if te is None:
                    continue
                t_first = view.g.edges[te].endpoints[0] == t
                h_first = view.g.edges[he].endpoints[0] == h
                if not view.edges_match(te, t_first, he, h_first):
                    return False
            return True

        def extend(i: int) -> bool:
            if i == len(self.order):
                return True
            t = self.order[i]
            for h in candidates(t):
                if consistent(t, h):
                    mapping[t] = h
                    used.add(h)
                    if extend(i + 1):
                        return True
                    del mapping[t]
                    used.discard(h)
            return False

        return dict(mapping) if extend(0) else None


def disjoint_instances(view: LabeledView, template: tuple[int, ...],
                       need: int | None = None) -> list[dict[int, int]]:
    """Greedy maximal set of pairwise node-disjoint embeddings, the template's
    identity embedding first; stops early once ``need`` are found."""
    matcher = _Matcher(view, template)
    found = [dict(zip(template, template))]
    taken = set(template)
    while need is None or len(found) < need:
        emb = matcher.first_embedding(forbidden=taken)
        if emb is None:
            break
        found.append(emb)
        taken.update(emb.values())
    return found


def label_match(a: Circuit, b: Circuit) -> bool:
    """True when the circuits are isomorphic as labeled interaction graphs:
    same edge kinds, gate kinds, parameters within tolerance, and the same
    single-qubit dressings."""
    from .igraph import build_graph
    from .errors import CutInfeasibleError

    try:
        ga, gb = build_graph(a), build_graph(b)
    except CutInfeasibleError:
        return not a.two_qubit_gates() and not b.two_qubit_gates() and _bare_match(a, b)
    if len(ga.nodes) != len(gb.nodes) or len(ga.edges) != len(gb.edges):
        return False
    merged = _merge_graphs(ga, gb)
    view = LabeledView(merged)
    template = tuple(range(len(ga.nodes)))
    matcher = _Matcher(view, template)
    emb = matcher.first_embedding(forbidden=set(template))
    return emb is not None


def _bare_match(a: Circuit, b: Circuit) -> bool:
    ka = sorted((g.kind.value, _round_params(g.params)) for g in a.gates)
    kb = sorted((g.kind.value, _round_params(g.params)) for g in b.gates)
    return ka == kb


def _merge_graphs(ga: InteractionGraph, gb: InteractionGraph) -> InteractionGraph:
    """Disjoint union of two interaction graphs as one matching host."""
    from .igraph import IgEdge, IgNode

    ca, cb = ga.circuit, gb.circuit
    merged_circuit = Circuit(ca.num_qubits + cb.num_qubits)
    for g in ca.gates:
        merged_circuit.add(g.kind, g.qubits, g.params)
    for g in cb.gates:
        merged_circuit.add(g.kind, tuple(q + ca.num_qubits for q in g.qubits), g.params)
    off_n = len(ga.nodes)
    off_seq = len(ca.gates)
    nodes = list(ga.nodes) + [
        IgNode(n.index + off_n, n.qubit + ca.num_qubits, n.occurrence, n.gate_seq + off_seq, n.operand_pos)
        for n in gb.nodes
    ]
    off_e = len(ga.edges)
    edges = list(ga.edges) + [
        IgEdge(
            e.index + off_e,
            e.kind,
            (e.endpoints[0] + off_n, e.endpoints[1] + off_n),
            gate_seq=e.gate_seq + off_seq if e.kind == GATE else -1,
            qubit=e.qubit + ca.num_qubits if e.kind == WIRE else -1,
        )
        for e in gb.edges
    ]
    return InteractionGraph(merged_circuit, nodes, edges)


def find_isomorphs(g: InteractionGraph, cfg: ReuseConfig, seed: int,
                   max_qubits: int | None = None) -> IsoBlock:
    """Greedy isomorphic-block identification with seeded restarts.

    Each restart grows a template from a random node, keeping an expansion
    only while at least two disjoint labeled matches survive; the block with
    the fewest boundary edges over all restarts wins.
    """
    view = LabeledView(g)
    rng = random.Random(seed)
    nodes = g.nodes
    best: IsoBlock | None = None
    for restart in range(cfg.restarts):
        start = rng.randrange(len(nodes))
        current = {start}
        if max_qubits is not None and max_qubits < 1:
            break
        if len(disjoint_instances(view, (start,), need=2)) < 2:
            continue
        while True:
            frontier = sorted({nb for t in current for nb in view.neighbors[t]} - current)
            rng.shuffle(frontier)
            at_cap = max_qubits is not None and len({nodes[t].qubit for t in current}) >= max_qubits
            # closure gain: edges into the template minus edges newly dangling;
            # candidates that seal the block come first, and once the qubit cap
            # is reached only sealing candidates are allowed (otherwise growth
            # crawls along one wire forever, bloating the boundary)
            scored = []
            for cand in frontier:
                inside = sum(1 for nb in view.neighbors[cand] if nb in current)
                outside = len(view.neighbors[cand]) - inside
                scored.append((outside - inside, cand))
            scored.sort(key=lambda t: t[0])
            grown = False
            for loss, cand in scored:
                if at_cap and loss > 0:
                    break
                trial = current | {cand}
                if max_qubits is not None:
                    if len({nodes[t].qubit for t in trial}) > max_qubits:
                        continue
                template = tuple(sorted(trial))
                if len(disjoint_instances(view, template, need=2)) >= 2:
                    current = trial
                    grown = True
                    break
            if not grown:
                break
        template = tuple(sorted(current))
        embeddings = disjoint_instances(view, template)
        if len(embeddings) < 2:
            continue
        instances = [tuple(emb[t] for t in template) for emb in embeddings]
        boundary = _boundary_edges(g, instances)
        if best is None or boundary < best.boundary_edge_count:
            best = IsoBlock(template, instances, boundary)
    return best if best is not None else IsoBlock()


def _boundary_edges(g: InteractionGraph, instances) -> int:
    member = set()
    for inst in instances:
        member.update(inst)
    count = 0
    for e in g.edges:
        a, b = e.endpoints
        if (a in member) != (b in member):
            count += 1
    return count


def contract_isomorphs(g: InteractionGraph, block: IsoBlock) -> InteractionGraph:
    """One super node per instance; an empty block leaves the graph unchanged."""
    if not block.found:
        return g
    out = g
    for inst in block.instances:
        out = out.contract(set(inst))
    return out


def extract_subcircuit(g: InteractionGraph, node_set) -> Circuit:
    """Sub-circuit induced by a node set: internal two-qubit gates plus the
    single-qubit runs attached to member nodes, on locally renumbered wires."""
    view = LabeledView(g)
    members = set(node_set)
    qubits = sorted({g.nodes[n].qubit for n in members})
    local = {q: i for i, q in enumerate(qubits)}
    ops: list[Gate] = []
    for n in members:
        ops.extend(view.node_prefix.get(n, ()))
        ops.extend(view.node_suffix.get(n, ()))
    seen = set()
    for n in members:
        for ei in g.adjacent[n]:
            e = g.edges[ei]
            if e.kind != GATE or ei in seen:
                continue
            a, b = e.endpoints
            if a in members and b in members:
                seen.add(ei)
                ops.append(g.circuit.gates[e.gate_seq])
    ops.sort(key=lambda gate: gate.seq)
    sub = Circuit(len(qubits))
    for gate in ops:
        sub.add(gate.kind, tuple(local[q] for q in gate.qubits), gate.params)
    return sub
