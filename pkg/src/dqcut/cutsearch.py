"""Best-first search over cut vectors and critical-cut filtering.

Candidates are prefixes of a boolean decision vector over the canonical
cuttable edge list.  The heap orders them by a four-item cost tuple compared
lexicographically:

  1. estimated remote gates of the components induced by the decided kept
     edges (undecided edges are absent, which keeps the estimate optimistic)
  2. classical post-processing overhead 4^k1 * 6^k2
  3. sampling overhead 16^k1 * 9^k2, discounted when contraction makes
     isomorphic instance components contribute once
  4. minus the decision depth, so longer prefixes drain first

A goal is a fully decided vector splitting the graph into two or more
components that each fit some QPU.  Afterwards, filtering keeps only the cuts
whose single-cut remote-gate reduction meets the average.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass

from .dqc import DqcTopology
from .errors import BudgetExhaustedError, CutInfeasibleError
from .igraph import WIRE, InteractionGraph, Partition
from .mapping import crossing_count, partition_balanced

DEFAULT_BUDGET = 200_000


def postproc_terms(k1: int, k2: int) -> int:
    """Kronecker recombination term count for k1 wire cuts and k2 gate cuts."""
    return 4**k1 * 6**k2


def sampling_terms(k1: int, k2: int) -> int:
    """Sampling overhead for k1 wire cuts and k2 gate cuts."""
    return 16**k1 * 9**k2


@dataclass
class CutSet:
    """A concrete set of cuts, addressed both by edge ids and circuit positions."""

    wire_cuts: list[tuple[int, int]]  # (qubit, after_occurrence)
    gate_cuts: list[int]  # gate seq
    wire_edge_ids: list[int]
    gate_edge_ids: list[int]

    @property
    def k1(self) -> int:
        return len(self.wire_cuts)

    @property
    def k2(self) -> int:
        return len(self.gate_cuts)

    @property
    def edge_ids(self) -> list[int]:
        return sorted(self.wire_edge_ids + self.gate_edge_ids)

    @property
    def postproc(self) -> int:
        return postproc_terms(self.k1, self.k2)

    @property
    def sampling(self) -> int:
        return sampling_terms(self.k1, self.k2)

    def to_dict(self) -> dict:
        return {
            "wire_cuts": [{"qubit": q, "after_occurrence": occ} for q, occ in self.wire_cuts],
            "gate_cuts": list(self.gate_cuts),
            "k1": self.k1,
            "k2": self.k2,
            "postproc": self.postproc,
            "sampling": self.sampling,
        }


def make_cut_set(g: InteractionGraph, edge_ids) -> CutSet:
    wire_cuts, gate_cuts, wire_ids, gate_ids = [], [], [], []
    for ei in sorted(edge_ids):
        e = g.edges[ei]
        if e.kind == WIRE:
            wire_cuts.append((e.qubit, g.nodes[e.endpoints[0]].occurrence))
            wire_ids.append(ei)
        else:
            gate_cuts.append(e.gate_seq)
            gate_ids.append(ei)
    return CutSet(wire_cuts, gate_cuts, wire_ids, gate_ids)


@dataclass
class CutCandidate:
    s: tuple[bool, ...]
    cost: tuple | None = None
    insertion_counter: int = 0


@dataclass
class CutSolution:
    graph: InteractionGraph
    cut_edge_ids: list[int]
    cost: tuple
    cut_set: CutSet
    pops: int
    goals_seen: int
    budget_exhausted: bool = False


class RemoteEstimator:
    """Minimum remote gates for a partition: components fitting one QPU cost
    nothing; an oversized component is split into balanced groups of at most
    the QPU capacity with as few crossing gates as possible (the weakness
    grouping), and the crossings are the remote gates."""

    def __init__(self, topo: DqcTopology):
        self.cap = topo.max_data_capacity
        self._cache: dict[tuple, int] = {}

    def component(self, wires: int, gate_pairs) -> int:
        if wires <= self.cap:
            return 0
        key = (wires, tuple(gate_pairs))
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        groups = partition_balanced(wires, list(gate_pairs), self.cap)
        value = crossing_count(groups, list(gate_pairs))
        self._cache[key] = value
        return value

    def estimate(self, part: Partition) -> int:
        total = 0
        for i in range(len(part)):
            wires, pairs = part.wire_graph(i)
            total += self.component(wires, pairs)
        return total


def estimate_remote_gates(part: Partition, topo: DqcTopology,
                          estimator: RemoteEstimator | None = None) -> int:
    est = estimator or RemoteEstimator(topo)
    return est.estimate(part)


# ---------------------------------------------------------------------------
# Search
# ---------------------------------------------------------------------------

class _SearchState:
    def __init__(self, g: InteractionGraph, topo: DqcTopology, reuse_discount: bool):
        self.g = g
        self.topo = topo
        self.edge_ids = list(g.cuttable)
        self.estimator = RemoteEstimator(topo)
        self.num_qubits = g.circuit.num_qubits
        self.reuse_discount = reuse_discount and bool(g.super_groups)
        self.instance_sets = [frozenset(s) for s in g.super_groups]

    def evaluate(self, depth: int, mask: int):
        """Cost tuple and partition for a prefix, or (None, reason) when the
        candidate violates rule (i)."""
        kept, cut_edges, cut_wires = [], [], set()
        k1 = k2 = 0
        for i in range(depth):
            ei = self.edge_ids[i]
            if mask >> i & 1:
                cut_edges.append(ei)
                if self.g.edges[ei].kind == WIRE:
                    cut_wires.add(ei)
                    k1 += 1
                else:
                    k2 += 1
            else:
                kept.append(ei)
        part = self.g.partition(kept, cut_wires)
        counts = part.wire_counts()
        if any(cnt > self.num_qubits for cnt in counts):
            return None, "a component has more qubits than the original circuit"
        sampling = sampling_terms(k1, k2)
        if self.reuse_discount:
            sampling //= self._duplicate_share(part, cut_edges)
        cost = (self.estimator.estimate(part), postproc_terms(k1, k2), sampling, -depth)
        return (cost, part), None

    def _duplicate_share(self, part: Partition, cut_edges) -> int:
        """Sampling share of duplicate instance components (all but one per
        instance shape): 4 per incident wire-cut end, 3 per gate-cut end."""
        comp_sets = {frozenset(comp): idx for idx, comp in enumerate(part.components)}
        cut_set = set(cut_edges)
        shares = []
        matched = 0
        for inst in self.instance_sets:
            idx = comp_sets.get(inst)
            if idx is None:
                continue
            matched += 1
            if matched == 1:
                continue  # one representative always executes
            share = 1
            for nid in inst:
                for ei in self.g.adjacent[nid]:
                    if ei in cut_set:
                        share *= 4 if self.g.edges[ei].kind == WIRE else 3
            shares.append(share)
        divisor = 1
        for s in shares:
            divisor *= s
        return max(1, divisor)

    def is_goal(self, part: Partition) -> bool:
        if len(part) < 2:
            return False
        counts = part.wire_counts()
        if any(cnt > self.topo.max_data_capacity for cnt in counts):
            return False
        return sum(counts) <= self.topo.total_data_capacity


def prune(cand: CutCandidate, g: InteractionGraph, topo: DqcTopology,
          best: tuple | None) -> str | None:
    """Reason the candidate cannot be used, or None to keep it."""
    state = _SearchState(g, topo, reuse_discount=False)
    mask = sum(1 << i for i, flag in enumerate(cand.s) if flag)
    result, reason = state.evaluate(len(cand.s), mask)
    if reason is not None:
        return reason
    cost, part = result
    if best is not None and cost >= best:
        return "cost does not beat the incumbent solution"
    if len(cand.s) == len(g.cuttable) and not state.is_goal(part):
        return "fully decided but not cut into independent fitting sub-circuits"
    return None


def search_min_cost(g: InteractionGraph, topo: DqcTopology, budget: int = DEFAULT_BUDGET,
                    reuse_discount: bool = True) -> CutSolution:
    """Best-first search for the min-cost goal cut vector.

    Raises CutInfeasibleError when the space is exhausted without a goal and
    BudgetExhaustedError when the pop budget runs out first.
    """
    if budget < 1:
        raise ValueError("budget must be at least 1")
    state = _SearchState(g, topo, reuse_discount)
    total = len(state.edge_ids)
    root, reason = state.evaluate(0, 0)
    if reason is not None:
        raise CutInfeasibleError(reason)
    heap: list[tuple[tuple, int, int, int]] = [(root[0], 0, 0, 0)]
    counter = 1
    best_cost: tuple | None = None
    best_mask = 0
    pops = goals = 0
    while heap and pops < budget:
        cost, _, depth, mask = heapq.heappop(heap)
        pops += 1
        if best_cost is not None and cost >= best_cost:
            continue
        if depth == total:
            result, reason = state.evaluate(depth, mask)
            if reason is not None:
                continue
            _, part = result
            if state.is_goal(part):
                goals += 1
                if best_cost is None or cost < best_cost:
                    best_cost, best_mask = cost, mask
            continue
        for bit in (0, 1):
            child_mask = mask | (bit << depth)
            result, reason = state.evaluate(depth + 1, child_mask)
            if reason is not None:
                continue
            child_cost, _ = result
            if best_cost is not None and child_cost >= best_cost:
                continue
            heapq.heappush(heap, (child_cost, counter, depth + 1, child_mask))
            counter += 1
    if best_cost is None:
        if pops >= budget:
            raise BudgetExhaustedError(f"no feasible cut within the budget of {budget} pops")
        raise CutInfeasibleError("no cutting solution splits the circuit into fitting sub-circuits")
    cut_ids = [state.edge_ids[i] for i in range(total) if best_mask >> i & 1]
    return CutSolution(
        graph=g,
        cut_edge_ids=cut_ids,
        cost=best_cost,
        cut_set=make_cut_set(g, cut_ids),
        pops=pops,
        goals_seen=goals,
        budget_exhausted=pops >= budget,
    )


# ---------------------------------------------------------------------------
# Critical-cut filtering
# ---------------------------------------------------------------------------

def cut_marginals(cut_edge_ids, g: InteractionGraph, topo: DqcTopology) -> dict[int, int]:
    """Remote gates removed by each cut alone: estimate with no cuts minus the
    estimate with only that cut applied."""
    estimator = RemoteEstimator(topo)
    base = estimator.estimate(g.cut_edges(set()))
    return {ei: base - estimator.estimate(g.cut_edges({ei})) for ei in cut_edge_ids}


def filter_critical(sol: CutSolution, g: InteractionGraph, topo: DqcTopology):
    """Keep the cuts whose marginal remote-gate removal meets the average.

    One pass, no recomputation after removals; the output is never empty for a
    non-empty input.  Returns (CutSet, marginals by edge id).
    """
    if not sol.cut_edge_ids:
        return make_cut_set(g, []), {}
    removed = cut_marginals(sol.cut_edge_ids, g, topo)
    avg = sum(removed.values()) / len(removed)
    kept = [ei for ei in sol.cut_edge_ids if removed[ei] >= avg]
    return make_cut_set(g, kept), removed
