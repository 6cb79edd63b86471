"""Placement and routing across the QPU chain.

Two initial-placement policies cover different interaction shapes: hotness
placement anchors frequently-interacting qubits on reliable, well-connected
physical qubits; weakness placement splits the qubits into balanced groups
with as few crossing gates as possible and parks the crossing qubits next to
the communication qubits.  Routing executes the front layer, inserting local
SWAPs, opening shared EPR sessions for runs of remote gates, or migrating a
qubit with a remote SWAP, whichever minimizes the nearest-neighbor-cost
heuristic H = NNC(F)/|F| + 0.5 * NNC(E)/|E|.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

from .circuit import Circuit, Gate
from .dqc import DqcTopology, REMOTE_GATE_CNOT_EQUIV, SWAP_CNOT_EQUIV
from .errors import MappingError

EXTENDED_SET_CAP = 8


# ---------------------------------------------------------------------------
# Profiling
# ---------------------------------------------------------------------------

def profile(c: Circuit) -> dict[int, int]:
    """Hotness: per-qubit count of two-qubit gates it participates in."""
    hot = {q: 0 for q in range(c.num_qubits)}
    for g in c.two_qubit_gates():
        for q in g.qubits:
            hot[q] += 1
    return hot


def interaction_counts(c: Circuit) -> dict[frozenset[int], int]:
    counts: dict[frozenset[int], int] = {}
    for g in c.two_qubit_gates():
        key = frozenset(g.qubits)
        counts[key] = counts.get(key, 0) + 1
    return counts


def weakness(groups: list[list[int]], c: Circuit) -> dict[tuple[int, int], float]:
    """1 / (inter-group two-qubit gates) for each group pair; inf when independent."""
    of_group = {}
    for gi, members in enumerate(groups):
        for q in members:
            of_group[q] = gi
    cross: dict[tuple[int, int], int] = {}
    for pair, cnt in interaction_counts(c).items():
        a, b = sorted(pair)
        ga, gb = of_group[a], of_group[b]
        if ga != gb:
            key = (min(ga, gb), max(ga, gb))
            cross[key] = cross.get(key, 0) + cnt
    out = {}
    for gi in range(len(groups)):
        for gj in range(gi + 1, len(groups)):
            n = cross.get((gi, gj), 0)
            out[(gi, gj)] = math.inf if n == 0 else 1.0 / n
    return out


# ---------------------------------------------------------------------------
# Balanced min-crossing partition (weakness grouping, also the remote-gate
# estimator used by the cut search)
# ---------------------------------------------------------------------------

def balanced_sizes(w: int, cap: int) -> list[int]:
    k = max(1, math.ceil(w / cap))
    base, rem = divmod(w, k)
    return [base + 1] * rem + [base] * (k - rem)


def partition_balanced(w: int, edges: list[tuple[int, int]], cap: int) -> list[list[int]]:
    """Split items 0..w-1 into balanced groups of size <= cap, minimizing the
    number of crossing edges.  Exact for two groups up to 16 items, greedy
    seeding plus Kernighan-Lin style refinement otherwise."""
    sizes = balanced_sizes(w, cap)
    if len(sizes) == 1:
        return [list(range(w))]
    if len(sizes) == 2 and w <= 16:
        return _exact_bipartition(w, edges, sizes)
    return _kl_partition(w, edges, sizes)


def crossing_count(groups: list[list[int]], edges: list[tuple[int, int]]) -> int:
    of = {}
    for gi, members in enumerate(groups):
        for x in members:
            of[x] = gi
    return sum(1 for a, b in edges if of[a] != of[b])


def _exact_bipartition(w, edges, sizes):
    best, best_groups = None, None
    pin_first = sizes[0] == sizes[1]
    for combo in itertools.combinations(range(w), sizes[0]):
        if pin_first and 0 not in combo:
            continue
        a = set(combo)
        cost = sum(1 for x, y in edges if (x in a) != (y in a))
        if best is None or cost < best:
            best, best_groups = cost, [sorted(a), sorted(set(range(w)) - a)]
    return best_groups


def _kl_partition(w, edges, sizes):
    adj: dict[int, dict[int, int]] = {i: {} for i in range(w)}
    for a, b in edges:
        adj[a][b] = adj[a].get(b, 0) + 1
        adj[b][a] = adj[b].get(a, 0) + 1
    # BFS seed from the heaviest vertex keeps interacting items together
    order: list[int] = []
    seen: set[int] = set()
    by_weight = sorted(range(w), key=lambda v: (-sum(adj[v].values()), v))
    for start in by_weight:
        if start in seen:
            continue
        frontier = [start]
        seen.add(start)
        while frontier:
            v = frontier.pop(0)
            order.append(v)
            for nb in sorted(adj[v], key=lambda u: (-adj[v][u], u)):
                if nb not in seen:
                    seen.add(nb)
                    frontier.append(nb)
    groups: list[list[int]] = []
    at = 0
    for s in sizes:
        groups.append(order[at:at + s])
        at += s
    of = {}
    for gi, members in enumerate(groups):
        for x in members:
            of[x] = gi

    def gain(x, y):
        # positive = crossings removed by exchanging x and y between groups
        gx, gy = of[x], of[y]
        d = 0
        for nb, cnt in adj[x].items():
            if nb == y:
                continue
            d += cnt if of[nb] == gy else (-cnt if of[nb] == gx else 0)
        for nb, cnt in adj[y].items():
            if nb == x:
                continue
            d += cnt if of[nb] == gx else (-cnt if of[nb] == gy else 0)
        return d

    for _ in range(8):
        best_pair, best_gain = None, 0
        for x in range(w):
            for y in range(x + 1, w):
                if of[x] == of[y]:
                    continue
                g = gain(x, y)
                if g > best_gain:
                    best_gain, best_pair = g, (x, y)
        if best_pair is None:
            break
        x, y = best_pair
        gx, gy = of[x], of[y]
        groups[gx][groups[gx].index(x)] = y
        groups[gy][groups[gy].index(y)] = x
        of[x], of[y] = gy, gx
    return [sorted(g) for g in groups]


# ---------------------------------------------------------------------------
# Initial placement policies
# ---------------------------------------------------------------------------

@dataclass
class MappingState:
    placement: dict[int, tuple[int, int]]  # logical -> (qpu id, phys index)
    topo: DqcTopology
    policy: str = "manual"

    def qpu_of(self, logical: int) -> int:
        return self.placement[logical][0]

    def phys_of(self, logical: int) -> int:
        return self.placement[logical][1]


def _check_capacity(c: Circuit, topo: DqcTopology) -> None:
    if c.num_qubits > topo.total_data_capacity:
        raise MappingError(
            f"{c.num_qubits} logical qubits exceed the total data capacity {topo.total_data_capacity}"
        )


def _seed_score(qpu, phys: int) -> tuple:
    data = set(qpu.data_qubits)
    incident = [nb for nb in qpu.neighbors[phys] if nb in data]
    avg_rel = (
        sum(1.0 - qpu.error(phys, nb) for nb in incident) / len(incident) if incident else 0.0
    )
    return (qpu.data_degree[phys] * avg_rel, -phys)


def hotness_map(c: Circuit, topo: DqcTopology) -> MappingState:
    """Hottest qubits first onto high-degree, reliable physical qubits; their
    partners follow, maximizing path reliability to what is already placed."""
    _check_capacity(c, topo)
    hot = profile(c)
    pairs = interaction_counts(c)
    partners: dict[int, dict[int, int]] = {q: {} for q in range(c.num_qubits)}
    for pair, cnt in pairs.items():
        a, b = sorted(pair)
        partners[a][b] = cnt
        partners[b][a] = cnt
    placement: dict[int, tuple[int, int]] = {}
    free = {qpu.id: set(qpu.data_qubits) for qpu in topo.qpus}

    def place_seed(q: int) -> None:
        qpu_id = max(free, key=lambda i: (len(free[i]), -i))
        qpu = topo.qpu(qpu_id)
        phys = max(free[qpu_id], key=lambda p: _seed_score(qpu, p))
        placement[q] = (qpu_id, phys)
        free[qpu_id].discard(phys)

    def place_partner(q: int, anchor_qpu: int) -> None:
        qpu_id = anchor_qpu
        if not free[qpu_id]:
            candidates = [i for i in free if free[i]]
            qpu_id = min(candidates, key=lambda i: (topo.hops(anchor_qpu, i), i))
        qpu = topo.qpu(qpu_id)
        local_partners = [
            placement[r][1] for r in partners[q] if r in placement and placement[r][0] == qpu_id
        ]

        def score(p):
            rel = sum(qpu.path_reliability[p][r] for r in local_partners)
            return (rel, qpu.data_degree[p], -p)

        phys = max(free[qpu_id], key=score)
        placement[q] = (qpu_id, phys)
        free[qpu_id].discard(phys)

    for q in sorted(range(c.num_qubits), key=lambda q: (-hot[q], q)):
        if q in placement:
            continue
        place_seed(q)
        anchor = placement[q][0]
        for p in sorted(partners[q], key=lambda p: (-partners[q][p], p)):
            if p not in placement:
                place_partner(p, anchor)
    return MappingState(placement, topo, policy="hotness")


def weakness_map(c: Circuit, topo: DqcTopology) -> MappingState:
    """Balanced min-crossing qubit groups, one per QPU, with the qubits that
    carry inter-group gates parked next to the communication qubits."""
    _check_capacity(c, topo)
    cap = topo.max_data_capacity
    edges = []
    for pair, cnt in interaction_counts(c).items():
        a, b = sorted(pair)
        edges.extend([(a, b)] * cnt)
    groups = partition_balanced(c.num_qubits, edges, cap)
    if len(groups) > len(topo.qpus):
        raise MappingError(f"need {len(groups)} QPUs but the chain has {len(topo.qpus)}")
    groups = _order_groups_on_chain(groups, edges)
    of_group = {}
    for gi, members in enumerate(groups):
        for q in members:
            of_group[q] = gi
    cross_weight = {q: 0 for q in range(c.num_qubits)}
    for a, b in edges:
        if of_group[a] != of_group[b]:
            cross_weight[a] += 1
            cross_weight[b] += 1
    hot = profile(c)
    placement: dict[int, tuple[int, int]] = {}
    for gi, members in enumerate(groups):
        qpu = topo.qpu(gi)
        slots = sorted(qpu.data_qubits, key=lambda p: (qpu.comm_distance[p], -qpu.data_degree[p], p))
        order = sorted(members, key=lambda q: (-cross_weight[q], -hot[q], q))
        for q, p in zip(order, slots):
            placement[q] = (gi, p)
    return MappingState(placement, topo, policy="weakness")


def _order_groups_on_chain(groups: list[list[int]], edges) -> list[list[int]]:
    k = len(groups)
    if k <= 2:
        return groups
    of = {}
    for gi, members in enumerate(groups):
        for q in members:
            of[q] = gi
    weight = {}
    for a, b in edges:
        ga, gb = of[a], of[b]
        if ga != gb:
            key = (min(ga, gb), max(ga, gb))
            weight[key] = weight.get(key, 0) + 1
    if k <= 6:
        best, best_perm = None, tuple(range(k))
        for perm in itertools.permutations(range(k)):
            slot = {g: i for i, g in enumerate(perm)}
            cost = sum(w * abs(slot[a] - slot[b]) for (a, b), w in weight.items())
            if best is None or cost < best:
                best, best_perm = cost, perm
        return [groups[g] for g in best_perm]
    return groups


def choose_policy(c: Circuit, topo: DqcTopology) -> MappingState:
    """Dry-route both policies and keep the one consuming fewer EPR pairs."""
    hot = hotness_map(c, topo)
    weak = weakness_map(c, topo)
    hot_routed = route(c, hot, topo)
    weak_routed = route(c, weak, topo)
    if weak_routed.epr_pairs < hot_routed.epr_pairs:
        return weak
    return hot


# ---------------------------------------------------------------------------
# Routing
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RoutedOp:
    kind: str  # gate | swap | remote_gate | remote_swap | epr_open | epr_close
    gate: Gate | None = None
    where: tuple[tuple[int, int], ...] = ()  # (qpu, phys) per operand
    logicals: tuple[int, ...] = ()
    session: int = -1


@dataclass
class RoutedCircuit:
    ops: list[RoutedOp] = field(default_factory=list)
    initial: dict[int, tuple[int, int]] = field(default_factory=dict)
    final: dict[int, tuple[int, int]] = field(default_factory=dict)
    swaps: int = 0
    epr_pairs: int = 0
    remote_swaps: int = 0
    remote_gates: int = 0


@dataclass
class _Session:
    sid: int
    logical: int
    host_qpu: int
    remote_qpu: int


class _Router:
    def __init__(self, c: Circuit, init: MappingState, topo: DqcTopology):
        self.c = c
        self.topo = topo
        self.pos = dict(init.placement)
        self.out = RoutedCircuit(initial=dict(init.placement))
        self.free = {qpu.id: set(qpu.data_qubits) for qpu in topo.qpus}
        for qpu_id, phys in self.pos.values():
            if phys not in self.free[qpu_id]:
                raise MappingError(f"two logical qubits share physical qubit {phys} on QPU {qpu_id}")
            self.free[qpu_id].discard(phys)
        self.executed: set[int] = set()
        self.sessions: dict[int, _Session] = {}  # logical -> session
        self.next_sid = 0
        # per-qubit gate stream: (seq, is_two_qubit, other qubit or -1)
        self.streams: dict[int, list[tuple[int, bool, int]]] = {q: [] for q in range(c.num_qubits)}
        for g in c.gates:
            for q in g.qubits:
                other = g.qubits[1 - g.qubits.index(q)] if g.is_two_qubit else -1
                self.streams[q].append((g.seq, g.is_two_qubit, other))

    # -- session bookkeeping -------------------------------------------------

    def _close_session(self, logical: int) -> None:
        sess = self.sessions.pop(logical, None)
        if sess is not None:
            self.out.ops.append(RoutedOp("epr_close", logicals=(logical,), session=sess.sid))

    def _open_session(self, logical: int, remote_qpu: int) -> _Session:
        self._close_session(logical)
        host = self.pos[logical][0]
        # each end binds one comm qubit; evict the oldest session when full
        for qpu_id in (host, remote_qpu):
            cap = len(self.topo.qpu(qpu_id).comm)
            while True:
                involved = [s for s in self.sessions.values() if qpu_id in (s.host_qpu, s.remote_qpu)]
                if len(involved) < cap:
                    break
                self._close_session(min(involved, key=lambda s: s.sid).logical)
        sess = _Session(self.next_sid, logical, host, remote_qpu)
        self.next_sid += 1
        self.sessions[logical] = sess
        self.out.epr_pairs += self.topo.hops(host, remote_qpu)
        self.out.ops.append(RoutedOp("epr_open", logicals=(logical,), session=sess.sid))
        return sess

    def _session_for(self, g: Gate) -> _Session | None:
        a, b = g.qubits
        qa, qb = self.pos[a][0], self.pos[b][0]
        sa = self.sessions.get(a)
        if sa is not None and sa.host_qpu == qa and sa.remote_qpu == qb:
            return sa
        sb = self.sessions.get(b)
        if sb is not None and sb.host_qpu == qb and sb.remote_qpu == qa:
            return sb
        return None

    # -- gate emission ---------------------------------------------------------

    def _emit_gate(self, g: Gate) -> None:
        where = tuple(self.pos[q] for q in g.qubits)
        if not g.is_two_qubit:
            self._close_session(g.qubits[0])
            self.out.ops.append(RoutedOp("gate", g, where, g.qubits))
        else:
            a, b = g.qubits
            if self.pos[a][0] == self.pos[b][0]:
                for q in g.qubits:
                    self._close_session(q)
                self.out.ops.append(RoutedOp("gate", g, where, g.qubits))
            else:
                sess = self._session_for(g)
                if sess is None:
                    sess = self._open_session(a, self.pos[b][0])
                for q in g.qubits:
                    s = self.sessions.get(q)
                    if s is not None and s.sid != sess.sid:
                        self._close_session(q)
                self.out.ops.append(RoutedOp("remote_gate", g, where, g.qubits, session=sess.sid))
                self.out.remote_gates += 1
        self.executed.add(g.seq)

    def _executable(self, g: Gate) -> bool:
        if not g.is_two_qubit:
            return True
        a, b = g.qubits
        (qa, pa), (qb, pb) = self.pos[a], self.pos[b]
        if qa == qb:
            return frozenset((pa, pb)) in self.topo.qpu(qa).coupling
        return self._session_for(g) is not None

    # -- heuristic -------------------------------------------------------------

    def _front(self) -> list[Gate]:
        return self.c.front_layer(self.executed)

    def _extended(self, front: list[Gate]) -> list[Gate]:
        front_seqs = {g.seq for g in front}
        chosen: dict[int, Gate] = {}
        for q in range(self.c.num_qubits):
            run = 0
            for seq, is2q, _ in self.streams[q]:
                if seq in self.executed:
                    continue
                if not is2q:
                    continue  # lookahead ignores single-qubit gates
                if seq not in front_seqs and seq not in chosen:
                    chosen[seq] = self.c.gates[seq]
                run += 1
                if run >= EXTENDED_SET_CAP:
                    break
        return [chosen[s] for s in sorted(chosen)]

    def _session_coverage(self, pos, sessions) -> set[int]:
        """Gate seqs an open session can still execute for free: the holder's
        current run of consecutive unexecuted remote gates toward the session's
        partner, with any other gate on the holder breaking coherence."""
        covered: set[int] = set()
        for logical, sess in sessions.items():
            if pos[logical][0] != sess.host_qpu:
                continue
            for seq, is2q, other in self.streams[logical]:
                if seq in self.executed:
                    continue
                if not is2q or pos[other][0] != sess.remote_qpu:
                    break
                covered.add(seq)
        return covered

    def _nnc(self, gate_set: list[Gate], pos, sessions) -> float:
        total = 0.0
        remote: dict[int, Gate] = {}
        for g in gate_set:
            a, b = g.qubits
            (qa, pa), (qb, pb) = pos[a], pos[b]
            if qa == qb:
                total += SWAP_CNOT_EQUIV * (self.topo.qpu(qa).distance[pa][pb] - 1)
            else:
                remote[g.seq] = g
        if not remote:
            return total
        covered = self._session_coverage(pos, sessions) & set(remote)
        # uncovered remote gates sharing a qubit back-to-back would share one
        # future EPR pair, so a maximal run is charged once
        for q in sorted({q for g in remote.values() for q in g.qubits}):
            run: list[int] = []
            partner = None
            for seq, is2q, other in self.streams[q]:
                if seq in self.executed:
                    continue
                if not is2q or seq not in remote or seq in covered:
                    break
                pq = pos[other][0]
                if pos[q][0] == pq:
                    break
                if partner is None:
                    partner = pq
                elif pq != partner:
                    break
                run.append(seq)
            if len(run) >= 2:
                covered.update(run)
                total += REMOTE_GATE_CNOT_EQUIV * self.topo.hops(pos[q][0], partner)
        for seq, g in remote.items():
            if seq in covered:
                continue
            a, b = g.qubits
            total += REMOTE_GATE_CNOT_EQUIV * self.topo.hops(pos[a][0], pos[b][0])
        return total

    def _score(self, pos, sessions, front, extended) -> float:
        h = self._nnc(front, pos, sessions) / max(1, len(front))
        if extended:
            h += 0.5 * self._nnc(extended, pos, sessions) / len(extended)
        return h

    # -- blocked-step actions ----------------------------------------------------

    def _candidate_actions(self, front: list[Gate]):
        actions = []
        seen = set()
        for g in front:
            if not g.is_two_qubit:
                continue
            a, b = g.qubits
            (qa, pa), (qb, pb) = self.pos[a], self.pos[b]
            if qa == qb:
                qpu = self.topo.qpu(qa)
                data = set(qpu.data_qubits)
                for p in (pa, pb):
                    for nb in qpu.neighbors[p]:
                        if nb not in data:
                            continue
                        key = ("swap", qa, min(p, nb), max(p, nb))
                        if key not in seen:
                            seen.add(key)
                            actions.append(key)
            else:
                for x, target in ((a, qb), (b, qa)):
                    key = ("open", x, target)
                    if key not in seen:
                        seen.add(key)
                        actions.append(key)
                    here = self.pos[x][0]
                    step = here + (1 if target > here else -1)
                    if self.free[step]:
                        key = ("rswap", x, step)
                        if key not in seen:
                            seen.add(key)
                            actions.append(key)
        return actions

    def _hypothetical(self, action):
        pos = dict(self.pos)
        sessions = dict(self.sessions)
        kind = action[0]
        if kind == "swap":
            _, qpu_id, p1, p2 = action
            l1 = next((l for l, v in pos.items() if v == (qpu_id, p1)), None)
            l2 = next((l for l, v in pos.items() if v == (qpu_id, p2)), None)
            if l1 is not None:
                pos[l1] = (qpu_id, p2)
                sessions.pop(l1, None)
            if l2 is not None:
                pos[l2] = (qpu_id, p1)
                sessions.pop(l2, None)
        elif kind == "rswap":
            _, logical, qpu_id = action
            slots = sorted(self.free[qpu_id])
            pos[logical] = (qpu_id, slots[0])
            sessions.pop(logical, None)
        else:
            _, logical, target = action
            sessions = dict(sessions)
            sessions[logical] = _Session(-1, logical, pos[logical][0], target)
        return pos, sessions

    def _apply(self, action) -> None:
        kind = action[0]
        if kind == "swap":
            _, qpu_id, p1, p2 = action
            l1 = next((l for l, v in self.pos.items() if v == (qpu_id, p1)), None)
            l2 = next((l for l, v in self.pos.items() if v == (qpu_id, p2)), None)
            for l in (l1, l2):
                if l is not None:
                    self._close_session(l)
            if l1 is not None:
                self.pos[l1] = (qpu_id, p2)
            if l2 is not None:
                self.pos[l2] = (qpu_id, p1)
            if l1 is None:  # p1 was empty; l2 moved into it
                self.free[qpu_id].discard(p1)
                self.free[qpu_id].add(p2)
            if l2 is None:  # p2 was empty; l1 moved into it
                self.free[qpu_id].discard(p2)
                self.free[qpu_id].add(p1)
            self.out.swaps += 1
            self.out.ops.append(
                RoutedOp("swap", None, ((qpu_id, p1), (qpu_id, p2)),
                         tuple(l for l in (l1, l2) if l is not None))
            )
        elif kind == "rswap":
            _, logical, qpu_id = action
            self._close_session(logical)
            old_qpu, old_phys = self.pos[logical]
            new_phys = sorted(self.free[qpu_id])[0]
            self.free[qpu_id].discard(new_phys)
            self.free[old_qpu].add(old_phys)
            self.pos[logical] = (qpu_id, new_phys)
            self.out.remote_swaps += 1
            self.out.epr_pairs += self.topo.hops(old_qpu, qpu_id)
            self.out.ops.append(
                RoutedOp("remote_swap", None, ((old_qpu, old_phys), (qpu_id, new_phys)), (logical,))
            )
        else:
            _, logical, target = action
            self._open_session(logical, target)

    # -- main loop -----------------------------------------------------------------

    def run(self) -> RoutedCircuit:
        total_phys = sum(qpu.num_qubits for qpu in self.topo.qpus)
        stall_limit = 3 * total_phys
        best_h = math.inf
        stall = 0
        while len(self.executed) < len(self.c.gates):
            progress = False
            for g in self._front():
                if self._executable(g):
                    self._emit_gate(g)
                    progress = True
            if progress:
                best_h = math.inf
                stall = 0
                continue
            front = self._front()
            extended = self._extended(front)
            actions = self._candidate_actions(front)
            if not actions:
                raise MappingError("router is blocked with no candidate actions")
            rank = {"swap": 0, "open": 1, "rswap": 2}
            scored = []
            for act in actions:
                pos, sessions = self._hypothetical(act)
                scored.append((self._score(pos, sessions, front, extended), rank[act[0]], act))
            scored.sort(key=lambda t: (t[0], t[1], t[2]))
            h, _, action = scored[0]
            if h < best_h - 1e-9:
                best_h = h
                stall = 0
            else:
                stall += 1
            if stall > stall_limit:
                action = self._fallback_action(front)
                stall = 0
            self._apply(action)
        self.out.final = dict(self.pos)
        return self.out

    def _fallback_action(self, front: list[Gate]):
        """Anti-oscillation: force the step that shrinks the first gate's distance."""
        for g in front:
            if not g.is_two_qubit:
                continue
            a, b = g.qubits
            (qa, pa), (qb, pb) = self.pos[a], self.pos[b]
            if qa != qb:
                return ("open", a, qb)
            qpu = self.topo.qpu(qa)
            data = set(qpu.data_qubits)
            best = None
            for nb in qpu.neighbors[pa]:
                if nb not in data:
                    continue
                d = qpu.distance[nb][pb]
                if best is None or d < best[0]:
                    best = (d, ("swap", qa, min(pa, nb), max(pa, nb)))
            if best is not None:
                return best[1]
        raise MappingError("router livelock with no distance-reducing SWAP")


def route(c: Circuit, init: MappingState, topo: DqcTopology) -> RoutedCircuit:
    """Insert SWAPs and EPR sessions until every gate is executable, emitting
    the hardware-compliant operation stream."""
    return _Router(c, init, topo).run()


_DURATION = {
    "gate": 1,
    "swap": SWAP_CNOT_EQUIV,
    "remote_gate": REMOTE_GATE_CNOT_EQUIV,
    "remote_swap": REMOTE_GATE_CNOT_EQUIV + 2,
}


def routed_to_dict(r: RoutedCircuit) -> dict:
    """JSON-ready routed stream: gates with physical operands, SWAP and remote
    annotations, EPR session ids, and the metrics block."""
    ops = []
    for op in r.ops:
        entry = {"kind": op.kind, "logicals": list(op.logicals),
                 "where": [list(w) for w in op.where]}
        if op.gate is not None:
            entry["gate"] = op.gate.kind.value
            if op.gate.params:
                entry["params"] = list(op.gate.params)
        if op.session >= 0:
            entry["session"] = op.session
        ops.append(entry)
    return {
        "initial": {str(k): list(v) for k, v in r.initial.items()},
        "final": {str(k): list(v) for k, v in r.final.items()},
        "ops": ops,
        "metrics": metrics(r),
    }


def metrics(r: RoutedCircuit) -> dict[str, int]:
    """SWAP, EPR, and CNOT-equivalent depth counters of a routed circuit."""
    frontier: dict[tuple[int, int], int] = {}
    depth = 0
    for op in r.ops:
        dur = _DURATION.get(op.kind)
        if dur is None:
            continue
        start = max((frontier.get(w, 0) for w in op.where), default=0)
        end = start + dur
        for w in op.where:
            frontier[w] = end
        depth = max(depth, end)
    return {
        "swaps": r.swaps,
        "epr_pairs": r.epr_pairs,
        "remote_swaps": r.remote_swaps,
        "remote_gates": r.remote_gates,
        "depth": depth,
    }
