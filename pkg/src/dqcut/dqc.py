"""Model of the distributed system: a 1D chain of QPUs.

Each QPU reserves communication qubits for EPR generation; logical qubits map
onto the remaining data qubits only.  EPR pairs form between neighboring QPUs'
communication qubits; a pair between QPUs d hops apart costs d link uses
(entanglement swapping along the chain).
"""
from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from functools import cached_property

from .errors import TopologyError

DEFAULT_CNOT_ERROR = 0.01
DEFAULT_COMM_COUNT = 2

REMOTE_GATE_CNOT_EQUIV = 25
SWAP_CNOT_EQUIV = 3

DATA = "data"
COMM = "comm"


@dataclass(frozen=True)
class PhysQubit:
    qpu: int
    index: int
    role: str


@dataclass
class Qpu:
    id: int
    num_qubits: int
    coupling: frozenset[frozenset[int]]
    comm: tuple[int, ...]
    cnot_error: dict[frozenset[int], float]

    def __post_init__(self):
        for pair in self.coupling:
            for q in pair:
                if not 0 <= q < self.num_qubits:
                    raise TopologyError(f"qpu {self.id}: coupling references qubit {q} out of range")
        for q in self.comm:
            if not 0 <= q < self.num_qubits:
                raise TopologyError(f"qpu {self.id}: comm qubit {q} out of range")
        for pair, p in self.cnot_error.items():
            if not 0.0 <= p < 1.0:
                raise TopologyError(f"qpu {self.id}: cnot_error for {sorted(pair)} must be in [0,1)")
        if not self._connected(set(range(self.num_qubits))):
            raise TopologyError(f"qpu {self.id}: coupling graph is not connected")
        if len(self.data_qubits) < 1:
            raise TopologyError(f"qpu {self.id}: no data qubits left after reserving comm qubits")
        if not self._connected(set(self.data_qubits)):
            raise TopologyError(f"qpu {self.id}: data qubits do not form a connected subgraph")

    @cached_property
    def data_qubits(self) -> list[int]:
        return [q for q in range(self.num_qubits) if q not in self.comm]

    @cached_property
    def neighbors(self) -> dict[int, list[int]]:
        adj: dict[int, list[int]] = {q: [] for q in range(self.num_qubits)}
        for pair in self.coupling:
            a, b = sorted(pair)
            adj[a].append(b)
            adj[b].append(a)
        return {q: sorted(v) for q, v in adj.items()}

    @cached_property
    def data_degree(self) -> dict[int, int]:
        data = set(self.data_qubits)
        return {q: sum(1 for nb in self.neighbors[q] if nb in data) for q in self.data_qubits}

    def error(self, a: int, b: int) -> float:
        return self.cnot_error.get(frozenset((a, b)), DEFAULT_CNOT_ERROR)

    @cached_property
    def distance(self) -> dict[int, dict[int, int]]:
        """All-pairs hop distances over the full coupling graph."""
        return {q: self._bfs(q) for q in range(self.num_qubits)}

    @cached_property
    def path_reliability(self) -> dict[int, dict[int, float]]:
        """Max product of (1 - cnot_error) along a path, all pairs (Dijkstra in -log space)."""
        import heapq

        out = {}
        for src in range(self.num_qubits):
            dist = {src: 0.0}
            heap = [(0.0, src)]
            while heap:
                d, v = heapq.heappop(heap)
                if d > dist.get(v, math.inf):
                    continue
                for nb in self.neighbors[v]:
                    nd = d - math.log(max(1e-12, 1.0 - self.error(v, nb)))
                    if nd < dist.get(nb, math.inf) - 1e-15:
                        dist[nb] = nd
                        heapq.heappush(heap, (nd, nb))
            out[src] = {q: math.exp(-d) for q, d in dist.items()}
        return out

    @cached_property
    def comm_distance(self) -> dict[int, int]:
        """Hops from each qubit to the nearest comm qubit."""
        return {
            q: min(self.distance[q][cq] for cq in self.comm) if self.comm else 0
            for q in range(self.num_qubits)
        }

    def _bfs(self, src: int) -> dict[int, int]:
        dist = {src: 0}
        frontier = [src]
        while frontier:
            nxt = []
            for v in frontier:
                for nb in self.neighbors[v]:
                    if nb not in dist:
                        dist[nb] = dist[v] + 1
                        nxt.append(nb)
            frontier = nxt
        return dist

    def _connected(self, subset: set[int]) -> bool:
        if not subset:
            return False
        start = next(iter(subset))
        seen = {start}
        stack = [start]
        while stack:
            v = stack.pop()
            for nb in self.neighbors[v]:
                if nb in subset and nb not in seen:
                    seen.add(nb)
                    stack.append(nb)
        return seen == subset


@dataclass
class DqcTopology:
    qpus: list[Qpu]
    name: str = "custom"

    def __post_init__(self):
        if not self.qpus:
            raise TopologyError("topology needs at least one QPU")

    def data_capacity(self) -> dict[int, int]:
        return {qpu.id: len(qpu.data_qubits) for qpu in self.qpus}

    @property
    def max_data_capacity(self) -> int:
        return max(len(qpu.data_qubits) for qpu in self.qpus)

    @property
    def total_data_capacity(self) -> int:
        return sum(len(qpu.data_qubits) for qpu in self.qpus)

    def hops(self, a: int, b: int) -> int:
        """Chain distance between QPU ids; EPR cost scales with it."""
        return abs(a - b)

    def qpu(self, qpu_id: int) -> Qpu:
        return self.qpus[qpu_id]


# ---------------------------------------------------------------------------
# Chip presets (coupling maps of the modeled IBM devices; comm qubits are the
# two lowest-degree qubits that leave the data subgraph connected)
# ---------------------------------------------------------------------------

_LINE5 = [(i, i + 1) for i in range(4)]
_NAIROBI = [(0, 1), (1, 2), (1, 3), (3, 5), (4, 5), (5, 6)]
_MELBOURNE = (
    [(i, i + 1) for i in range(6)]
    + [(7, 8), (8, 9), (9, 10), (10, 11), (11, 12), (12, 13), (13, 14)]
    + [(0, 14), (1, 13), (2, 12), (3, 11), (4, 10), (5, 9), (6, 8)]
)
_TORONTO = [
    (0, 1), (1, 2), (1, 4), (2, 3), (3, 5), (4, 7), (5, 8), (6, 7), (7, 10),
    (8, 9), (8, 11), (10, 12), (11, 14), (12, 13), (12, 15), (13, 14), (14, 16),
    (15, 18), (16, 19), (17, 18), (18, 21), (19, 20), (19, 22), (21, 23),
    (22, 25), (23, 24), (24, 25), (25, 26),
]


def _brick_lattice(n: int, row_len: int = 12) -> list[tuple[int, int]]:
    """Heavy-hex style lattice with exactly n qubits: full rows of row_len
    linked by sparse connector qubits every fourth column."""
    edges: list[tuple[int, int]] = []
    rows: list[list[int]] = []
    next_q = 0
    row_parity = 0
    while next_q < n:
        row = []
        for _ in range(min(row_len, n - next_q)):
            row.append(next_q)
            next_q += 1
        for a, b in zip(row, row[1:]):
            edges.append((a, b))
        if rows:
            above = rows[-1]
            cols = range(2 * row_parity, min(len(above), len(row)), 4)
            for col in cols:
                if next_q >= n:
                    break
                conn = next_q
                next_q += 1
                edges.append((above[col], conn))
                edges.append((conn, row[col]))
            row_parity ^= 1
        rows.append(row)
    if len(rows) == 1 and not edges and n == 1:
        return []
    # if truncation stranded the last row without a connector, bolt it on
    if len(rows) > 1:
        seen = set()
        for a, b in edges:
            seen.add(a)
            seen.add(b)
        comp = _reachable(0, edges, n)
        if len(comp) != n:
            for q in range(n):
                if q not in comp:
                    edges.append((q - 1, q))
                    comp = _reachable(0, edges, n)
    return edges


def _reachable(start: int, edges: list[tuple[int, int]], n: int) -> set[int]:
    adj: dict[int, list[int]] = {i: [] for i in range(n)}
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    seen = {start}
    stack = [start]
    while stack:
        v = stack.pop()
        for nb in adj[v]:
            if nb not in seen:
                seen.add(nb)
                stack.append(nb)
    return seen


CHIPS: dict[str, tuple[int, list[tuple[int, int]]]] = {
    "manila": (5, _LINE5),
    "yorktown": (5, [(0, 1), (0, 2), (1, 2), (2, 3), (2, 4), (3, 4)]),
    "nairobi": (7, _NAIROBI),
    "melbourne": (15, _MELBOURNE),
    "toronto": (27, _TORONTO),
    "manhattan": (65, _brick_lattice(65)),
    "washington": (127, _brick_lattice(127)),
}

PRESET_QPU_COUNT = 20


def _pick_comm(num_qubits: int, coupling: list[tuple[int, int]], count: int) -> tuple[int, ...]:
    adj: dict[int, set[int]] = {q: set() for q in range(num_qubits)}
    for a, b in coupling:
        adj[a].add(b)
        adj[b].add(a)
    order = sorted(range(num_qubits), key=lambda q: (len(adj[q]), q))
    import itertools

    for combo in itertools.combinations(order, count):
        remaining = set(range(num_qubits)) - set(combo)
        if remaining and _connected_subset(remaining, adj):
            return tuple(sorted(combo))
    raise TopologyError("cannot reserve comm qubits without disconnecting the data qubits")


def _connected_subset(subset: set[int], adj: dict[int, set[int]]) -> bool:
    start = next(iter(subset))
    seen = {start}
    stack = [start]
    while stack:
        v = stack.pop()
        for nb in adj[v]:
            if nb in subset and nb not in seen:
                seen.add(nb)
                stack.append(nb)
    return seen == subset


def make_qpu(qpu_id: int, num_qubits: int, coupling: list[tuple[int, int]],
             comm: tuple[int, ...] | None = None, cnot_error: dict | None = None,
             comm_count: int = DEFAULT_COMM_COUNT) -> Qpu:
    if comm is None:
        comm = _pick_comm(num_qubits, coupling, comm_count)
    errors = {}
    for key, p in (cnot_error or {}).items():
        if isinstance(key, str):
            a, b = key.split("-")
            key = frozenset((int(a), int(b)))
        errors[frozenset(key)] = float(p)
    return Qpu(
        id=qpu_id,
        num_qubits=num_qubits,
        coupling=frozenset(frozenset(p) for p in coupling),
        comm=tuple(comm),
        cnot_error=errors,
    )


def preset(name: str) -> DqcTopology:
    """Build a preset topology, e.g. 'manila-x20' for 20 chained Manila QPUs."""
    base, _, count_part = name.partition("-x")
    base = base.lower()
    if base not in CHIPS:
        raise TopologyError(f"unknown chip preset {base!r}; choose from {sorted(CHIPS)}")
    count = PRESET_QPU_COUNT
    if count_part:
        try:
            count = int(count_part)
        except ValueError:
            raise TopologyError(f"bad QPU count in preset name {name!r}") from None
    if count < 1:
        raise TopologyError("preset needs at least one QPU")
    num_qubits, coupling = CHIPS[base]
    qpus = [make_qpu(i, num_qubits, coupling) for i in range(count)]
    return DqcTopology(qpus, name=name)


def load_topology(source) -> DqcTopology:
    """Load a topology from a preset name, JSON text, a path, or a dict."""
    if isinstance(source, DqcTopology):
        return source
    if isinstance(source, dict):
        return _from_dict(source, "custom")
    text = str(source)
    if os.path.exists(text):
        with open(text, encoding="utf-8") as fh:
            return _from_dict(json.load(fh), os.path.basename(text))
    stripped = text.strip()
    if stripped.startswith("{"):
        return _from_dict(json.loads(stripped), "custom")
    return preset(stripped)


def _from_dict(data: dict, name: str) -> DqcTopology:
    if "qpus" not in data or not isinstance(data["qpus"], list) or not data["qpus"]:
        raise TopologyError("field 'qpus' must be a non-empty list")
    qpus = []
    for i, entry in enumerate(data["qpus"]):
        if "coupling" not in entry:
            raise TopologyError(f"qpus[{i}]: missing field 'coupling'")
        coupling = [tuple(pair) for pair in entry["coupling"]]
        num_qubits = entry.get("num_qubits", 1 + max(max(p) for p in coupling))
        comm = tuple(entry["comm"]) if "comm" in entry else None
        qpu_id = entry.get("id", i)
        if qpu_id != i:
            raise TopologyError(f"qpus[{i}]: field 'id' must equal the list position {i}")
        qpus.append(make_qpu(qpu_id, num_qubits, coupling, comm, entry.get("cnot_error")))
    return DqcTopology(qpus, name=name)
