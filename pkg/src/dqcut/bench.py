"""Built-in benchmark circuit generators.

Every generator is deterministic given its arguments; the ones with random
structure (bv with a random secret, hwea, spm, random) take a seed.
"""
from __future__ import annotations

import math
import random

from .circuit import Circuit


def ghz(n: int) -> Circuit:
    """GHZ state: H on qubit 0 followed by a CX chain."""
    c = Circuit(n)
    c.h(0)
    for i in range(n - 1):
        c.cx(i, i + 1)
    return c


def lc(n: int) -> Circuit:
    """Linear cluster state: H everywhere, CZ between neighbors."""
    c = Circuit(n)
    for q in range(n):
        c.h(q)
    for i in range(n - 1):
        c.cz(i, i + 1)
    return c


def bv(n: int, secret: str | None = None, seed: int | None = None) -> Circuit:
    """Bernstein-Vazirani over n-1 input qubits with the last qubit as ancilla.

    The hidden string defaults to all ones, the densest (hardest-to-cut)
    instance; pass ``secret`` explicitly or a seed for a random string. A final
    H layer brings every qubit back to the computational basis so the all-Z
    observable is deterministic.
    """
    if n < 2:
        raise ValueError("bv needs at least 2 qubits")
    m = n - 1
    if secret is None:
        secret = "1" * m if seed is None else "".join(random.Random(seed).choice("01") for _ in range(m))
    if len(secret) != m or set(secret) - {"0", "1"}:
        raise ValueError(f"secret must be a {m}-bit string")
    c = Circuit(n)
    for q in range(m):
        c.h(q)
    c.x(m)
    c.h(m)
    for q in range(m):
        if secret[q] == "1":
            c.cx(q, m)
    for q in range(m):
        c.h(q)
    c.h(m)
    return c


def qft(n: int) -> Circuit:
    """Quantum Fourier transform in the swap-free form (no final reversal)."""
    c = Circuit(n)
    for target in range(n):
        c.h(target)
        for k, ctrl in enumerate(range(target + 1, n), start=1):
            c.cp(ctrl, target, math.pi / 2**k)
    return c


def rca(n: int) -> Circuit:
    """Ripple-carry adder; n = 3m+1 qubits for m bit positions.

    Layout: q0 is the carry-in; bit i uses (a, b, carry-out) =
    (q[3i+1], q[3i+2], q[3i+3]).  The AND producing each carry is realized
    with the three-CX relative-phase Toffoli, which keeps the gate set to
    one- and two-qubit gates.
    """
    if n < 4 or n % 3 != 1:
        raise ValueError("rca needs n = 3m+1 qubits with m >= 1")
    m = (n - 1) // 3
    c = Circuit(n)
    theta = math.pi / 4
    for i in range(m):
        a, b, cout = 3 * i + 1, 3 * i + 2, 3 * i + 3
        cin = 3 * i
        # relative-phase Toffoli computing carry = a AND b into cout
        c.ry(cout, theta)
        c.cx(b, cout)
        c.ry(cout, theta)
        c.cx(a, cout)
        c.ry(cout, -theta)
        c.cx(b, cout)
        c.ry(cout, -theta)
        c.cx(a, b)
        c.cx(cin, b)
    return c


def hwea(n: int, layers: int = 1, seed: int = 11) -> Circuit:
    """Hardware-efficient ansatz: rotation layers with arbitrary seeded angles
    separated by CX entangler chains."""
    rng = random.Random(seed)
    c = Circuit(n)
    for _ in range(layers):
        for q in range(n):
            c.ry(q, rng.uniform(0, 2 * math.pi))
            c.rz(q, rng.uniform(0, 2 * math.pi))
        for q in range(n - 1):
            c.cx(q, q + 1)
    for q in range(n):
        c.ry(q, rng.uniform(0, 2 * math.pi))
    return c


def spm(n: int, layers: int = 8, seed: int = 11) -> Circuit:
    """Supremacy-style random circuit on a 2^k x 2^k grid (n must be 4^k).

    Layers alternate seeded single-qubit gates with CZ on a rotating subset of
    grid edges, mimicking the dense low-depth interaction pattern of random
    sampling circuits.
    """
    k = round(math.log(n, 4))
    if 4**k != n:
        raise ValueError("spm needs a qubit count of 4^k")
    side = 2**k
    rng = random.Random(seed)
    c = Circuit(n)

    def idx(r, col):
        return r * side + col

    one_qubit = ("t", "h", "s")
    for q in range(n):
        c.h(q)
    for layer in range(layers):
        for q in range(n):
            getattr(c, rng.choice(one_qubit))(q)
        horizontal = layer % 2 == 0
        offset = (layer // 2) % 2
        for r in range(side):
            for col in range(side):
                if horizontal and col + 1 < side and col % 2 == offset:
                    c.cz(idx(r, col), idx(r, col + 1))
                elif not horizontal and r + 1 < side and r % 2 == offset:
                    c.cz(idx(r, col), idx(r + 1, col))
    return c


def random_circuit(n: int, depth: int, seed: int, two_qubit_prob: float = 0.5) -> Circuit:
    """Seeded random circuit used by routing and reconstruction property tests."""
    rng = random.Random(seed)
    c = Circuit(n)
    one_q = ("h", "s", "t", "x")
    for _ in range(depth):
        for q in range(n):
            if rng.random() < 0.5:
                getattr(c, rng.choice(one_q))(q)
            else:
                c.rz(q, rng.uniform(0, 2 * math.pi))
        pairs = list(range(n))
        rng.shuffle(pairs)
        for a, b in zip(pairs[::2], pairs[1::2]):
            if rng.random() < two_qubit_prob:
                c.cx(a, b) if rng.random() < 0.5 else c.cz(a, b)
    return c


GENERATORS = {
    "ghz": ghz,
    "lc": lc,
    "bv": bv,
    "qft": qft,
    "rca": rca,
    "hwea": hwea,
    "spm": spm,
}


def make(name: str, n: int, seed: int | None = None) -> Circuit:
    """Instantiate a named benchmark; seed is forwarded where it matters."""
    name = name.lower()
    if name not in GENERATORS:
        raise ValueError(f"unknown benchmark {name!r}; choose from {sorted(GENERATORS)}")
    gen = GENERATORS[name]
    if name in ("hwea", "spm"):
        return gen(n, seed=seed) if seed is not None else gen(n)
    return gen(n)
