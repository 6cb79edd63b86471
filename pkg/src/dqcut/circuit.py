"""Gate-list circuit IR, an OpenQASM 2 subset parser, and dependency helpers.

Conventions used throughout the toolkit:
  - qubits are integer wire indices 0..num_qubits-1
  - gate ``seq`` is the program-order index, strictly increasing
  - MEASURE is a sign-folded projective Z measurement and PREPARE initializes a
    fresh wire; both appear only in generated cut variants, never in user input
"""
from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass

from .errors import QasmError

ANGLE_TOL = 1e-9

# PREPARE target states, encoded as the single gate parameter.
PREP_ZERO, PREP_ONE, PREP_PLUS, PREP_IPLUS = 0, 1, 2, 3
PREP_NAMES = {PREP_ZERO: "zero", PREP_ONE: "one", PREP_PLUS: "plus", PREP_IPLUS: "iplus"}


class GateKind(enum.Enum):
    H = "h"
    X = "x"
    Y = "y"
    Z = "z"
    S = "s"
    SDG = "sdg"
    T = "t"
    TDG = "tdg"
    RX = "rx"
    RY = "ry"
    RZ = "rz"
    RZZ = "rzz"
    CX = "cx"
    CZ = "cz"
    CP = "cp"
    SWAP = "swap"
    MEASURE = "measure"
    PREPARE = "prepare"

    @property
    def num_qubits(self) -> int:
        return 2 if self in _TWO_QUBIT else 1

    @property
    def num_params(self) -> int:
        return _PARAM_COUNT.get(self, 0)

    @property
    def symmetric(self) -> bool:
        """True for two-qubit kinds whose operands are interchangeable."""
        return self in (GateKind.CZ, GateKind.CP, GateKind.RZZ, GateKind.SWAP)


_TWO_QUBIT = frozenset({GateKind.RZZ, GateKind.CX, GateKind.CZ, GateKind.CP, GateKind.SWAP})
_PARAM_COUNT = {
    GateKind.RX: 1,
    GateKind.RY: 1,
    GateKind.RZ: 1,
    GateKind.RZZ: 1,
    GateKind.CP: 1,
    GateKind.PREPARE: 1,
}


@dataclass(frozen=True)
class Gate:
    kind: GateKind
    qubits: tuple[int, ...]
    params: tuple[float, ...] = ()
    seq: int = -1

    def __post_init__(self):
        if len(self.qubits) != self.kind.num_qubits:
            raise ValueError(f"{self.kind.value} expects {self.kind.num_qubits} qubits, got {self.qubits}")
        if self.kind.num_qubits == 2 and self.qubits[0] == self.qubits[1]:
            raise ValueError(f"{self.kind.value} operands must be distinct, got {self.qubits}")
        if len(self.params) != self.kind.num_params:
            raise ValueError(f"{self.kind.value} expects {self.kind.num_params} params, got {self.params}")

    @property
    def is_two_qubit(self) -> bool:
        return self.kind.num_qubits == 2


class Circuit:
    """Ordered gate list over a fixed number of qubit wires."""

    def __init__(self, num_qubits: int, observable: str | None = None):
        if num_qubits < 1:
            raise ValueError("circuit needs at least one qubit")
        self.num_qubits = num_qubits
        self.gates: list[Gate] = []
        self.observable = observable

    # -- construction -----------------------------------------------------

    def add(self, kind: GateKind, qubits: tuple[int, ...], params: tuple[float, ...] = ()) -> "Circuit":
        for q in qubits:
            if not 0 <= q < self.num_qubits:
                raise ValueError(f"qubit {q} out of range for {self.num_qubits}-qubit circuit")
        self.gates.append(Gate(kind, tuple(qubits), tuple(float(p) for p in params), seq=len(self.gates)))
        return self

    def h(self, q):
        return self.add(GateKind.H, (q,))

    def x(self, q):
        return self.add(GateKind.X, (q,))

    def y(self, q):
        return self.add(GateKind.Y, (q,))

    def z(self, q):
        return self.add(GateKind.Z, (q,))

    def s(self, q):
        return self.add(GateKind.S, (q,))

    def sdg(self, q):
        return self.add(GateKind.SDG, (q,))

    def t(self, q):
        return self.add(GateKind.T, (q,))

    def tdg(self, q):
        return self.add(GateKind.TDG, (q,))

    def rx(self, q, theta):
        return self.add(GateKind.RX, (q,), (theta,))

    def ry(self, q, theta):
        return self.add(GateKind.RY, (q,), (theta,))

    def rz(self, q, theta):
        return self.add(GateKind.RZ, (q,), (theta,))

    def rzz(self, a, b, theta):
        return self.add(GateKind.RZZ, (a, b), (theta,))

    def cx(self, c, t):
        return self.add(GateKind.CX, (c, t))

    def cz(self, a, b):
        return self.add(GateKind.CZ, (a, b))

    def cp(self, a, b, lam):
        return self.add(GateKind.CP, (a, b), (lam,))

    def swap(self, a, b):
        return self.add(GateKind.SWAP, (a, b))

    def measure(self, q):
        return self.add(GateKind.MEASURE, (q,))

    def prepare(self, q, state: int):
        return self.add(GateKind.PREPARE, (q,), (state,))

    # -- views -------------------------------------------------------------

    def two_qubit_gates(self) -> list[Gate]:
        """Two-qubit gates in program order; single-qubit gates never cut."""
        return [g for g in self.gates if g.is_two_qubit]

    def front_layer(self, executed: set[int]) -> list[Gate]:
        """Gates with no unexecuted earlier gate sharing a qubit, in seq order.

        ``executed`` must be downward-closed under the qubit-wise dependency
        relation; the result is empty only when every gate is executed.
        """
        blocked: set[int] = set()
        front = []
        for g in self.gates:
            if g.seq in executed:
                continue
            if any(q in blocked for q in g.qubits):
                blocked.update(g.qubits)
                continue
            front.append(g)
            blocked.update(g.qubits)
        return front

    def gate_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for g in self.gates:
            counts[g.kind.value] = counts.get(g.kind.value, 0) + 1
        return counts

    # -- equality / export --------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, Circuit):
            return NotImplemented
        return self.num_qubits == other.num_qubits and self.gates == other.gates

    def __repr__(self) -> str:
        return f"Circuit(num_qubits={self.num_qubits}, gates={len(self.gates)})"

    def copy(self) -> "Circuit":
        c = Circuit(self.num_qubits, self.observable)
        c.gates = list(self.gates)
        return c

    def to_qasm(self) -> str:
        """OpenQASM 2 text; PREPARE is lowered to explicit basis gates."""
        lines = ['OPENQASM 2.0;', 'include "qelib1.inc";', f"qreg q[{self.num_qubits}];"]
        needs_creg = any(g.kind is GateKind.MEASURE for g in self.gates)
        if needs_creg:
            lines.append(f"creg c[{self.num_qubits}];")
        for g in self.gates:
            if g.kind is GateKind.PREPARE:
                for name in _PREP_LOWERING[int(g.params[0])]:
                    lines.append(f"{name} q[{g.qubits[0]}];")
                continue
            if g.kind is GateKind.MEASURE:
                lines.append(f"measure q[{g.qubits[0]}] -> c[{g.qubits[0]}];")
                continue
            args = ",".join(f"q[{q}]" for q in g.qubits)
            if g.params:
                ps = ",".join(repr(p) for p in g.params)
                lines.append(f"{g.kind.value}({ps}) {args};")
            else:
                lines.append(f"{g.kind.value} {args};")
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        """Canonical JSON dump for debugging."""
        return json.dumps(
            {
                "num_qubits": self.num_qubits,
                "gates": [
                    {"kind": g.kind.value, "qubits": list(g.qubits), "params": list(g.params), "seq": g.seq}
                    for g in self.gates
                ],
            },
            indent=2,
        )


_PREP_LOWERING = {PREP_ZERO: (), PREP_ONE: ("x",), PREP_PLUS: ("h",), PREP_IPLUS: ("h", "s")}


# ---------------------------------------------------------------------------
# OpenQASM 2 subset parser
# ---------------------------------------------------------------------------

_GATE_NAMES = {k.value: k for k in GateKind if k not in (GateKind.MEASURE, GateKind.PREPARE)}
_IGNORED_STATEMENTS = ("barrier",)


def parse_qasm(text: str) -> Circuit:
    """Parse an OpenQASM 2.0 subset: one qreg, gates from the supported set,
    u1/u2/u3 lowered to rotations, optional trailing measure statements
    (dropped: observables are supplied separately, not measured inline).
    """
    circuit: Circuit | None = None
    qreg_name = None
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("//", 1)[0].strip()
        if not line:
            continue
        for stmt in filter(None, (s.strip() for s in line.split(";"))):
            word = stmt.split("(", 1)[0].split(None, 1)[0].lower()
            if word in ("openqasm", "include", "creg", "id") or word in _IGNORED_STATEMENTS:
                continue
            if word == "qreg":
                if circuit is not None:
                    raise QasmError("multiple qreg declarations are not supported", line_no)
                qreg_name, size = _parse_reg(stmt, line_no)
                circuit = Circuit(size)
                continue
            if word == "measure":
                continue  # measure-all is accepted and dropped
            if circuit is None:
                raise QasmError("gate before qreg declaration", line_no)
            _parse_gate(circuit, qreg_name, stmt, line_no)
    if circuit is None:
        raise QasmError("no qreg declaration found")
    return circuit


def _parse_reg(stmt: str, line_no: int) -> tuple[str, int]:
    body = stmt.split(None, 1)[1].strip()
    if "[" not in body or not body.endswith("]"):
        raise QasmError(f"malformed register declaration: {stmt!r}", line_no)
    name, size = body[:-1].split("[", 1)
    try:
        return name.strip(), int(size)
    except ValueError:
        raise QasmError(f"bad register size in {stmt!r}", line_no) from None


def _parse_gate(circuit: Circuit, qreg: str | None, stmt: str, line_no: int) -> None:
    name = stmt
    params: list[float] = []
    if "(" in stmt:
        name, rest = stmt.split("(", 1)
        depth, buf, i = 1, "", 0
        for i, ch in enumerate(rest):
            if ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
                if depth == 0:
                    break
            buf += ch
        if depth != 0:
            raise QasmError("unbalanced parentheses", line_no, stmt.index("(") + 1)
        params = [_eval_angle(p, line_no) for p in buf.split(",")]
        arg_text = rest[i + 1:]
    else:
        parts = stmt.split(None, 1)
        name, arg_text = parts[0], parts[1] if len(parts) > 1 else ""
    name = name.strip().lower()
    qubits = _parse_args(arg_text, qreg, line_no)

    if name in ("u1", "u2", "u3"):
        _lower_u(circuit, name, params, qubits, line_no)
        return
    kind = _GATE_NAMES.get(name)
    if kind is None:
        raise QasmError(f"unsupported gate {name!r}", line_no)
    try:
        circuit.add(kind, tuple(qubits), tuple(params))
    except ValueError as exc:
        raise QasmError(str(exc), line_no) from None


def _lower_u(circuit: Circuit, name: str, params: list[float], qubits: list[int], line_no: int) -> None:
    if len(qubits) != 1:
        raise QasmError(f"{name} expects one qubit", line_no)
    q = qubits[0]
    if name == "u1":
        (lam,) = params
        theta, phi = 0.0, 0.0
    elif name == "u2":
        phi, lam = params
        theta = math.pi / 2
    else:
        theta, phi, lam = params
    # u3(theta, phi, lam) == RZ(phi) RY(theta) RZ(lam) up to global phase
    if abs(lam) > ANGLE_TOL:
        circuit.rz(q, lam)
    if abs(theta) > ANGLE_TOL:
        circuit.ry(q, theta)
    if abs(phi) > ANGLE_TOL:
        circuit.rz(q, phi)


def _parse_args(arg_text: str, qreg: str | None, line_no: int) -> list[int]:
    qubits = []
    for piece in filter(None, (a.strip() for a in arg_text.split(","))):
        if "[" not in piece or not piece.endswith("]"):
            raise QasmError(f"expected indexed qubit argument, got {piece!r}", line_no)
        name, idx = piece[:-1].split("[", 1)
        if qreg is not None and name.strip() != qreg:
            raise QasmError(f"unknown register {name.strip()!r}", line_no)
        try:
            qubits.append(int(idx))
        except ValueError:
            raise QasmError(f"bad qubit index in {piece!r}", line_no) from None
    return qubits


def _eval_angle(expr: str, line_no: int) -> float:
    """Evaluate a literal angle expression over numbers, pi, + - * / and parens."""
    tokens = _tokenize_angle(expr, line_no)
    pos = [0]

    def peek():
        return tokens[pos[0]] if pos[0] < len(tokens) else None

    def take():
        tok = peek()
        pos[0] += 1
        return tok

    def atom() -> float:
        tok = take()
        if tok is None:
            raise QasmError(f"truncated angle expression {expr!r}", line_no)
        if tok == "(":
            val = add()
            if take() != ")":
                raise QasmError(f"missing ')' in {expr!r}", line_no)
            return val
        if tok == "-":
            return -atom()
        if tok == "+":
            return atom()
        if tok == "pi":
            return math.pi
        try:
            return float(tok)
        except ValueError:
            raise QasmError(f"bad token {tok!r} in angle {expr!r}", line_no) from None

    def mul() -> float:
        val = atom()
        while peek() in ("*", "/"):
            if take() == "*":
                val *= atom()
            else:
                val /= atom()
        return val

    def add() -> float:
        val = mul()
        while peek() in ("+", "-"):
            if take() == "+":
                val += mul()
            else:
                val -= mul()
        return val

    result = add()
    if pos[0] != len(tokens):
        raise QasmError(f"trailing tokens in angle {expr!r}", line_no)
    return result


def _tokenize_angle(expr: str, line_no: int) -> list[str]:
    tokens, i = [], 0
    while i < len(expr):
        ch = expr[i]
        if ch.isspace():
            i += 1
        elif ch in "+-*/()":
            tokens.append(ch)
            i += 1
        elif ch.isdigit() or ch == ".":
            j = i
            while j < len(expr) and (expr[j].isdigit() or expr[j] in ".eE" or (expr[j] in "+-" and expr[j - 1] in "eE")):
                j += 1
            tokens.append(expr[i:j])
            i = j
        elif ch.isalpha():
            j = i
            while j < len(expr) and expr[j].isalpha():
                j += 1
            word = expr[i:j].lower()
            if word != "pi":
                raise QasmError(f"unknown symbol {word!r} in angle", line_no)
            tokens.append(word)
            i = j
        else:
            raise QasmError(f"bad character {ch!r} in angle", line_no)
    return tokens
