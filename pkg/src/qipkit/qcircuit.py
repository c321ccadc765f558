"""Gates, circuits, the circuit text format, oracles and Hamiltonian evolution."""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from qipkit import linalg
from qipkit.errors import CircuitParseError, DimensionError, NotHermitianError, NotUnitaryError
from qipkit.qstate import PureState

CUSTOM_UNITARY_TOL = 1e-8
# largest register the text format accepts; a 2^24 state vector is 256 MiB
MAX_QUBITS = 24

_S = 1 / math.sqrt(2)
_GATES = {
    "I": linalg.I2,
    "X": linalg.SIGMA_X,
    "Y": linalg.SIGMA_Y,
    "Z": linalg.SIGMA_Z,
    "H": np.array([[_S, _S], [_S, -_S]], dtype=complex),
    "CNOT": np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
    ),
}
for _m in _GATES.values():
    _m.flags.writeable = False

SINGLE_QUBIT_KINDS = ("I", "X", "Y", "Z", "H")


def standard_gate(kind: str) -> np.ndarray:
    try:
        return _GATES[kind.upper()]
    except KeyError:
        raise ValueError(f"unknown gate {kind!r}") from None


@dataclass(frozen=True, eq=False)
class Gate:
    kind: str
    targets: tuple
    matrix: np.ndarray = None

    def __post_init__(self):
        kind = self.kind.upper()
        object.__setattr__(self, "kind", kind)
        targets = tuple(int(t) for t in self.targets)
        object.__setattr__(self, "targets", targets)
        if len(set(targets)) != len(targets):
            raise ValueError(f"gate targets must be distinct, got {targets}")
        if any(t < 0 for t in targets):
            raise ValueError(f"negative qubit index in {targets}")
        if kind in _GATES:
            if self.matrix is not None:
                raise ValueError(f"standard gate {kind} does not take a matrix")
            m = _GATES[kind]
        elif kind in ("U2", "UN"):
            if self.matrix is None:
                raise ValueError(f"{kind} gate needs a matrix")
            m = np.array(linalg.as_matrix(self.matrix))
            m.flags.writeable = False
            if not linalg.is_unitary(m, CUSTOM_UNITARY_TOL):
                raise NotUnitaryError(f"{kind} matrix is not unitary")
        else:
            raise ValueError(f"unknown gate {kind!r}")
        if m.shape != (2 ** len(targets),) * 2:
            raise DimensionError(f"{kind} matrix {m.shape} does not match {len(targets)} target(s)")
        if kind == "U2" and len(targets) != 1:
            raise DimensionError("U2 acts on exactly one qubit")
        object.__setattr__(self, "matrix", m)

    def __eq__(self, other):
        if not isinstance(other, Gate):
            return NotImplemented
        return (
            self.kind == other.kind
            and self.targets == other.targets
            and np.array_equal(self.matrix, other.matrix)
        )


@dataclass(frozen=True)
class Circuit:
    n_qubits: int
    gates: tuple = field(default=())

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("a circuit needs at least one qubit")
        gates = tuple(self.gates)
        for g in gates:
            if max(g.targets) >= self.n_qubits:
                raise IndexError(f"gate {g.kind} targets {g.targets} outside {self.n_qubits} qubits")
        object.__setattr__(self, "gates", gates)

    def then(self, *gates: Gate) -> "Circuit":
        return Circuit(self.n_qubits, self.gates + tuple(gates))

    def unitary(self) -> np.ndarray:
        u = np.eye(2 ** self.n_qubits, dtype=complex)
        for g in self.gates:
            u = embed_gate(g.matrix, g.targets, self.n_qubits) @ u
        return u


def embed_gate(u, targets: Sequence[int], n: int) -> np.ndarray:
    """Lift ``u`` acting on ``targets`` (in order) to the full ``2^n`` space.

    Built as ``u (x) I`` on the reordered register, then conjugated by the
    index permutation that moves ``targets`` to the front.
    """
    u = linalg.as_matrix(u)
    targets = [int(t) for t in targets]
    k = len(targets)
    if u.shape != (2 ** k, 2 ** k):
        raise DimensionError(f"matrix {u.shape} does not act on {k} qubit(s)")
    if len(set(targets)) != k or any(t < 0 or t >= n for t in targets):
        raise DimensionError(f"invalid targets {targets} for {n} qubits")
    full = np.kron(u, np.eye(2 ** (n - k)))
    order = targets + [q for q in range(n) if q not in targets]
    # perm[i] = index of basis state i after moving `order` qubits to the front
    idx = np.arange(2 ** n)
    bits = (idx[:, None] >> (n - 1 - np.arange(n))) & 1
    perm = (bits[:, order] << (n - 1 - np.arange(n))).sum(axis=1)
    return full[np.ix_(perm, perm)]


def apply_gate(psi: np.ndarray, u: np.ndarray, targets: Sequence[int], n: int) -> np.ndarray:
    """Apply a k-qubit matrix to an amplitude vector by tensor contraction."""
    k = len(targets)
    t = psi.reshape([2] * n)
    t = np.tensordot(u.reshape([2] * (2 * k)), t, axes=(list(range(k, 2 * k)), list(targets)))
    # contracted axes land in front; move them back to their positions
    rest = [q for q in range(n) if q not in targets]
    inv = np.argsort(list(targets) + rest)
    return t.transpose(inv).reshape(-1)


def apply_circuit(c: Circuit, psi: PureState) -> PureState:
    if psi.dim != 2 ** c.n_qubits:
        raise DimensionError(f"state of dim {psi.dim} does not fit {c.n_qubits} qubits")
    v = np.array(psi.amplitudes)
    for g in c.gates:
        v = apply_gate(v, g.matrix, g.targets, c.n_qubits)
    return PureState(v / np.linalg.norm(v))


def bell_circuit() -> Circuit:
    return Circuit(2, (Gate("H", (0,)), Gate("CNOT", (0, 1))))


def repetition_encoder() -> Circuit:
    """Two CNOTs fanning qubit 0 out onto ancillas 1 and 2."""
    return Circuit(3, (Gate("CNOT", (0, 1)), Gate("CNOT", (0, 2))))


def uniform_superposition(n: int) -> PureState:
    if n < 1:
        raise ValueError("n must be >= 1")
    return PureState(np.full(2 ** n, 2 ** (-n / 2), dtype=complex))


def function_oracle(f: Callable[[int], int], n: int, m: int) -> np.ndarray:
    """Permutation matrix of ``|x, y> -> |x, y xor f(x)>``.

    ``f`` maps an n-bit integer to an m-bit integer.
    """
    dim = 2 ** (n + m)
    u = np.zeros((dim, dim), dtype=complex)
    for x in range(2 ** n):
        fx = int(f(x))
        if not 0 <= fx < 2 ** m:
            raise ValueError(f"f({x}) = {fx} does not fit in {m} bits")
        for y in range(2 ** m):
            u[(x << m) | (y ^ fx), (x << m) | y] = 1.0
    return u


def parallel_evaluate(f: Callable[[int], int], n: int, m: int) -> PureState:
    """``U_f`` applied to ``H^n|0..0> (x) |0..0>``: ``2^{-n/2} sum_x |x, f(x)>``."""
    inp = np.zeros(2 ** (n + m), dtype=complex)
    inp[:: 2 ** m] = 2 ** (-n / 2)
    return PureState(function_oracle(f, n, m) @ inp)


def hamiltonian_evolution(h, t: float) -> np.ndarray:
    """``exp(-i H t)`` with hbar = 1."""
    h = linalg.as_matrix(h)
    if not linalg.is_hermitian(h):
        raise NotHermitianError("Hamiltonian must be Hermitian")
    return linalg.matrix_func(h, lambda lam: np.exp(-1j * lam * t))


def pauli_decompose(a) -> tuple:
    """Coefficients ``(a_I, a_X, a_Y, a_Z)`` with ``a = sum a_K sigma_K``."""
    a = linalg.as_matrix(a)
    if a.shape != (2, 2):
        raise DimensionError("expected a 2x2 matrix")
    return tuple(
        complex(np.trace(p @ a) / 2)
        for p in (linalg.I2, linalg.SIGMA_X, linalg.SIGMA_Y, linalg.SIGMA_Z)
    )


# -- text format ---------------------------------------------------------

_INT = re.compile(r"[0-9]+\Z")
_UNUM = r"(?:[0-9]+\.?[0-9]*|\.[0-9]+)(?:[eE][+-]?[0-9]+)?"
_NUM = rf"[+-]?{_UNUM}"
_COMPLEX = re.compile(rf"(?P<re>{_NUM})(?:(?P<im>[+-](?:{_UNUM})?)i)?\Z|(?P<imonly>{_NUM})i\Z")


def _parse_complex(tok: str) -> complex:
    m = _COMPLEX.match(tok)
    if not m:
        raise ValueError(tok)
    if m.group("imonly") is not None:
        return complex(0.0, float(m.group("imonly")))
    re_part = float(m.group("re"))
    im = m.group("im")
    if im is None:
        return complex(re_part, 0.0)
    if im in ("+", "-"):
        im += "1"
    return complex(re_part, float(im))


def _format_complex(z: complex) -> str:
    im = repr(float(z.imag))
    sign = "" if im.startswith("-") else "+"
    return f"{float(z.real)!r}{sign}{im}i"


def _tokens(line: str):
    """Yield ``(token, column)`` pairs; columns are 1-based."""
    for m in re.finditer(r"\S+", line):
        yield m.group(0), m.start() + 1


def parse_circuit(text: str) -> Circuit:
    """Parse the line-oriented circuit language.

    ::

        qubits 2
        h 0          # comments run to end of line
        cnot 0 1
        u2 1 0 1 1 0

    Raises :class:`CircuitParseError` with line and column on any problem.
    """
    n = None
    gates = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        toks = list(_tokens(line))
        if not toks:
            continue
        word, col = toks[0]
        kw = word.lower()
        args = toks[1:]

        def _int(i, what):
            if i >= len(args):
                end = len(line.rstrip()) + 1
                raise CircuitParseError(f"missing {what} for '{kw}'", lineno, end)
            tok, c = args[i]
            if not _INT.match(tok):
                raise CircuitParseError(f"expected a non-negative integer {what}, got {tok!r}", lineno, c)
            return int(tok), c

        def _no_extra(count):
            if len(args) > count:
                tok, c = args[count]
                raise CircuitParseError(f"unexpected token {tok!r}", lineno, c)

        if n is None:
            if kw != "qubits":
                raise CircuitParseError(f"expected 'qubits' header, got {word!r}", lineno, col)
            n, c = _int(0, "qubit count")
            _no_extra(1)
            if n < 1:
                raise CircuitParseError("qubit count must be at least 1", lineno, c)
            if n > MAX_QUBITS:
                raise CircuitParseError(f"qubit count {n} exceeds the limit of {MAX_QUBITS}", lineno, c)
            continue

        if kw == "qubits":
            raise CircuitParseError("duplicate 'qubits' header", lineno, col)

        def _qubit(i):
            q, c = _int(i, "qubit index")
            if q >= n:
                raise CircuitParseError(f"qubit index {q} out of range for {n} qubit(s)", lineno, c)
            return q

        if kw in ("i", "x", "y", "z", "h"):
            q = _qubit(0)
            _no_extra(1)
            gates.append(Gate(kw.upper(), (q,)))
        elif kw == "cnot":
            c_q = _qubit(0)
            t_q = _qubit(1)
            _no_extra(2)
            if c_q == t_q:
                raise CircuitParseError("cnot control and target must differ", lineno, args[1][1])
            gates.append(Gate("CNOT", (c_q, t_q)))
        elif kw == "u2":
            q = _qubit(0)
            vals = []
            for i in range(1, 5):
                if i >= len(args):
                    raise CircuitParseError("u2 needs 4 complex entries", lineno, len(line.rstrip()) + 1)
                tok, c = args[i]
                try:
                    vals.append(_parse_complex(tok))
                except ValueError:
                    raise CircuitParseError(f"malformed complex number {tok!r}", lineno, c) from None
            _no_extra(5)
            m = np.array(vals, dtype=complex).reshape(2, 2)
            if not np.all(np.isfinite(m)):
                raise CircuitParseError("u2 entries must be finite", lineno, args[1][1])
            if not linalg.is_unitary(m, CUSTOM_UNITARY_TOL):
                raise CircuitParseError("u2 matrix is not unitary", lineno, col)
            gates.append(Gate("U2", (q,), m))
        else:
            raise CircuitParseError(f"unknown gate {word!r}", lineno, col)

    if n is None:
        raise CircuitParseError("missing 'qubits' header", 1, 1)
    return Circuit(n, tuple(gates))


def format_circuit(c: Circuit) -> str:
    lines = [f"qubits {c.n_qubits}"]
    for g in c.gates:
        if g.kind in SINGLE_QUBIT_KINDS:
            lines.append(f"{g.kind.lower()} {g.targets[0]}")
        elif g.kind == "CNOT":
            lines.append(f"cnot {g.targets[0]} {g.targets[1]}")
        elif g.kind == "U2":
            entries = " ".join(_format_complex(z) for z in g.matrix.ravel())
            lines.append(f"u2 {g.targets[0]} {entries}")
        else:
            raise ValueError(f"{g.kind} gates have no text form")
    return "\n".join(lines) + "\n"
