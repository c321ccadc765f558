"""Pure states, density matrices, ensembles, Bloch vectors and channels.

Qubit 0 is the leftmost tensor factor: basis index ``i`` of an n-qubit
register has binary digits ``i_0 i_1 ... i_{n-1}`` with ``i_0`` most
significant.

Random fixtures use ``numpy.random.Generator`` (PCG64). Pass the generator
explicitly; derive independent streams with ``rng.spawn(k)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from qipkit import linalg
from qipkit.errors import DimensionError, InvalidStateError, NotUnitaryError, QipkitError

ATOL = linalg.ATOL
PURE_TOL = 1e-8


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class PureState:
    """Unit vector in ``C^dim``."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size < 2:
            raise InvalidStateError("a state needs dimension >= 2")
        if not np.all(np.isfinite(amps)):
            raise InvalidStateError("non-finite amplitude")
        norm2 = float(np.vdot(amps, amps).real)
        if abs(norm2 - 1.0) > ATOL:
            raise InvalidStateError(f"state is not normalized (norm^2 = {norm2:.12g})")
        object.__setattr__(self, "amplitudes", _frozen(amps))

    @classmethod
    def normalized(cls, amps) -> "PureState":
        amps = np.asarray(amps, dtype=complex).reshape(-1)
        return cls(amps / np.linalg.norm(amps))

    @classmethod
    def basis(cls, index: int, dim: int) -> "PureState":
        v = np.zeros(dim, dtype=complex)
        v[index] = 1.0
        return cls(v)

    @classmethod
    def from_bits(cls, bits: str) -> "PureState":
        """Computational basis state from a bit string such as ``"101"``."""
        return cls.basis(int(bits, 2), 2 ** len(bits))

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    @property
    def n_qubits(self) -> int:
        n = int(round(math.log2(self.dim)))
        if 2 ** n != self.dim:
            raise DimensionError(f"dimension {self.dim} is not a power of two")
        return n

    def inner(self, other: "PureState") -> complex:
        """``<self|other>``."""
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def overlap(self, other: "PureState") -> float:
        """``|<self|other>|^2``."""
        return abs(self.inner(other)) ** 2

    def equal_up_to_phase(self, other: "PureState", atol: float = ATOL) -> bool:
        return self.dim == other.dim and abs(1.0 - self.overlap(other)) <= atol

    def __eq__(self, other):
        if not isinstance(other, PureState):
            return NotImplemented
        return self.dim == other.dim and bool(np.allclose(self.amplitudes, other.amplitudes, rtol=0, atol=ATOL))

    def __repr__(self):
        return f"PureState({np.array2string(self.amplitudes, precision=6)})"

    def to_json(self) -> list:
        return [[float(z.real), float(z.imag)] for z in self.amplitudes]

    @classmethod
    def from_json(cls, data) -> "PureState":
        return cls(np.array([complex(re, im) for re, im in data]))


KET0 = PureState([1, 0])
KET1 = PureState([0, 1])
KET_PLUS = PureState(np.array([1, 1]) / math.sqrt(2))
KET_MINUS = PureState(np.array([1, -1]) / math.sqrt(2))


def bell_state(index: int = 0) -> PureState:
    """The four Bell states in the order produced by H-then-CNOT on |00>,|01>,|10>,|11>."""
    s = 1 / math.sqrt(2)
    vecs = [
        [s, 0, 0, s],
        [0, s, s, 0],
        [s, 0, 0, -s],
        [0, s, -s, 0],
    ]
    return PureState(vecs[index])


def real_qubit(angle: float) -> PureState:
    """``cos(angle)|0> + sin(angle)|1>``."""
    return PureState([math.cos(angle), math.sin(angle)])


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, positive semi-definite, unit-trace matrix."""

    matrix: np.ndarray

    def __post_init__(self):
        m = linalg.as_matrix(self.matrix)
        if m.shape[0] != m.shape[1] or m.shape[0] < 2:
            raise InvalidStateError(f"density matrix must be square with dim >= 2, got {m.shape}")
        if not linalg.is_hermitian(m):
            raise InvalidStateError("density matrix is not Hermitian")
        tr = np.trace(m).real
        if abs(tr - 1.0) > ATOL:
            raise InvalidStateError(f"density matrix trace is {tr:.12g}, expected 1")
        m = 0.5 * (m + m.conj().T)
        lam_min = linalg.eigvalsh(m)[0]
        if lam_min < -ATOL:
            raise InvalidStateError(f"density matrix is not PSD (eigenvalue {lam_min:.3e})")
        object.__setattr__(self, "matrix", _frozen(m))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def eigenvalues(self) -> np.ndarray:
        return linalg.eigvalsh(self.matrix)

    def __eq__(self, other):
        if not isinstance(other, DensityMatrix):
            return NotImplemented
        return self.dim == other.dim and bool(np.allclose(self.matrix, other.matrix, rtol=0, atol=ATOL))

    def __repr__(self):
        return f"DensityMatrix({np.array2string(self.matrix, precision=6)})"

    def to_json(self) -> list:
        return [[float(z.real), float(z.imag)] for z in self.matrix.ravel()]

    @classmethod
    def from_json(cls, data) -> "DensityMatrix":
        vals = np.array([complex(re, im) for re, im in data])
        d = int(round(math.sqrt(vals.size)))
        if d * d != vals.size:
            raise DimensionError(f"{vals.size} entries do not form a square matrix")
        return cls(vals.reshape(d, d))


State = Union[PureState, DensityMatrix]


def as_density(state: State) -> DensityMatrix:
    if isinstance(state, DensityMatrix):
        return state
    if isinstance(state, PureState):
        return density_from_pure(state)
    raise TypeError(f"expected PureState or DensityMatrix, got {type(state).__name__}")


@dataclass(frozen=True)
class Ensemble:
    """Finite set of ``(state, probability)`` pairs."""

    members: tuple

    def __post_init__(self):
        members = tuple((s, float(p)) for s, p in self.members)
        if not members:
            raise InvalidStateError("ensemble is empty")
        for s, p in members:
            if not isinstance(s, (PureState, DensityMatrix)):
                raise TypeError(f"ensemble member must be a state, got {type(s).__name__}")
            if p < -ATOL or p > 1 + ATOL:
                raise InvalidStateError(f"probability {p} outside [0, 1]")
        total = math.fsum(p for _, p in members)
        if abs(total - 1.0) > ATOL:
            raise InvalidStateError(f"probabilities sum to {total:.12g}")
        dims = {s.dim for s, _ in members}
        if len(dims) != 1:
            raise DimensionError(f"ensemble members have mixed dimensions {sorted(dims)}")
        object.__setattr__(self, "members", members)

    @classmethod
    def uniform(cls, states: Sequence[State]) -> "Ensemble":
        return cls(tuple((s, 1.0 / len(states)) for s in states))

    @property
    def states(self) -> list:
        return [s for s, _ in self.members]

    @property
    def probs(self) -> np.ndarray:
        return np.array([p for _, p in self.members])

    @property
    def dim(self) -> int:
        return self.members[0][0].dim

    @property
    def is_pure(self) -> bool:
        return all(isinstance(s, PureState) for s, _ in self.members)


@dataclass(frozen=True)
class BlochVector:
    bx: float
    by: float
    bz: float

    def __post_init__(self):
        if self.norm() > 1 + ATOL:
            raise InvalidStateError(f"Bloch vector length {self.norm():.12g} exceeds 1")

    def norm(self) -> float:
        return math.sqrt(self.bx ** 2 + self.by ** 2 + self.bz ** 2)

    def as_array(self) -> np.ndarray:
        return np.array([self.bx, self.by, self.bz])

    def angles(self) -> tuple[float, float]:
        """Polar angle from +z and azimuth from +x."""
        r = self.norm()
        theta = math.acos(max(-1.0, min(1.0, self.bz / r))) if r > 0 else 0.0
        return theta, math.atan2(self.by, self.bx)


def pure_from_angles(theta: float, phi: float) -> PureState:
    """``cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>``."""
    return PureState([math.cos(theta / 2), np.exp(1j * phi) * math.sin(theta / 2)])


def density_from_pure(psi: PureState) -> DensityMatrix:
    v = psi.amplitudes
    return DensityMatrix(np.outer(v, v.conj()))


def density_from_ensemble(e: Ensemble) -> DensityMatrix:
    rho = sum(p * as_density(s).matrix for s, p in e.members)
    return DensityMatrix(rho)


def maximally_mixed(dim: int) -> DensityMatrix:
    return DensityMatrix(np.eye(dim) / dim)


def purity(rho: State) -> float:
    m = as_density(rho).matrix
    return float(np.real(np.trace(m @ m)))


def is_pure(rho: State) -> bool:
    return purity(rho) > 1 - PURE_TOL


def bloch_from_density(rho: State) -> BlochVector:
    m = as_density(rho).matrix
    if m.shape != (2, 2):
        raise DimensionError("Bloch vectors are defined for single-qubit states")
    bx = float(np.real(np.trace(linalg.SIGMA_X @ m)))
    by = float(np.real(np.trace(linalg.SIGMA_Y @ m)))
    bz = float(np.real(np.trace(linalg.SIGMA_Z @ m)))
    r = math.sqrt(bx * bx + by * by + bz * bz)
    if 1 < r <= 1 + ATOL:
        bx, by, bz = bx / r, by / r, bz / r
    return BlochVector(bx, by, bz)


def density_from_bloch(b: BlochVector) -> DensityMatrix:
    m = 0.5 * (linalg.I2 + b.bx * linalg.SIGMA_X + b.by * linalg.SIGMA_Y + b.bz * linalg.SIGMA_Z)
    return DensityMatrix(m)


def partial_trace(rho: State, dim_a: int, dim_b: int, keep: str = "A") -> DensityMatrix:
    """Reduced state of a bipartite ``dim_a x dim_b`` system.

    ``keep="A"`` traces out B and vice versa.
    """
    m = as_density(rho).matrix
    if m.shape[0] != dim_a * dim_b:
        raise DimensionError(f"state of dim {m.shape[0]} is not {dim_a} x {dim_b}")
    t = m.reshape(dim_a, dim_b, dim_a, dim_b)
    keep = keep.upper()
    if keep == "A":
        out = np.einsum("ijkj->ik", t)
    elif keep == "B":
        out = np.einsum("ijil->jl", t)
    else:
        raise ValueError(f"keep must be 'A' or 'B', got {keep!r}")
    return DensityMatrix(out)


def reduce_to_qubits(rho: State, keep: Sequence[int]) -> DensityMatrix:
    """Reduced state on the listed qubits of an n-qubit register (order preserved)."""
    m = as_density(rho).matrix
    n = int(round(math.log2(m.shape[0])))
    keep = list(keep)
    drop = [q for q in range(n) if q not in keep]
    t = m.reshape([2] * (2 * n))
    perm = keep + drop + [n + q for q in keep] + [n + q for q in drop]
    t = t.transpose(perm)
    dk, dd = 2 ** len(keep), 2 ** len(drop)
    t = t.reshape(dk, dd, dk, dd)
    return DensityMatrix(np.einsum("ijkj->ik", t))


def apply_unitary(rho: State, u) -> DensityMatrix:
    m = as_density(rho).matrix
    u = linalg.as_matrix(u)
    if u.shape != m.shape:
        raise DimensionError(f"unitary of shape {u.shape} does not act on dim {m.shape[0]}")
    if not linalg.is_unitary(u):
        raise NotUnitaryError("operator is not unitary")
    return DensityMatrix(u @ m @ u.conj().T)


def kraus_completeness_residual(ops) -> float:
    ops = [linalg.as_matrix(e) for e in ops]
    d = ops[0].shape[1]
    acc = sum(e.conj().T @ e for e in ops)
    return float(np.max(np.abs(acc - np.eye(d))))


def apply_kraus(rho: State, ops) -> DensityMatrix:
    """``sum_k E_k rho E_k^H`` for a complete set of Kraus operators."""
    m = as_density(rho).matrix
    ops = [linalg.as_matrix(e) for e in ops]
    if not ops:
        raise QipkitError("empty Kraus set")
    for e in ops:
        if e.shape[1] != m.shape[0]:
            raise DimensionError(f"Kraus operator {e.shape} does not act on dim {m.shape[0]}")
    res = kraus_completeness_residual(ops)
    if res > ATOL:
        raise QipkitError(f"Kraus operators are not complete (residual {res:.3e})")
    return DensityMatrix(sum(e @ m @ e.conj().T for e in ops))


def bit_flip_kraus(p: float) -> list:
    return [math.sqrt(1 - p) * linalg.I2, math.sqrt(p) * linalg.SIGMA_X]


def tensor_states(*states: PureState) -> PureState:
    return PureState(linalg.kron_all(*(s.amplitudes for s in states)).reshape(-1))


def tensor_density(*states: State) -> DensityMatrix:
    return DensityMatrix(linalg.kron_all(*(as_density(s).matrix for s in states)))


def is_product_two_qubit(psi: PureState) -> bool:
    """A two-qubit pure state is a product iff its reduced state is pure."""
    if psi.dim != 4:
        raise DimensionError("expected a two-qubit state")
    return purity(partial_trace(psi, 2, 2, keep="A")) > 1 - PURE_TOL


def random_pure(dim: int, rng: np.random.Generator) -> PureState:
    """Normalized vector of i.i.d. standard complex Gaussians."""
    if dim < 2:
        raise InvalidStateError("dim must be >= 2")
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return PureState(v / np.linalg.norm(v))


def random_density(dim: int, rank: int, rng: np.random.Generator) -> DensityMatrix:
    """Partial trace of a random pure state on ``dim x rank``."""
    if not 1 <= rank <= dim:
        raise ValueError(f"rank must be in [1, {dim}], got {rank}")
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    g /= np.linalg.norm(g)
    return DensityMatrix(g @ g.conj().T)


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a complex Gaussian matrix."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))
