"""Projective and POVM measurements on pure and mixed states."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from qipkit import linalg
from qipkit.errors import DimensionError, InvalidMeasurementError, NotHermitianError
from qipkit.qstate import (
    KET_MINUS,
    KET_PLUS,
    DensityMatrix,
    PureState,
    State,
    as_density,
    bell_state,
    density_from_pure,
    real_qubit,
    tensor_states,
)

PROJ_TOL = 1e-9
ZERO_PROB = 1e-12
EIG_GROUP_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class ProjectiveMeasurement:
    """Pairwise orthogonal projectors resolving the identity."""

    projectors: tuple
    labels: tuple = None

    def __post_init__(self):
        projs = tuple(linalg.as_matrix(p) for p in self.projectors)
        if not projs:
            raise InvalidMeasurementError("no projectors")
        d = projs[0].shape[0]
        for i, p in enumerate(projs):
            if p.shape != (d, d):
                raise DimensionError(f"projector {i} has shape {p.shape}, expected {(d, d)}")
            if not linalg.is_hermitian(p, PROJ_TOL):
                raise InvalidMeasurementError(f"projector {i} is not Hermitian")
            if not np.allclose(p @ p, p, rtol=0, atol=PROJ_TOL):
                raise InvalidMeasurementError(f"projector {i} is not idempotent")
        for i in range(len(projs)):
            for j in range(i + 1, len(projs)):
                if not np.allclose(projs[i] @ projs[j], 0, rtol=0, atol=PROJ_TOL):
                    raise InvalidMeasurementError(f"projectors {i} and {j} are not orthogonal")
        if not np.allclose(sum(projs), np.eye(d), rtol=0, atol=linalg.ATOL):
            raise InvalidMeasurementError("projectors do not sum to the identity")
        labels = tuple(range(len(projs))) if self.labels is None else tuple(self.labels)
        if len(labels) != len(projs):
            raise InvalidMeasurementError("one label per projector is required")
        for p in projs:
            p.flags.writeable = False
        object.__setattr__(self, "projectors", projs)
        object.__setattr__(self, "labels", labels)

    @property
    def dim(self) -> int:
        return self.projectors[0].shape[0]

    def as_povm(self) -> "Povm":
        return Povm(self.projectors)


@dataclass(frozen=True, eq=False)
class Povm:
    """PSD effects summing to the identity."""

    effects: tuple

    def __post_init__(self):
        effs = tuple(linalg.as_matrix(e) for e in self.effects)
        if not effs:
            raise InvalidMeasurementError("no effects")
        d = effs[0].shape[0]
        for i, e in enumerate(effs):
            if e.shape != (d, d):
                raise DimensionError(f"effect {i} has shape {e.shape}, expected {(d, d)}")
            if not linalg.is_psd(e):
                raise InvalidMeasurementError(f"effect {i} is not positive semi-definite")
        resid = float(np.max(np.abs(sum(effs) - np.eye(d))))
        if resid > linalg.ATOL:
            raise InvalidMeasurementError(f"effects do not sum to the identity (residual {resid:.3e})")
        for e in effs:
            e.flags.writeable = False
        object.__setattr__(self, "effects", effs)

    @property
    def dim(self) -> int:
        return self.effects[0].shape[0]


@dataclass(frozen=True, eq=False)
class OutcomeDistribution:
    """Outcome probabilities with the matching post-measurement states.

    ``post_states[i]`` is ``None`` when outcome ``i`` has probability below
    ``1e-12`` (the collapsed state is undefined there).
    """

    probs: np.ndarray
    post_states: tuple
    labels: tuple

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        if np.any(p < -ZERO_PROB):
            raise ValueError(f"negative probability {p.min():.3e}")
        if abs(p.sum() - 1.0) > linalg.ATOL:
            raise ValueError(f"probabilities sum to {p.sum():.12g}")
        p = np.clip(p, 0.0, None)
        p.flags.writeable = False
        object.__setattr__(self, "probs", p)


def _dispatch(state):
    if isinstance(state, PureState):
        return state.amplitudes, None
    if isinstance(state, DensityMatrix):
        return None, state.matrix
    raise TypeError(f"expected PureState or DensityMatrix, got {type(state).__name__}")


def check_orthonormal(basis: Sequence[PureState], atol: float = linalg.ATOL) -> None:
    d = basis[0].dim
    if any(b.dim != d for b in basis):
        raise InvalidMeasurementError("basis vectors have mixed dimensions")
    if len(basis) != d:
        raise InvalidMeasurementError(f"{len(basis)} vectors cannot resolve the identity in dim {d}")
    gram = np.array([[u.inner(v) for v in basis] for u in basis])
    if not np.allclose(gram, np.eye(d), rtol=0, atol=atol):
        raise InvalidMeasurementError("basis is not orthonormal")


def measure_in_basis(state: State, basis: Sequence[PureState]) -> OutcomeDistribution:
    """Measure in an orthonormal basis; outcome ``i`` leaves the state ``|u_i>``."""
    basis = list(basis)
    check_orthonormal(basis)
    vec, rho = _dispatch(state)
    probs = []
    for u in basis:
        if vec is not None:
            probs.append(abs(np.vdot(u.amplitudes, vec)) ** 2)
        else:
            probs.append(float(np.real(np.vdot(u.amplitudes, rho @ u.amplitudes))))
    probs = np.array(probs)
    probs = probs / probs.sum()
    posts = tuple(u if p > ZERO_PROB else None for u, p in zip(basis, probs))
    if rho is not None:
        posts = tuple(density_from_pure(u) if u is not None else None for u in posts)
    return OutcomeDistribution(probs, posts, tuple(range(len(basis))))


def projective_from_basis(basis: Sequence[PureState], labels=None) -> ProjectiveMeasurement:
    basis = list(basis)
    check_orthonormal(basis)
    return ProjectiveMeasurement(
        tuple(np.outer(u.amplitudes, u.amplitudes.conj()) for u in basis), labels
    )


def von_neumann(state: State, m: ProjectiveMeasurement) -> OutcomeDistribution:
    vec, rho = _dispatch(state)
    if (vec is not None and vec.size != m.dim) or (rho is not None and rho.shape[0] != m.dim):
        raise DimensionError("measurement and state dimensions differ")
    probs, posts = [], []
    for proj in m.projectors:
        if vec is not None:
            w = proj @ vec
            p = float(np.real(np.vdot(vec, w)))
            posts.append(PureState(w / math.sqrt(p)) if p > ZERO_PROB else None)
        else:
            w = proj @ rho @ proj
            p = float(np.real(np.trace(w)))
            posts.append(DensityMatrix(w / p) if p > ZERO_PROB else None)
        probs.append(p)
    return OutcomeDistribution(np.array(probs), tuple(posts), m.labels)


def povm_measure(state: State, povm: Povm) -> OutcomeDistribution:
    """POVM outcome statistics; post-states use the instrument ``M_i = sqrt(E_i)``."""
    vec, rho = _dispatch(state)
    if (vec is not None and vec.size != povm.dim) or (rho is not None and rho.shape[0] != povm.dim):
        raise DimensionError("POVM and state dimensions differ")
    probs, posts = [], []
    for e in povm.effects:
        k = linalg.sqrtm_psd(e)
        if vec is not None:
            p = float(np.real(np.vdot(vec, e @ vec)))
            posts.append(PureState.normalized(k @ vec) if p > ZERO_PROB else None)
        else:
            p = float(np.real(np.trace(e @ rho)))
            if p > ZERO_PROB:
                w = k @ rho @ k.conj().T
                posts.append(DensityMatrix(w / np.trace(w).real))
            else:
                posts.append(None)
        probs.append(p)
    return OutcomeDistribution(np.array(probs), tuple(posts), tuple(range(len(probs))))


def expectation(state: State, observable) -> float:
    obs = linalg.as_matrix(observable)
    if not linalg.is_hermitian(obs):
        raise NotHermitianError("observable must be Hermitian")
    vec, rho = _dispatch(state)
    val = np.vdot(vec, obs @ vec) if vec is not None else np.trace(obs @ rho)
    if abs(val.imag) > linalg.ATOL * max(1.0, abs(val)):
        raise ArithmeticError(f"expectation has imaginary part {val.imag:.3e}")
    return float(val.real)


def observable_from_eigensystem(eigenvalues: Sequence[float], basis: Sequence[PureState]) -> np.ndarray:
    """``H = sum_i l_i |u_i><u_i|``."""
    basis = list(basis)
    if len(eigenvalues) != len(basis):
        raise ValueError("need one eigenvalue per basis vector")
    check_orthonormal(basis)
    return sum(
        float(lam) * np.outer(u.amplitudes, u.amplitudes.conj())
        for lam, u in zip(eigenvalues, basis)
    )


def projective_from_observable(observable) -> ProjectiveMeasurement:
    """Eigenprojectors grouped by eigenvalue (within 1e-9), labelled by eigenvalue."""
    eig = linalg.hermitian_eigen(observable)
    groups = []
    for lam, v in zip(eig.eigenvalues, eig.eigenvectors.T):
        if groups and abs(lam - groups[-1][0]) <= EIG_GROUP_TOL:
            groups[-1][1].append(v)
        else:
            groups.append([lam, [v]])
    projs, labels = [], []
    # descending so that +1 precedes -1 for Pauli-type observables
    for lam, vs in reversed(groups):
        vs = np.array(vs).T
        projs.append(vs @ vs.conj().T)
        labels.append(float(np.round(lam, 12)))
    return ProjectiveMeasurement(tuple(projs), tuple(labels))


def sample(dist: OutcomeDistribution, rng: np.random.Generator, size: Optional[int] = None):
    """Inverse-CDF draw over the stored outcome order."""
    cdf = np.cumsum(dist.probs)
    cdf[-1] = 1.0
    u = rng.random(size)
    idx = np.searchsorted(cdf, u, side="right")
    return int(idx) if size is None else idx


def dephase_lost_record(rho: State, m: ProjectiveMeasurement) -> DensityMatrix:
    """State after measuring and forgetting the outcome: ``sum_i P_i rho P_i``."""
    mat = as_density(rho).matrix
    return DensityMatrix(sum(p @ mat @ p for p in m.projectors))


def povm_from_vectors(vectors: Sequence[PureState], atol: float = PROJ_TOL) -> Povm:
    """Scale rank-1 projectors onto ``vectors`` so they resolve the identity.

    Requires ``sum |v_i><v_i| = c I`` for some ``c > 0``; the effects are
    ``|v_i><v_i| / c``.
    """
    vectors = list(vectors)
    d = vectors[0].dim
    total = sum(np.outer(v.amplitudes, v.amplitudes.conj()) for v in vectors)
    c = float(np.real(np.trace(total))) / d
    resid = float(np.max(np.abs(total - c * np.eye(d))))
    if c <= 0 or resid > atol:
        raise InvalidMeasurementError(
            f"vectors do not form a scaled resolution of the identity (residual {resid:.3e})"
        )
    return Povm(tuple(np.outer(v.amplitudes, v.amplitudes.conj()) / c for v in vectors))


# -- named presets ---------------------------------------------------------

PSI0_ANGLE = math.pi / 12
PSI1_ANGLE = math.pi / 2 - math.pi / 12


def psi01_states() -> tuple:
    """Two real qubits at pi/12 from |0> and |1>, pi/3 apart."""
    return real_qubit(PSI0_ANGLE), real_qubit(PSI1_ANGLE)


def trine_vectors() -> tuple:
    """Three real qubits 2pi/3 apart; vector 1 is orthogonal to psi_0, vector 0 to psi_1."""
    start = PSI1_ANGLE - math.pi / 2
    return tuple(real_qubit(start + k * 2 * math.pi / 3) for k in range(3))


def trine_povm() -> Povm:
    return povm_from_vectors(trine_vectors())


def computational_basis(n_qubits: int = 1) -> list:
    return [PureState.basis(i, 2 ** n_qubits) for i in range(2 ** n_qubits)]


def hadamard_basis(n_qubits: int = 1) -> list:
    out = []
    for i in range(2 ** n_qubits):
        bits = format(i, f"0{n_qubits}b")
        out.append(tensor_states(*(KET_PLUS if b == "0" else KET_MINUS for b in bits)))
    return out


def bell_basis() -> list:
    return [bell_state(i) for i in range(4)]


PRESETS = ("computational", "hadamard", "pauli-x", "pauli-y", "pauli-z", "bell", "trine")


def preset_measurement(name: str, n_qubits: int = 1):
    """Measurement by name; returns a ProjectiveMeasurement or a Povm."""
    name = name.lower()
    if name == "computational":
        return projective_from_basis(computational_basis(n_qubits))
    if name == "hadamard":
        return projective_from_basis(hadamard_basis(n_qubits))
    if name in ("pauli-x", "pauli-y", "pauli-z"):
        if n_qubits != 1:
            raise ValueError(f"{name} is a single-qubit measurement")
        op = {"pauli-x": linalg.SIGMA_X, "pauli-y": linalg.SIGMA_Y, "pauli-z": linalg.SIGMA_Z}[name]
        return projective_from_observable(op)
    if name == "bell":
        if n_qubits != 2:
            raise ValueError("bell measurement needs 2 qubits")
        return projective_from_basis(bell_basis())
    if name == "trine":
        if n_qubits != 1:
            raise ValueError("trine is a single-qubit POVM")
        return trine_povm()
    raise ValueError(f"unknown measurement preset {name!r}; choose from {', '.join(PRESETS)}")

