"""Entropies, state distances, measurement channels, Holevo bound and
typical-subspace compression. All logarithms are base 2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from qipkit import _kernels, linalg
from qipkit.errors import QipkitError
from qipkit.qmeasure import Povm, ProjectiveMeasurement, psi01_states
from qipkit.qstate import (
    DensityMatrix,
    Ensemble,
    PureState,
    State,
    as_density,
    density_from_ensemble,
)

ENTROPY_CUTOFF = 1e-12
MAX_ENUM_N = 24


@dataclass(frozen=True, eq=False)
class ClassicalDistribution:
    probs: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float).reshape(-1)
        if np.any(p < -1e-12) or abs(p.sum() - 1) > linalg.ATOL:
            raise ValueError(f"not a probability distribution: {p}")
        p = np.clip(p, 0.0, None)
        p.flags.writeable = False
        object.__setattr__(self, "probs", p)


@dataclass(frozen=True, eq=False)
class ClassicalChannel:
    """``transition[a, i] = P(output i | input a)``."""

    transition: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.transition, dtype=float)
        if t.ndim != 2:
            raise ValueError("transition must be a matrix")
        for row in t:
            ClassicalDistribution(row)
        t = np.clip(t, 0.0, None)
        t.flags.writeable = False
        object.__setattr__(self, "transition", t)

    @property
    def n_inputs(self) -> int:
        return self.transition.shape[0]

    @property
    def n_outputs(self) -> int:
        return self.transition.shape[1]


def _probs(p) -> np.ndarray:
    if isinstance(p, ClassicalDistribution):
        return p.probs
    return ClassicalDistribution(p).probs


def shannon_entropy(p) -> float:
    p = _probs(p)
    nz = p[p > 0]
    return float(-np.sum(nz * np.log2(nz)))


def binary_entropy(x: float) -> float:
    if not 0 <= x <= 1:
        raise ValueError(f"binary entropy needs x in [0, 1], got {x}")
    return shannon_entropy([x, 1 - x])


def von_neumann_entropy(rho: State) -> float:
    """Shannon entropy of the spectrum, with eigenvalues below 1e-12 dropped."""
    lam = as_density(rho).eigenvalues()
    lam = lam[lam > ENTROPY_CUTOFF]
    return float(max(0.0, -np.sum(lam * np.log2(lam))))


_SUPPORT_TOL = 1e-13


def _support(m):
    eig = linalg.hermitian_eigen(m)
    keep = eig.eigenvalues > _SUPPORT_TOL
    return eig.eigenvectors[:, keep] * np.sqrt(eig.eigenvalues[keep])


def fidelity(sigma: State, omega: State) -> float:
    """``(Tr sqrt(sqrt(sigma) omega sqrt(sigma)))^2``.

    Evaluated on the support of the lower-rank argument, so the null space
    never passes through a square root (which would turn 1e-17 noise into 1e-9).
    """
    ra = _support(as_density(sigma).matrix)
    rb = _support(as_density(omega).matrix)
    if ra.shape[1] > rb.shape[1]:
        ra, rb = rb, ra
    w = rb @ rb.conj().T
    inner = ra.conj().T @ w @ ra
    inner = 0.5 * (inner + inner.conj().T)
    lam = np.clip(linalg.eigvalsh(inner), 0.0, None)
    return float(np.sum(np.sqrt(lam)) ** 2)


def projection_fidelity(psi: PureState, projector) -> float:
    """``|<psi|P|psi>|^2``: fidelity between a state and its projection."""
    p = linalg.as_matrix(projector)
    return abs(np.vdot(psi.amplitudes, p @ psi.amplitudes)) ** 2


def trace_distance(sigma: State, omega: State) -> float:
    """``(1/2) Tr |sigma - omega|``."""
    d = as_density(sigma).matrix - as_density(omega).matrix
    # d is Hermitian, so Tr|d| is the sum of absolute eigenvalues
    return 0.5 * float(np.sum(np.abs(linalg.eigvalsh(d))))


def holevo_chi(e: Ensemble) -> float:
    rho = density_from_ensemble(e)
    chi = von_neumann_entropy(rho)
    for state, p in e.members:
        if isinstance(state, DensityMatrix):
            chi -= p * von_neumann_entropy(state)
    return chi


def _effects(m) -> tuple:
    if isinstance(m, ProjectiveMeasurement):
        return m.projectors
    if isinstance(m, Povm):
        return m.effects
    raise TypeError(f"expected a measurement, got {type(m).__name__}")


def induced_channel(e: Ensemble, m) -> ClassicalChannel:
    """``P(i | a) = Tr(E_i rho_a)`` for every ensemble member ``a``."""
    effects = _effects(m)
    rows = []
    for state, _ in e.members:
        rho = as_density(state).matrix
        rows.append([float(np.real(np.trace(eff @ rho))) for eff in effects])
    return ClassicalChannel(np.array(rows))


def mutual_information(prior, ch: ClassicalChannel) -> float:
    """``I(X;Y) = H(Y) - H(Y|X)``."""
    px = _probs(prior)
    if px.size != ch.n_inputs:
        raise ValueError(f"prior has {px.size} letters, channel takes {ch.n_inputs}")
    py = px @ ch.transition
    h_y_given_x = sum(p * shannon_entropy(row / row.sum()) for p, row in zip(px, ch.transition) if p > 0)
    return max(0.0, shannon_entropy(py / py.sum()) - h_y_given_x)


def accessible_info_over(e: Ensemble, measurements: Sequence) -> tuple:
    """Best mutual information over a finite list of measurements.

    Returns ``(bits, index_of_best)``. This is a lower bound on the accessible
    information; no optimisation over all POVMs is attempted.
    """
    if not measurements:
        raise ValueError("need at least one measurement")
    vals = [mutual_information(e.probs, induced_channel(e, m)) for m in measurements]
    best = int(np.argmax(vals))
    return vals[best], best


# -- typical sets ---------------------------------------------------------

@dataclass(frozen=True, eq=False)
class TypicalSet:
    """Weakly typical binary strings of length ``n``.

    ``members`` holds the strings as integers (bit ``n-1-k`` is position
    ``k``); ``strings()`` renders them.
    """

    n: int
    epsilon: float
    entropy: float
    lam: tuple
    members: np.ndarray
    total_prob: float
    complement_prob: float
    typical_counts: np.ndarray

    def strings(self) -> list:
        return [format(int(z), f"0{self.n}b") for z in self.members]

    def __len__(self):
        return int(self.members.size)

    @property
    def size_upper_bound(self) -> float:
        return 2.0 ** (self.n * (self.entropy + self.epsilon))

    @property
    def size_lower_bound(self) -> float:
        return (1 - self.epsilon) * 2.0 ** (self.n * (self.entropy - self.epsilon))


def _count_prob(lam: tuple, n: int, k: int) -> float:
    """Probability of one string with ``k`` ones."""
    l0, l1 = lam
    if (l1 == 0 and k > 0) or (l0 == 0 and k < n):
        return 0.0
    return l0 ** (n - k) * l1 ** k


def typical_counts_mask(lam: Sequence[float], n: int, epsilon: float) -> np.ndarray:
    """``mask[k]`` is True when strings with ``k`` ones satisfy the two-sided bound
    ``2^{-n(S+eps)} <= lambda_z <= 2^{-n(S-eps)}`` (checked in the log domain)."""
    l0, l1 = float(lam[0]), float(lam[1])
    s = shannon_entropy([l0, l1])
    mask = np.zeros(n + 1, dtype=bool)
    for k in range(n + 1):
        if (l1 == 0 and k > 0) or (l0 == 0 and k < n):
            continue
        logp = (n - k) * (math.log2(l0) if n - k else 0.0) + k * (math.log2(l1) if k else 0.0)
        rate = -logp / n
        mask[k] = s - epsilon - 1e-12 <= rate <= s + epsilon + 1e-12
    return mask


def typical_set(lam, n: int, epsilon: float) -> TypicalSet:
    if n > MAX_ENUM_N:
        raise QipkitError(f"n = {n} exceeds the enumeration limit {MAX_ENUM_N}")
    if n < 1 or epsilon <= 0:
        raise ValueError("need n >= 1 and epsilon > 0")
    lam = tuple(float(x) for x in _probs(lam))
    if len(lam) != 2:
        raise ValueError("typical sets are defined here over a binary alphabet")
    mask = typical_counts_mask(lam, n, epsilon)
    z = np.arange(2 ** n, dtype=np.uint32)
    ones = np.zeros(z.size, dtype=np.int64)
    for b in range(n):
        ones += (z >> b) & 1
    members = z[mask[ones]]
    weight = [math.comb(n, k) * _count_prob(lam, n, k) for k in range(n + 1)]
    total = math.fsum(w for k, w in enumerate(weight) if mask[k])
    outside = math.fsum(w for k, w in enumerate(weight) if not mask[k])
    return TypicalSet(
        n, epsilon, shannon_entropy(lam), lam, members, total, outside, np.flatnonzero(mask)
    )


def source_eigensystem(e: Ensemble):
    """Eigenvalues (descending) and eigenvectors of a qubit source's density matrix."""
    if e.dim != 2 or not e.is_pure:
        raise QipkitError("compression is defined for pure single-qubit sources")
    eig = linalg.hermitian_eigen(density_from_ensemble(e).matrix)
    lam = np.clip(eig.eigenvalues[::-1], 0.0, 1.0)
    lam = lam / lam.sum()
    return lam, eig.eigenvectors[:, ::-1]


def typical_subspace(e: Ensemble, n: int, epsilon: float) -> tuple:
    """Typical subspace of ``rho^{(x)n}`` in the product eigenbasis.

    Returns ``(indices, dimension, total_prob)``: ``indices`` are the typical
    strings ``z`` (as integers), ``total_prob = Tr(Pi rho^{(x)n})``.
    """
    lam, _ = source_eigensystem(e)
    ts = typical_set(lam, n, epsilon)
    return ts.members, len(ts), ts.total_prob


def _overlap_table(e: Ensemble) -> np.ndarray:
    _, vecs = source_eigensystem(e)
    table = np.empty((len(e.members), 2))
    for a, (psi, _) in enumerate(e.members):
        for b in range(2):
            table[a, b] = abs(np.vdot(vecs[:, b], psi.amplitudes)) ** 2
    return table


@dataclass(frozen=True)
class CompressionReport:
    n: int
    epsilon: float
    dim: int
    bound_dim: float
    avg_fidelity: float
    bound_fidelity: float
    typical_prob: float
    mode: str
    stderr: float = 0.0


def average_projection_fidelity(
    e: Ensemble,
    n: int,
    epsilon: float,
    mode: str = "exact",
    rng: Optional[np.random.Generator] = None,
    trials: int = 20000,
) -> CompressionReport:
    """Average of ``|<Psi_x|Pi|Psi_x>|^2`` over source strings ``x``.

    ``<Psi_x|Pi|Psi_x> = sum_{z typical} prod_k |<phi_{z_k}|psi_{x_k}>|^2``;
    the compiled kernel evaluates the sum by grouping ``z`` by its number of
    ones, so ``Pi`` is never built. ``exact`` enumerates every ``x``,
    ``monte_carlo`` samples ``trials`` strings from the source.
    """
    lam, _ = source_eigensystem(e)
    ts = typical_set(lam, n, epsilon)
    mask = np.zeros(n + 1, dtype=np.uint8)
    mask[ts.typical_counts] = 1
    table = _overlap_table(e)
    probs = e.probs
    k = len(probs)
    if mode == "exact":
        if k ** n > 2 ** 22:
            raise QipkitError(f"{k}^{n} source strings is too many for exact mode")
        idx = np.arange(k ** n)
        letters = np.empty((idx.size, n), dtype=np.int64)
        rem = idx.copy()
        for pos in range(n - 1, -1, -1):
            letters[:, pos] = rem % k
            rem //= k
        weights = _kernels.typical_weights(letters, table, mask)
        px = np.prod(probs[letters], axis=1)
        avg = math.fsum(px * weights ** 2)
        stderr = 0.0
    elif mode == "monte_carlo":
        if rng is None:
            raise ValueError("monte_carlo mode needs an rng")
        letters = rng.choice(k, size=(trials, n), p=probs)
        weights = np.asarray(_kernels.typical_weights(letters, table, mask)) ** 2
        avg = float(weights.mean())
        stderr = float(weights.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    else:
        raise ValueError(f"mode must be 'exact' or 'monte_carlo', got {mode!r}")
    return CompressionReport(
        n=n,
        epsilon=epsilon,
        dim=len(ts),
        bound_dim=ts.size_upper_bound,
        avg_fidelity=avg,
        bound_fidelity=1 - 2 * ts.complement_prob,
        typical_prob=ts.total_prob,
        mode=mode,
        stderr=stderr,
    )


def psi01_ensemble() -> Ensemble:
    """Equiprobable psi_0/psi_1 pair, pi/3 apart."""
    return Ensemble.uniform(psi01_states())
