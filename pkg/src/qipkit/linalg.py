"""Dense complex matrix kernel.

Matrices are plain ``numpy`` complex arrays. Products and Kronecker products
delegate to numpy; the Hermitian eigensolver is a cyclic Jacobi iteration run
by the compiled core when available (see :mod:`qipkit._kernels`).
"""
from dataclasses import dataclass
from typing import Callable

import numpy as np

from qipkit import _kernels
from qipkit.errors import ConvergenceError, DimensionError, NotHermitianError

ATOL = 1e-10
SOLVER_TOL = 1e-12
MAX_SWEEPS = 100

I2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
for _m in (I2, SIGMA_X, SIGMA_Y, SIGMA_Z):
    _m.flags.writeable = False


def as_matrix(a) -> np.ndarray:
    """Coerce to a finite 2-D complex array."""
    m = np.asarray(a, dtype=complex)
    if m.ndim == 1:
        m = m.reshape(-1, 1)
    if m.ndim != 2:
        raise DimensionError(f"expected a matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def _square(a) -> np.ndarray:
    m = as_matrix(a)
    if m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    return m


@dataclass(frozen=True)
class HermitianEigen:
    """Ascending eigenvalues and matching orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def matmul(a, b) -> np.ndarray:
    a, b = as_matrix(a), as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise DimensionError(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


def kron(a, b) -> np.ndarray:
    return np.kron(as_matrix(a), as_matrix(b))


def kron_all(*factors) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for f in factors:
        out = np.kron(out, as_matrix(f))
    return out


def adjoint(a) -> np.ndarray:
    return as_matrix(a).conj().T


def trace(a) -> complex:
    return complex(np.trace(_square(a)))


def _scale(m: np.ndarray) -> float:
    return max(1.0, float(np.max(np.abs(m)))) if m.size else 1.0


def is_hermitian(a, atol: float = ATOL) -> bool:
    m = as_matrix(a)
    if m.shape[0] != m.shape[1]:
        return False
    return bool(np.max(np.abs(m - m.conj().T), initial=0.0) <= atol * _scale(m))


def is_unitary(a, atol: float = ATOL) -> bool:
    m = as_matrix(a)
    if m.shape[0] != m.shape[1]:
        return False
    return bool(np.allclose(m.conj().T @ m, np.eye(m.shape[0]), rtol=0, atol=atol))


def _fix_phase(v: np.ndarray) -> np.ndarray:
    # first non-negligible component of each column made positive real
    for j in range(v.shape[1]):
        col = v[:, j]
        idx = np.flatnonzero(np.abs(col) > 1e-8)
        if idx.size:
            z = col[idx[0]]
            v[:, j] = col * (abs(z) / z)
    return v


def hermitian_eigen(a, atol: float = ATOL) -> HermitianEigen:
    """Full eigendecomposition of a Hermitian matrix by cyclic Jacobi sweeps.

    The input is symmetrized as ``(A + A^H)/2`` first. Eigenvalues come back
    ascending; each eigenvector's first non-negligible component is made
    real and positive so the output is deterministic.

    Raises:
        NotHermitianError: if ``A`` deviates from Hermitian by more than ``atol``.
        ConvergenceError: if 100 sweeps do not bring the off-diagonal norm
            below ``1e-12`` (relative to ``max(1, ||A||_F)``).
    """
    m = _square(a)
    if not is_hermitian(m, atol):
        raise NotHermitianError("matrix is not Hermitian within tolerance")
    h = 0.5 * (m + m.conj().T)
    tol = SOLVER_TOL * max(1.0, float(np.linalg.norm(h)))
    try:
        w, v, _ = _kernels.jacobi_eigh(np.ascontiguousarray(h), tol, MAX_SWEEPS)
    except RuntimeError as exc:
        raise ConvergenceError(str(exc)) from exc
    order = np.argsort(w, kind="stable")
    w = np.asarray(w)[order]
    v = _fix_phase(np.asarray(v)[:, order].copy())
    w.flags.writeable = False
    v.flags.writeable = False
    return HermitianEigen(w, v)


def eigvalsh(a) -> np.ndarray:
    return hermitian_eigen(a).eigenvalues


def matrix_func(a, f: Callable[[np.ndarray], np.ndarray], clamp: bool = False) -> np.ndarray:
    """Apply ``f`` to the spectrum of a Hermitian matrix: ``sum f(l_i) |u_i><u_i|``.

    ``f`` receives the eigenvalue array and may return complex values. With
    ``clamp=True`` eigenvalues in ``[-1e-10, 0)`` are set to zero first.
    """
    eig = hermitian_eigen(a)
    lam = np.array(eig.eigenvalues)
    if clamp:
        lam[(lam < 0) & (lam >= -ATOL)] = 0.0
    vals = np.asarray(f(lam))
    v = eig.eigenvectors
    return (v * vals) @ v.conj().T


def sqrtm_psd(a) -> np.ndarray:
    """Positive square root of a PSD matrix."""
    def _sqrt(lam):
        if np.any(lam < 0):
            raise ValueError(f"matrix is not PSD (eigenvalue {lam.min():.3e})")
        return np.sqrt(lam)
    return matrix_func(a, _sqrt, clamp=True)


def matrix_abs(a) -> np.ndarray:
    """``|A| = sqrt(A^H A)``."""
    m = _square(a)
    return sqrtm_psd(m.conj().T @ m)


def is_psd(a, atol: float = ATOL) -> bool:
    m = as_matrix(a)
    if not is_hermitian(m, atol):
        return False
    return bool(eigvalsh(m)[0] >= -atol)


def to_debug_text(a) -> str:
    """``"rows cols; re im re im ..."`` in row-major order."""
    m = as_matrix(a)
    pairs = " ".join(f"{float(z.real)!r} {float(z.imag)!r}" for z in m.ravel())
    return f"{m.shape[0]} {m.shape[1]}; {pairs}"


def from_debug_text(text: str) -> np.ndarray:
    head, _, body = text.partition(";")
    rows, cols = (int(t) for t in head.split())
    nums = [float(t) for t in body.split()]
    if len(nums) != 2 * rows * cols:
        raise DimensionError(f"expected {2 * rows * cols} numbers, got {len(nums)}")
    vals = np.array(nums[0::2]) + 1j * np.array(nums[1::2])
    return vals.reshape(rows, cols)
