"""Pure-Python implementations of the hot kernels.

Used when the compiled ``qipkit._core`` extension is not available, or when
``QIPKIT_PURE_PYTHON=1`` is set. Signatures and results match the extension.
"""
import math

import numpy as np


def jacobi_eigh(a, tol, max_sweeps):
    """Cyclic Jacobi diagonalization of a Hermitian matrix.

    Returns ``(eigenvalues, eigenvectors, sweeps)`` with eigenvalues in the
    order they appear on the final diagonal (unsorted). Raises
    ``RuntimeError`` if the off-diagonal norm does not drop below ``tol``
    within ``max_sweeps`` sweeps.
    """
    a = np.array(a, dtype=np.complex128, order="C")
    n = a.shape[0]
    v = np.eye(n, dtype=np.complex128)
    if n < 2:
        return a.diagonal().real.copy(), v, 0

    offdiag = ~np.eye(n, dtype=bool)
    for sweep in range(max_sweeps + 1):
        off = float(np.linalg.norm(a[offdiag]))
        if off < tol:
            return a.diagonal().real.copy(), v, sweep
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag < 1e-300:
                    continue
                app = a[p, p].real
                aqq = a[q, q].real
                theta = (aqq - app) / (2.0 * mag)
                if abs(theta) > 1e150:
                    t = 0.5 / theta  # theta^2 would overflow
                else:
                    t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
                    if theta < 0.0:
                        t = -t
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                ph = apq / mag
                # A <- A G, G = [[c, s*ph], [-s*conj(ph), c]] on (p, q)
                colp = a[:, p].copy()
                colq = a[:, q]
                a[:, p] = c * colp - s * ph.conjugate() * colq
                a[:, q] = s * ph * colp + c * colq
                # A <- G^H A
                rowp = a[p, :].copy()
                rowq = a[q, :]
                a[p, :] = c * rowp - s * ph * rowq
                a[q, :] = s * ph.conjugate() * rowp + c * rowq
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                vp = v[:, p].copy()
                vq = v[:, q]
                v[:, p] = c * vp - s * ph.conjugate() * vq
                v[:, q] = s * ph * vp + c * vq
    raise RuntimeError(f"Jacobi iteration did not converge in {max_sweeps} sweeps (off-diagonal norm {off:.3e})")


def typical_weights(letters, overlap_sq, typical_mask):
    """Per-string weight of the typical-subspace projector.

    For each row ``x`` of ``letters`` (source letters, shape ``(m, n)``) this
    returns ``sum_{z in A} prod_k overlap_sq[x_k, z_k]`` where membership of a
    binary string ``z`` in ``A`` depends only on its number of ones ``j`` and
    is given by ``typical_mask[j]``.
    """
    letters = np.asarray(letters, dtype=np.int64)
    overlap_sq = np.asarray(overlap_sq, dtype=np.float64)
    mask = np.asarray(typical_mask, dtype=bool)
    m, n = letters.shape
    # poly[r, j]: summed product over prefixes of z with j ones
    poly = np.zeros((m, n + 1))
    poly[:, 0] = 1.0
    for k in range(n):
        w0 = overlap_sq[letters[:, k], 0][:, None]
        w1 = overlap_sq[letters[:, k], 1][:, None]
        nxt = poly * w0
        nxt[:, 1:] += poly[:, :-1] * w1
        poly = nxt
    return poly[:, mask].sum(axis=1)
