# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels. Mirrors ``qipkit._pycore`` exactly."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs

cnp.import_array()

cdef extern from "complex.h" nogil:
    double cabs(double complex)
    double complex conj(double complex)
    double creal(double complex)


cdef double _offdiag_norm(double complex[:, ::1] a, Py_ssize_t n) nogil:
    cdef double acc = 0.0
    cdef double m
    cdef Py_ssize_t i, j
    for i in range(n):
        for j in range(n):
            if i != j:
                m = cabs(a[i, j])
                acc += m * m
    return sqrt(acc)


def jacobi_eigh(a_in, double tol, int max_sweeps):
    cdef double complex[:, ::1] a = np.array(a_in, dtype=np.complex128, order="C")
    cdef Py_ssize_t n = a.shape[0]
    v_arr = np.eye(n, dtype=np.complex128)
    cdef double complex[:, ::1] v = v_arr
    cdef Py_ssize_t p, q, k
    cdef int sweep
    cdef double off = 0.0, mag, app, aqq, theta, t, c, s
    cdef double complex apq, ph, cph, xp, xq

    if n < 2:
        return np.asarray(a).diagonal().real.copy(), v_arr, 0

    with nogil:
        sweep = 0
        while True:
            off = _offdiag_norm(a, n)
            if off < tol or sweep == max_sweeps:
                break
            for p in range(n - 1):
                for q in range(p + 1, n):
                    apq = a[p, q]
                    mag = cabs(apq)
                    if mag < 1e-300:
                        continue
                    app = creal(a[p, p])
                    aqq = creal(a[q, q])
                    theta = (aqq - app) / (2.0 * mag)
                    if fabs(theta) > 1e150:
                        t = 0.5 / theta  # theta^2 would overflow
                    else:
                        t = 1.0 / (fabs(theta) + sqrt(theta * theta + 1.0))
                        if theta < 0.0:
                            t = -t
                    c = 1.0 / sqrt(t * t + 1.0)
                    s = t * c
                    ph = apq / mag
                    cph = conj(ph)
                    for k in range(n):
                        xp = a[k, p]
                        xq = a[k, q]
                        a[k, p] = c * xp - s * cph * xq
                        a[k, q] = s * ph * xp + c * xq
                    for k in range(n):
                        xp = a[p, k]
                        xq = a[q, k]
                        a[p, k] = c * xp - s * ph * xq
                        a[q, k] = s * cph * xp + c * xq
                    a[p, q] = 0.0
                    a[q, p] = 0.0
                    a[p, p] = creal(a[p, p])
                    a[q, q] = creal(a[q, q])
                    for k in range(n):
                        xp = v[k, p]
                        xq = v[k, q]
                        v[k, p] = c * xp - s * cph * xq
                        v[k, q] = s * ph * xp + c * xq
            sweep += 1

    if off >= tol:
        raise RuntimeError(
            f"Jacobi iteration did not converge in {max_sweeps} sweeps (off-diagonal norm {off:.3e})")
    return np.asarray(a).diagonal().real.copy(), v_arr, sweep


def typical_weights(letters_in, overlap_sq_in, typical_mask_in):
    cdef long long[:, ::1] letters = np.ascontiguousarray(letters_in, dtype=np.int64)
    cdef double[:, ::1] ov = np.ascontiguousarray(overlap_sq_in, dtype=np.float64)
    cdef unsigned char[::1] mask = np.ascontiguousarray(typical_mask_in, dtype=np.uint8)
    cdef Py_ssize_t m = letters.shape[0]
    cdef Py_ssize_t n = letters.shape[1]
    out_arr = np.zeros(m, dtype=np.float64)
    cdef double[::1] out = out_arr
    poly_arr = np.zeros(n + 1, dtype=np.float64)
    cdef double[::1] poly = poly_arr
    cdef Py_ssize_t r, k, j
    cdef double w0, w1, acc
    with nogil:
        for r in range(m):
            poly[0] = 1.0
            for j in range(1, n + 1):
                poly[j] = 0.0
            for k in range(n):
                w0 = ov[letters[r, k], 0]
                w1 = ov[letters[r, k], 1]
                for j in range(k + 1, 0, -1):
                    poly[j] = poly[j] * w0 + poly[j - 1] * w1
                poly[0] = poly[0] * w0
            acc = 0.0
            for j in range(n + 1):
                if mask[j]:
                    acc += poly[j]
            out[r] = acc
    return out_arr
