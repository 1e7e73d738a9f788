# cython: language_level=3
"""Compiled hot loops: compensated reductions and the cyclic Jacobi eigensolver.

Every routine here has a line-for-line twin in ``_kernels_py``; the two must
produce identical reductions (bitwise) and eigenpairs within tolerance.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, hypot

cnp.import_array()


def kahan_mean_rows(double[:, ::1] values):
    """Mean of every row, accumulated left to right with Kahan compensation."""
    cdef Py_ssize_t n_rows = values.shape[0]
    cdef Py_ssize_t n_cols = values.shape[1]
    cdef Py_ssize_t i, j
    cdef double s, c, y, t
    out = np.empty(n_rows, dtype=np.float64)
    cdef double[::1] res = out
    for i in range(n_rows):
        s = 0.0
        c = 0.0
        for j in range(n_cols):
            y = values[i, j] - c
            t = s + y
            c = (t - s) - y
            s = t
        res[i] = s / n_cols
    return out


cdef inline double cabs2(double complex z) nogil:
    return z.real * z.real + z.imag * z.imag


def jacobi_eigh(double complex[:, ::1] a_in, double tol=1e-12, int max_sweeps=100):
    """Cyclic Jacobi diagonalisation of a complex Hermitian matrix.

    Returns ``(eigenvalues, eigenvectors, sweeps)`` with eigenvalues in the
    order they sit on the final diagonal (unsorted).  ``sweeps`` is -1 when
    the off-diagonal norm did not drop below ``tol * ||A||_F``.
    """
    cdef Py_ssize_t n = a_in.shape[0]
    a_arr = np.array(a_in, dtype=np.complex128, order="C")
    v_arr = np.eye(n, dtype=np.complex128)
    cdef double complex[:, ::1] a = a_arr
    cdef double complex[:, ::1] v = v_arr
    cdef Py_ssize_t p, q, k
    cdef int sweep
    cdef double frob = 0.0, off, apq_abs, tau, t, c, s, negligible
    cdef double complex e, ec, sec, cec, se, ce, akp, akq, apk, aqk
    for p in range(n):
        for q in range(n):
            frob += cabs2(a[p, q])
    frob = sqrt(frob)
    # entries this small cannot move any eigenvalue at double precision
    negligible = 1e-18 * frob
    if frob == 0.0 or n == 1:
        return np.real(np.diag(a_arr)).copy(), v_arr, 0
    for sweep in range(max_sweeps + 1):
        off = 0.0
        for p in range(n):
            for q in range(p + 1, n):
                off += cabs2(a[p, q])
        off = sqrt(2.0 * off)
        if off <= tol * frob:
            return np.real(np.diag(a_arr)).copy(), v_arr, sweep
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq_abs = hypot(a[p, q].real, a[p, q].imag)
                if apq_abs <= negligible:
                    a[p, q] = 0.0
                    a[q, p] = 0.0
                    continue
                e = a[p, q] / apq_abs
                ec = e.conjugate()
                tau = (a[q, q].real - a[p, p].real) / (2.0 * apq_abs)
                if tau >= 0.0:
                    t = 1.0 / (tau + sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + sqrt(1.0 + tau * tau))
                c = 1.0 / sqrt(1.0 + t * t)
                s = t * c
                sec = s * ec
                cec = c * ec
                se = s * e
                ce = c * e
                # columns: A <- A U with U = diag(1, e*) R(theta)
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = c * akp - sec * akq
                    a[k, q] = s * akp + cec * akq
                    akp = v[k, p]
                    akq = v[k, q]
                    v[k, p] = c * akp - sec * akq
                    v[k, q] = s * akp + cec * akq
                # rows: A <- U^dagger A
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = c * apk - se * aqk
                    a[q, k] = s * apk + ce * aqk
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
    return np.real(np.diag(a_arr)).copy(), v_arr, -1
