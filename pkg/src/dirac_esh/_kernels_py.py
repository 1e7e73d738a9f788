"""Pure-Python twins of the compiled kernels in ``_kernels.pyx``.

The reduction performs exactly the same floating-point operations in the same
order as the compiled loop, so both backends give bit-identical means.
"""
import numpy as np


def kahan_mean_rows(values):
    """Mean of every row, accumulated left to right with Kahan compensation."""
    values = np.ascontiguousarray(values, dtype=np.float64)
    n_rows, n_cols = values.shape
    s = np.zeros(n_rows)
    c = np.zeros(n_rows)
    for j in range(n_cols):
        y = values[:, j] - c
        t = s + y
        c = (t - s) - y
        s = t
    return s / n_cols


def jacobi_eigh(a_in, tol=1e-12, max_sweeps=100):
    """Cyclic Jacobi diagonalisation of a complex Hermitian matrix.

    Same contract as the compiled version: ``(eigenvalues, eigenvectors,
    sweeps)``, unsorted, ``sweeps == -1`` on non-convergence.
    """
    a = np.array(a_in, dtype=np.complex128, order="C")
    n = a.shape[0]
    v = np.eye(n, dtype=np.complex128)
    frob = np.sqrt(np.sum(np.abs(a) ** 2))
    if frob == 0.0 or n == 1:
        return np.real(np.diag(a)).copy(), v, 0
    negligible = 1e-18 * frob
    iu = np.triu_indices(n, 1)
    for sweep in range(max_sweeps + 1):
        off = np.sqrt(2.0 * np.sum(np.abs(a[iu]) ** 2))
        if off <= tol * frob:
            return np.real(np.diag(a)).copy(), v, sweep
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq_abs = abs(a[p, q])
                if apq_abs <= negligible:
                    a[p, q] = 0.0
                    a[q, p] = 0.0
                    continue
                e = a[p, q] / apq_abs
                ec = e.conjugate()
                tau = (a[q, q].real - a[p, p].real) / (2.0 * apq_abs)
                if tau >= 0.0:
                    t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                colp = a[:, p].copy()
                colq = a[:, q]
                a[:, p] = c * colp - s * ec * colq
                a[:, q] = s * colp + c * ec * colq
                colp = v[:, p].copy()
                colq = v[:, q]
                v[:, p] = c * colp - s * ec * colq
                v[:, q] = s * colp + c * ec * colq
                rowp = a[p, :].copy()
                rowq = a[q, :]
                a[p, :] = c * rowp - s * e * rowq
                a[q, :] = s * rowp + c * e * rowq
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
    return np.real(np.diag(a)).copy(), v, -1
