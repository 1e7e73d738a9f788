"""Shared numerical kernels.

Complex Hermitian eigensolver, uniform Brillouin-zone grids with
deterministic compensated reductions, periodic finite differences and 1D
adaptive quadrature.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import integrate, special

from ._backend import kernels
from .errors import ConvergenceError, NotHermitianError, PreconditionError

HERMITIAN_TOL = 1e-12
JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100
# above this dimension "auto" hands the O(n^3)-per-sweep Jacobi loop to LAPACK
JACOBI_MAX_DIM = 64

# default transverse grid size, keyed by the number of traced axes
DEFAULT_TRANSVERSE = {1: 512, 2: 64, 3: 24, 4: 16}


def n_threads() -> int:
    """Worker count for grid-point evaluation (``DIRAC_ESH_THREADS``, default 1)."""
    try:
        return max(1, int(os.environ.get("DIRAC_ESH_THREADS", "1")))
    except ValueError:
        return 1


def check_hermitian(a, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Return ``a`` as a complex square array, raising if it is not Hermitian.

    The tolerance is relative to ``max(1, max|a_ij|)``.
    """
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise NotHermitianError(f"expected a non-empty square matrix, got shape {a.shape}")
    scale = max(1.0, float(np.abs(a).max()))
    dev = float(np.abs(a - a.conj().T).max())
    if dev > tol * scale:
        raise NotHermitianError(
            f"matrix is not Hermitian: max |A - A^dagger| = {dev:.3e} exceeds {tol * scale:.3e}"
        )
    return a


def hermitian_eigh(a, method: str = "auto", tol: float = JACOBI_TOL,
                   max_sweeps: int = JACOBI_MAX_SWEEPS):
    """Eigen-decomposition of a complex Hermitian matrix.

    Parameters
    ----------
    a : array_like, shape (n, n)
    method : {"auto", "jacobi", "lapack"}
        ``"auto"`` runs cyclic Jacobi up to ``JACOBI_MAX_DIM`` and LAPACK
        beyond.
    tol, max_sweeps
        Jacobi stopping rule: off-diagonal Frobenius norm below
        ``tol * ||A||_F``.

    Returns
    -------
    w : ndarray, shape (n,)
        Eigenvalues in ascending order.
    v : ndarray, shape (n, n)
        Orthonormal eigenvectors as columns, ``a @ v[:, i] == w[i] * v[:, i]``.
    """
    a = check_hermitian(a)
    # symmetrise to remove sub-tolerance noise before rotating
    a = 0.5 * (a + a.conj().T)
    if method == "auto":
        method = "jacobi" if a.shape[0] <= JACOBI_MAX_DIM else "lapack"
    if method == "lapack":
        return np.linalg.eigh(a)
    if method != "jacobi":
        raise ValueError(f"unknown eigensolver method {method!r}")
    w, v, sweeps = kernels.jacobi_eigh(np.ascontiguousarray(a), tol, max_sweeps)
    if sweeps < 0:
        raise ConvergenceError(f"Jacobi did not converge in {max_sweeps} sweeps")
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def hermitian_eigvalsh(a, method: str = "auto") -> np.ndarray:
    """Ascending eigenvalues only."""
    return hermitian_eigh(a, method=method)[0]


@dataclass(frozen=True)
class BzGrid:
    """Uniform momentum grid ``k_i = 2*pi*(n_i + offset)/L_i`` over ``[0, 2*pi)``.

    ``offset=0.5`` gives the half-shifted grid that avoids the
    time-reversal-invariant momenta 0 and pi.
    """

    points_per_axis: tuple[int, ...]
    offset: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "points_per_axis", tuple(int(n) for n in self.points_per_axis))
        if any(n < 1 for n in self.points_per_axis):
            raise ValueError(f"grid sizes must be positive, got {self.points_per_axis}")

    @classmethod
    def default(cls, dims: int, offset: float = 0.0) -> "BzGrid":
        if dims == 0:
            return cls((), offset)
        return cls((DEFAULT_TRANSVERSE[dims],) * dims, offset)

    @property
    def dims(self) -> int:
        return len(self.points_per_axis)

    @property
    def size(self) -> int:
        return int(np.prod(self.points_per_axis, dtype=np.int64))

    def axis(self, i: int) -> np.ndarray:
        n = self.points_per_axis[i]
        return 2.0 * np.pi * (np.arange(n) + self.offset) / n

    def spacing(self, i: int) -> float:
        return 2.0 * np.pi / self.points_per_axis[i]

    def mesh(self) -> np.ndarray:
        """Momenta with shape ``(dims, L_1, ..., L_dims)`` (``ij`` indexing)."""
        if self.dims == 0:
            return np.zeros((0,))
        return np.stack(np.meshgrid(*[self.axis(i) for i in range(self.dims)], indexing="ij"))

    def momenta(self) -> np.ndarray:
        """Momenta with shape ``(dims, size)`` in lexicographic order."""
        if self.dims == 0:
            return np.zeros((0, 1))
        return self.mesh().reshape(self.dims, -1)

    def minus_index(self) -> np.ndarray:
        """Flat index of ``-k`` for every flat grid index (requires offset 0)."""
        if self.offset != 0.0:
            raise PreconditionError("-k is only on the grid for unshifted grids")
        idx = np.indices(self.points_per_axis)
        neg = [(-idx[i]) % n for i, n in enumerate(self.points_per_axis)]
        return np.ravel_multi_index(neg, self.points_per_axis).ravel()


def kahan_mean(values, axis: int = -1) -> np.ndarray:
    """Compensated mean along ``axis``, accumulated in index order.

    Complex input is reduced component-wise.  Results are bit-identical
    between runs and between the compiled and pure-Python backends.
    """
    values = np.asarray(values)
    if np.iscomplexobj(values):
        return kahan_mean(values.real, axis) + 1j * kahan_mean(values.imag, axis)
    values = np.moveaxis(np.asarray(values, dtype=np.float64), axis, -1)
    lead = values.shape[:-1]
    flat = np.ascontiguousarray(values.reshape(-1, values.shape[-1]))
    return np.asarray(kernels.kahan_mean_rows(flat)).reshape(lead)


def perp_sum(f, grid: BzGrid):
    """Average ``f`` over every point of ``grid``.

    Parameters
    ----------
    f : callable or array_like
        Either a callable taking momenta of shape ``(dims, npts)`` and
        returning values with trailing axis ``npts``, or the already
        evaluated values with the grid flattened on the last axis.
    grid : BzGrid

    Returns
    -------
    The mean ``(1/prod L_i) sum_k f(k)`` (scalar or array of the leading shape).
    """
    if grid.size < 1:
        raise ValueError("empty grid")
    values = f(grid.momenta()) if callable(f) else np.asarray(f)
    values = np.asarray(values)
    if values.shape[-1] != grid.size:
        raise ValueError(f"last axis has {values.shape[-1]} entries, grid has {grid.size}")
    out = kahan_mean(values, axis=-1)
    return out[()] if out.ndim == 0 else out


def periodic_gradient(field, axis: int, spacing: float | None = None,
                      method: str = "central") -> np.ndarray:
    """Derivative of a periodic field sampled on a uniform grid.

    Parameters
    ----------
    field : ndarray
        Values on the grid; ``axis`` is the momentum axis to differentiate.
    spacing : float, optional
        Grid step, defaults to ``2*pi/L``.
    method : {"central", "spectral"}
        Second-order central difference with wraparound, or FFT
        differentiation (exponentially accurate for analytic fields).
    """
    field = np.asarray(field)
    n = field.shape[axis]
    if n < 3:
        raise PreconditionError(f"periodic_gradient needs at least 3 points per axis, got {n}")
    h = 2.0 * np.pi / n if spacing is None else spacing
    if method == "central":
        return (np.roll(field, -1, axis=axis) - np.roll(field, 1, axis=axis)) / (2.0 * h)
    if method == "spectral":
        freq = 2.0 * np.pi * np.fft.fftfreq(n, d=h)
        if n % 2 == 0:
            freq[n // 2] = 0.0  # Nyquist mode has no odd-symmetric derivative
        shape = [1] * field.ndim
        shape[axis] = n
        deriv = np.fft.ifft(1j * freq.reshape(shape) * np.fft.fft(field, axis=axis), axis=axis)
        return deriv if np.iscomplexobj(field) else deriv.real
    raise ValueError(f"unknown gradient method {method!r}")


def adaptive_quad(f: Callable[[float], float], a: float, b: float,
                  rtol: float = 1e-12, atol: float = 0.0, points: Sequence[float] | None = None):
    """Adaptive Gauss-Kronrod quadrature of a scalar function on ``[a, b]``.

    Returns ``(value, error_estimate)``.
    """
    value, err = integrate.quad(f, a, b, epsabs=atol, epsrel=rtol, limit=500, points=points)
    return value, err


def adaptive_quad_vec(f: Callable[[float], np.ndarray], a: float, b: float,
                      rtol: float = 1e-12, atol: float = 0.0):
    """Vector-valued counterpart of :func:`adaptive_quad`."""
    value, err = integrate.quad_vec(f, a, b, epsabs=atol, epsrel=rtol, limit=2000)
    return np.asarray(value), err


def fermi(energy, temperature):
    """Fermi-Dirac occupation ``1/(exp(E/T) + 1)``; ``T = 0`` gives the step."""
    energy = np.asarray(energy, dtype=float)
    temperature = np.asarray(temperature, dtype=float)
    if np.any(temperature < 0):
        raise PreconditionError("temperature must be non-negative")
    with np.errstate(divide="ignore", invalid="ignore"):
        occ = special.expit(-energy / temperature)
    step = np.where(energy < 0, 1.0, np.where(energy > 0, 0.0, np.nan))
    return np.where(temperature == 0, step, occ)


def arctanh_clamped(x):
    """``0.5*log((1+x)/(1-x))`` with the argument clamped to ``1 - 1e-15``."""
    x = np.minimum(np.asarray(x, dtype=float), 1.0 - 1e-15)
    return 0.5 * (np.log1p(x) - np.log1p(-x))
