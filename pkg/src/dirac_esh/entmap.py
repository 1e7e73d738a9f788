"""Transverse averaging and the entanglement-temperature map.

For a Dirac ground state the correlation block of a subsystem that keeps
the momentum axes ``k_s`` is ``(1 - <d/|d|>_perp . Gamma) / 2``.  Writing
``<d/|d|>_perp = F d_s`` with ``F = <1/|d|>_perp`` identifies ``d_s`` as the
effective subsystem Hamiltonian (ESH) and fixes a momentum-resolved
temperature through ``F |d_s| = tanh(|d_s| / 2T)``.
"""
from __future__ import annotations

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import DecoupledLimitWarning, GaplessError, PreconditionError
from .models import DiracModel, qh4d
from .numerics import BzGrid, adaptive_quad, adaptive_quad_vec, arctanh_clamped, kahan_mean, n_threads

# fibers with min |d| below this are treated as gapless
GAP_FLOOR = 1e-9
# F |d_s| at or above this is the decoupled (pure-state) limit, reported as T = 0
DECOUPLED_X = 1.0 - 1e-12
# max number of (k_s, k_perp) pairs evaluated in one vectorised block
_CHUNK = 1 << 21


@dataclass(frozen=True)
class SubsystemSpec:
    """Which momentum axes survive and how the traced ones are sampled.

    Parameters
    ----------
    kept_axes : tuple of int
        Zero-based axes of the subsystem momentum ``k_s``.
    transverse : BzGrid, optional
        Grid over the traced axes (in increasing axis order).  Defaults to
        the per-dimension sizes in ``numerics.DEFAULT_TRANSVERSE``.
    """

    kept_axes: tuple
    transverse: BzGrid | None = None

    def resolve(self, D: int) -> tuple:
        kept = tuple(int(a) for a in self.kept_axes)
        if len(set(kept)) != len(kept) or any(not 0 <= a < D for a in kept):
            raise PreconditionError(f"kept axes {kept} invalid for a {D}D model")
        if len(kept) >= D:
            raise PreconditionError("subsystem must trace out at least one axis")
        traced = tuple(a for a in range(D) if a not in kept)
        grid = self.transverse or BzGrid.default(len(traced))
        if grid.dims != len(traced):
            raise PreconditionError(f"transverse grid has {grid.dims} axes, {len(traced)} are traced")
        return kept, traced, grid


@dataclass(frozen=True, eq=False)
class EshResult:
    """ESH record for a set of subsystem momenta (last axis of every array).

    Attributes
    ----------
    k_s : ndarray (D_s, P)
    d : ndarray (N, P)
        ESH vector ``d_s = <d/|d|>_perp / F``.
    F : ndarray (P,)
        ``<1/|d|>_perp``.
    delta_m : ndarray (P,)
        Restricted (decoupled) mass component minus the ESH mass component.
    T : ndarray (P,)
        Entanglement temperature, 0 where ``clamped``.
    clamped : ndarray of bool (P,)
        ``F |d_s|`` reached the decoupled limit.
    """

    k_s: np.ndarray
    d: np.ndarray
    F: np.ndarray
    delta_m: np.ndarray
    T: np.ndarray
    clamped: np.ndarray

    @property
    def beta(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return 1.0 / self.T

    @property
    def norm(self) -> np.ndarray:
        """``|d_s|`` per point."""
        return np.linalg.norm(self.d, axis=0)

    @property
    def x(self) -> np.ndarray:
        """``F |d_s| = |<d/|d|>_perp|``, the correlation-spectrum half-width."""
        return self.F * self.norm

    def __len__(self) -> int:
        return self.F.shape[0]

    def point(self, i: int) -> "EshResult":
        sl = slice(i, i + 1)
        return EshResult(self.k_s[:, sl], self.d[:, sl], self.F[sl], self.delta_m[sl],
                         self.T[sl], self.clamped[sl])


def temperature_from(F, dnorm):
    """Invert ``F = tanh(|d| / 2T) / |d|`` for ``T``; returns ``(T, clamped)``.

    Uses ``T = (1/2F) x / artanh(x)`` with ``x = F |d|`` so ``|d| -> 0`` is
    regular (``T -> 1/2F``).
    """
    F = np.asarray(F, dtype=float)
    x = F * np.asarray(dnorm, dtype=float)
    clamped = x >= DECOUPLED_X
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(x > 1e-8, x / arctanh_clamped(x), 1.0 - x * x / 3.0)
    T = np.where(clamped, 0.0, ratio / (2.0 * F))
    return T, clamped


def _lattice_average(model: DiracModel, kept, traced, grid: BzGrid, k_s: np.ndarray):
    """``(<d/|d|>, <1/|d|>)`` at every column of ``k_s`` by an explicit grid sum."""
    perp = grid.momenta()
    P, Q = k_s.shape[1], perp.shape[1]
    step = max(1, _CHUNK // max(Q, 1))
    chunks = [slice(i, min(i + step, P)) for i in range(0, P, step)]

    def work(sl):
        n = sl.stop - sl.start
        k = np.empty((model.D, n, Q))
        for j, ax in enumerate(kept):
            k[ax] = k_s[j, sl, None]
        for j, ax in enumerate(traced):
            k[ax] = perp[j, None, :]
        d = model.d(k)
        norm = np.linalg.norm(d, axis=0)
        fiber_min = norm.min(axis=1)
        if np.any(fiber_min < GAP_FLOOR):
            bad = int(np.argmin(fiber_min)) + sl.start
            raise GaplessError(
                f"transverse fiber at k_s={k_s[:, bad].tolist()} is gapless (min |d| = {fiber_min.min():.3e})"
            )
        stacked = np.concatenate([d / norm, (1.0 / norm)[None]], axis=0)
        return kahan_mean(stacked, axis=-1)

    threads = n_threads()
    if threads > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(threads) as pool:
            parts = list(pool.map(work, chunks))
    else:
        parts = [work(sl) for sl in chunks]
    avg = np.concatenate(parts, axis=1)
    return avg[:-1], avg[-1]


def _continuum_average(model: DiracModel, kept, traced, k_s: np.ndarray):
    """Same averages for a cutoff continuum model by adaptive quadrature."""
    if len(traced) != 1:
        raise PreconditionError("continuum averaging is implemented for one traced axis")
    lam = model.cutoff
    out_u = np.empty((model.N, k_s.shape[1]))
    out_f = np.empty(k_s.shape[1])
    for p in range(k_s.shape[1]):
        def integrand(q, p=p):
            k = np.zeros((model.D, 1))
            for j, ax in enumerate(kept):
                k[ax] = k_s[j, p]
            k[traced[0]] = q
            d = model.d(k)[:, 0]
            nrm = np.linalg.norm(d)
            return np.concatenate([d / nrm, [1.0 / nrm]])

        val, _ = adaptive_quad_vec(integrand, -lam, lam, rtol=1e-12, atol=1e-14)
        val = val / (2.0 * lam)
        out_u[:, p] = val[:-1]
        out_f[p] = val[-1]
    return out_u, out_f


def esh(model: DiracModel, spec: SubsystemSpec, k_s) -> EshResult:
    """ESH vector, F, mass shift and temperature at subsystem momenta ``k_s``.

    Parameters
    ----------
    model : DiracModel
    spec : SubsystemSpec
    k_s : array_like
        Shape ``(D_s,)`` for one point or ``(D_s, P)`` for several.

    Raises
    ------
    GaplessError
        If ``|d|`` (numerically) vanishes on a traced fiber.
    """
    kept, traced, grid = spec.resolve(model.D)
    k_s = np.asarray(k_s, dtype=float)
    if k_s.ndim == 1:
        k_s = k_s.reshape(len(kept), -1) if len(kept) else np.zeros((0, 1))
    if k_s.shape[0] != len(kept):
        raise PreconditionError(f"k_s has {k_s.shape[0]} components, subsystem keeps {len(kept)}")
    if model.kind == "continuum":
        u, F = _continuum_average(model, kept, traced, k_s)
    else:
        u, F = _lattice_average(model, kept, traced, grid, k_s)
    d_s = u / F
    T, clamped = temperature_from(F, np.linalg.norm(d_s, axis=0))
    try:
        naive = model.restricted_d(kept, k_s)[model.mass_index]
        delta_m = naive - d_s[model.mass_index]
    except PreconditionError:
        delta_m = np.full(F.shape, np.nan)
    return EshResult(k_s, d_s, F, delta_m, T, clamped)


def esh_grid(model: DiracModel, spec: SubsystemSpec, grid: BzGrid) -> EshResult:
    """:func:`esh` on every point of a subsystem momentum grid (lexicographic order)."""
    return esh(model, spec, grid.momenta())


def constant_temperature(result: EshResult) -> float:
    """Arithmetic mean of ``T(k_s)`` over the points of ``result``.

    Warns with :class:`DecoupledLimitWarning` when any point was clamped.
    """
    if np.any(result.clamped):
        warnings.warn(
            f"{int(result.clamped.sum())} momenta reached the decoupled limit (T clamped to 0)",
            DecoupledLimitWarning, stacklevel=2,
        )
    if not np.all(np.isfinite(result.T)):
        raise PreconditionError("temperature field is not finite")
    return float(kahan_mean(result.T))


def continuum_temperature(k_x: float, m: float, cutoff: float):
    """Closed-form and quadrature temperatures of the 2D -> 1D continuum Dirac ESH.

    Returns
    -------
    closed : float
        ``cutoff / (2 ln(2 cutoff / sqrt(k_x^2 + m^2)))``.
    reference : float
        ``|d_1| / (2 artanh(F |d_1|))`` with ``F`` from adaptive quadrature
        of ``<1/|d|>`` over ``[-cutoff, cutoff]``.
    """
    if m == 0:
        raise PreconditionError("continuum Dirac model needs |m| > 0")
    a = float(np.hypot(k_x, m))
    if cutoff < 10.0 * a:
        raise PreconditionError(f"cutoff {cutoff} must be at least 10*sqrt(k_x^2+m^2) = {10*a}")
    closed = cutoff / (2.0 * np.log(2.0 * cutoff / a))
    integral, _ = adaptive_quad(lambda q: 1.0 / np.sqrt(q * q + a * a), -cutoff, cutoff, rtol=1e-13)
    F = integral / (2.0 * cutoff)
    ref, _ = temperature_from(F, a)
    return float(closed), float(ref)


QH4D_CRITICAL = (-4.0, -2.0, 0.0, 2.0, 4.0)


def esh_4d_descendants(m: float, D_s: int, grid: BzGrid | None = None,
                       transverse: BzGrid | None = None) -> EshResult:
    """ESH of the 4D quantum Hall model keeping the first ``D_s`` axes.

    ``D_s = 0`` traces everything and returns a single record.
    """
    if not 0 <= D_s <= 3:
        raise PreconditionError(f"D_s must be in 0..3, got {D_s}")
    if any(abs(m - c) < 1e-12 for c in QH4D_CRITICAL):
        raise GaplessError(f"4D parent is gapless at m={m}")
    spec = SubsystemSpec(tuple(range(D_s)), transverse)
    model = qh4d(m)
    if D_s == 0:
        return esh(model, spec, np.zeros((0, 1)))
    grid = grid or BzGrid((16,) * D_s)
    return esh_grid(model, spec, grid)

