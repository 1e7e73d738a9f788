"""Integer invariants of Dirac parents and their ESH descendants.

The degree of the unit map ``d_hat: T^n -> S^n`` is

    nu_n = (1/S_n) int d^n k det[d_hat, d_1 d_hat, ..., d_n d_hat],

with ``S_n = 2 pi^((n+1)/2) / Gamma((n+1)/2)`` the area of the unit
n-sphere.  Columns are ordered (d_hat, derivative along axis 1, ...), which
fixes the orientation convention.  ``n = 0`` uses ``(1 - sgn d_0)/2``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from math import gamma, pi
from typing import Callable, Sequence

import numpy as np

from .entmap import QH4D_CRITICAL, SubsystemSpec, esh, esh_4d_descendants
from .errors import GaplessError, PreconditionError
from .models import DiracModel, qh4d, wti_phase
from .numerics import BzGrid, kahan_mean, periodic_gradient

logger = logging.getLogger(__name__)

ROUNDING_BUDGET = 0.05
GAP_FLOOR = 1e-6
# integration grid per invariant dimension
DEFAULT_INVARIANT_GRID = {1: 400, 2: 100, 3: 40, 4: 16}
# transverse grid for ESH invariants, keyed by the number of traced axes; the
# descendant's topology only needs a gapped, smooth averaged map
ESH_TRANSVERSE = {1: 64, 2: 24, 3: 16, 4: 12}
GAP_THRESHOLD = 1e-3


def sphere_area(n: int) -> float:
    return 2.0 * pi ** ((n + 1) / 2) / gamma((n + 1) / 2)


@dataclass(frozen=True)
class TopoResult:
    """Discretised invariant, its nearest integer and the rounding error."""

    nu_raw: float
    nu: int
    error: float
    n: int
    points_per_axis: int = 0
    refined: bool = False

    @property
    def accepted(self) -> bool:
        return self.error < ROUNDING_BUDGET


def _degree_integral(dhat: np.ndarray, n: int, method: str) -> float:
    h = 2.0 * pi / dhat.shape[1]
    cols = [dhat] + [periodic_gradient(dhat, axis=1 + a, method=method) for a in range(n)]
    mat = np.moveaxis(np.stack(cols, axis=-1), 0, -2)  # (grid..., component, column)
    dets = np.linalg.det(mat).reshape(-1)
    return float(kahan_mean(dets)) * (2.0 * pi) ** n / sphere_area(n)


def _unit_field(dfunc: Callable, n: int, L: int, gap_floor: float) -> np.ndarray:
    mesh = BzGrid((L,) * n).mesh()
    d = np.asarray(dfunc(mesh), dtype=float)
    if d.shape[0] != n + 1:
        raise PreconditionError(f"a degree-{n} map needs {n+1} components, got {d.shape[0]}")
    norm = np.linalg.norm(d, axis=0)
    if norm.min() < gap_floor:
        raise GaplessError(f"|d| = {norm.min():.3e} below the gap floor {gap_floor}")
    return d / norm


def invariant_nu(dfunc: Callable, n: int, L: int | None = None, method: str = "central",
                 refine: bool = True, gap_floor: float = GAP_FLOOR) -> TopoResult:
    """Degree of ``k -> d(k)/|d(k)|`` over the n-torus.

    Parameters
    ----------
    dfunc : callable
        Maps a momentum mesh of shape ``(n, L, ..., L)`` to vectors of shape
        ``(n + 1, L, ..., L)`` (normalisation is done here).  For ``n = 0``
        it is called with an empty array and must return one component.
    n : int
    L : int, optional
        Points per axis, default ``DEFAULT_INVARIANT_GRID[n]``.
    method : {"central", "spectral"}
        Derivative scheme.  Central differences that miss the rounding
        budget are Richardson-extrapolated from grids ``L`` and ``2 L``
        when ``refine`` is set.

    Raises
    ------
    GaplessError
        If ``|d|`` drops below ``gap_floor`` on the grid.
    """
    if n == 0:
        d0 = float(np.asarray(dfunc(np.zeros((0,)))).reshape(-1)[0])
        if abs(d0) < gap_floor:
            raise GaplessError(f"|d_0| = {abs(d0):.3e} below the gap floor")
        nu = int(round((1.0 - np.sign(d0)) / 2.0))
        return TopoResult(float(nu), nu, 0.0, 0)
    L = L or DEFAULT_INVARIANT_GRID[n]
    raw = _degree_integral(_unit_field(dfunc, n, L, gap_floor), n, method)
    refined = False
    if refine and method == "central" and abs(raw - round(raw)) >= ROUNDING_BUDGET:
        fine = _degree_integral(_unit_field(dfunc, n, 2 * L, gap_floor), n, method)
        raw = (4.0 * fine - raw) / 3.0  # O(h^2) error cancels
        refined = True
        logger.debug("Richardson refinement L=%d -> %d gives %.6f", L, 2 * L, raw)
    nu = int(round(raw))
    return TopoResult(raw, nu, abs(raw - nu), n, L, refined)


def esh_dfunc(model: DiracModel, kept: Sequence[int], transverse: BzGrid, n_components: int):
    """Callable for :func:`invariant_nu` from the ESH of ``model`` on the kept axes."""
    spec = SubsystemSpec(tuple(kept), transverse)

    def dfunc(mesh):
        shape = mesh.shape[1:]
        r = esh(model, spec, mesh.reshape(len(kept), -1))
        return r.d[:n_components].reshape((n_components,) + shape)

    return dfunc


def esh_invariant(m: float, d: int, L: int | None = None, transverse: BzGrid | None = None,
                  method: str = "central") -> TopoResult:
    """``nu_d`` of the d-dimensional descendant of the 4D quantum Hall model.

    ``d = 4`` is the parent itself; ``d < 4`` keeps the first ``d`` axes and
    uses only the first ``d + 1`` ESH components.
    """
    if not 0 <= d <= 4:
        raise PreconditionError(f"descendant dimension must be in 0..4, got {d}")
    if any(abs(m - c) < 1e-12 for c in QH4D_CRITICAL):
        raise GaplessError(f"4D parent is gapless at m={m}")
    model = qh4d(m)
    if d == 4:
        return invariant_nu(model.d, 4, L, method)
    if d == 0:
        r = esh_4d_descendants(m, 0, transverse=transverse)
        return invariant_nu(lambda _: r.d[:1, 0], 0)
    transverse = transverse or BzGrid((ESH_TRANSVERSE[4 - d],) * (4 - d), offset=0.5)
    return invariant_nu(esh_dfunc(model, range(d), transverse, d + 1), d, L, method)


# ---------------------------------------------------------------------------
# chiral 2D models

@dataclass(frozen=True)
class WeakIndices:
    nu_x: int
    nu_y: int
    raw: tuple = (0.0, 0.0)


def _winding_phase(q: np.ndarray, axis: int) -> np.ndarray:
    """Winding of a complex loop along ``axis`` by summed wrapped phase steps."""
    step = np.angle(np.roll(q, -1, axis=axis) / q)
    return step.sum(axis=axis) / (2.0 * pi)


def _winding_derivative(q: np.ndarray, axis: int) -> np.ndarray:
    """``-i/(2 pi) int dk Q^-1 dQ/dk`` with spectral derivatives."""
    dq = periodic_gradient(q, axis=axis, method="spectral")
    h = 2.0 * pi / q.shape[axis]
    return (-1j * (dq / q).sum(axis=axis) * h / (2.0 * pi)).real


def weak_indices(model: DiracModel, L: int = 128, method: str = "phase") -> WeakIndices:
    """Direction-resolved windings of ``Q_k = d_x + i d_y`` of a chiral 2D model.

    ``nu_j`` is the winding along ``k_j`` averaged over the other momentum.

    Raises
    ------
    GaplessError
        In the metallic window of the weak-TI stack or whenever ``Q_k``
        vanishes on the grid.
    """
    if model.D != 2:
        raise PreconditionError("weak indices are defined for 2D models")
    if model.name == "wti":
        p = model.params
        if wti_phase(p["t_x"], p["t_x_prime"], p["t_y"]) == "metallic":
            raise GaplessError("weak-TI stack is in its metallic phase")
    d = model.d(BzGrid((L, L)).mesh())
    if np.abs(d[2]).max() > 1e-12:
        raise PreconditionError("model is not chiral (d_z does not vanish)")
    q = d[0] + 1j * d[1]
    if np.abs(q).min() < GAP_FLOOR:
        raise GaplessError("Q_k vanishes on the grid")
    wind = _winding_phase if method == "phase" else _winding_derivative
    if method not in ("phase", "derivative"):
        raise ValueError(f"unknown winding method {method!r}")
    raw_x = float(kahan_mean(wind(q, 0)))
    raw_y = float(kahan_mean(wind(q, 1)))
    return WeakIndices(int(round(raw_x)), int(round(raw_y)), (raw_x, raw_y))


@dataclass(frozen=True)
class EshWinding:
    winding: int
    raw: float
    identically_zero: bool


def esh_winding(model: DiracModel, kept_axis: int, L: int = 128,
                transverse: BzGrid | None = None) -> EshWinding:
    """Winding of ``d_x + i d_y`` of the 1D ESH along the kept axis.

    When the second ESH component vanishes identically the loop lies on
    the real axis and cannot encircle the origin: the winding is zero by
    construction, whether or not the ESH gap closes.
    """
    spec = SubsystemSpec((kept_axis,), transverse or BzGrid((256,), offset=0.5))
    r = esh(model, spec, BzGrid((L,)).momenta())
    if np.abs(r.d[1]).max() < 1e-12:
        return EshWinding(0, 0.0, True)
    q = r.d[0] + 1j * r.d[1]
    if np.abs(q).min() < GAP_FLOOR:
        raise GaplessError("ESH Q_k vanishes on the grid")
    raw = float(_winding_phase(q, 0))
    return EshWinding(int(round(raw)), raw, False)


# ---------------------------------------------------------------------------
# gap scans

def esh_gap(model: DiracModel, spec: SubsystemSpec, kgrid: BzGrid) -> float:
    """``min |d_s|`` over a subsystem momentum grid."""
    return float(esh(model, spec, kgrid.momenta()).norm.min())


def scan_gaps(factory: Callable[[float], DiracModel], kept: Sequence[int], m_values,
              transverse: BzGrid, kgrid: BzGrid | None = None) -> np.ndarray:
    """ESH gap along a one-parameter family; ``nan`` where the parent is gapless.

    ``kgrid`` defaults to four points per kept axis, which contains every
    high-symmetry momentum (0 and pi) where the ESH can close.
    """
    kept = tuple(kept)
    kgrid = kgrid or BzGrid((4,) * len(kept))
    spec = SubsystemSpec(kept, transverse)
    out = np.full(len(m_values), np.nan)
    for i, m in enumerate(m_values):
        model = factory(float(m))
        if model.gap(BzGrid((4,) * model.D)) < 1e-9:
            continue
        if not kept:
            out[i] = float(esh(model, spec, np.zeros((0, 1))).norm[0])
        else:
            out[i] = esh_gap(model, spec, kgrid)
    return out


def find_critical(m_values, gaps, threshold: float = GAP_THRESHOLD) -> list[float]:
    """Gap-closing parameters from a sampled gap curve.

    A sample is critical when it is a local minimum that either dips below
    ``threshold`` or has the V shape of a linear closing between samples
    (``g_i <= (g_{i-1} + g_{i+1}) / 4``).  The location is refined by
    intersecting the two linear flanks.

    Samples marked ``nan`` (parent gapless, ESH undefined) are critical
    when both neighbouring flanks extrapolate linearly to zero there.  A
    closing driven only by a divergent ``F`` (one traced axis) approaches
    zero logarithmically and fails that test.
    """
    m = np.asarray(m_values, dtype=float)
    g = np.asarray(gaps, dtype=float)
    out = []
    for i in range(1, len(m) - 1):
        gl, gi, gr = g[i - 1], g[i], g[i + 1]
        if np.isnan(gi):
            if 2 <= i <= len(m) - 3:
                left = 2.0 * gl - g[i - 2]
                right = 2.0 * gr - g[i + 2]
                if all(np.isfinite([left, right])) and max(abs(left), abs(right)) < max(
                        threshold, 0.1 * min(gl, gr)):
                    out.append(float(m[i]) + 0.0)
            continue
        if not np.all(np.isfinite([gl, gr])):
            continue
        if not (gi < gl and gi <= gr):
            continue
        if gi < threshold or gi <= 0.25 * (gl + gr):
            # flanks through the neighbours of a |m - m_c| closing
            step = m[i + 1] - m[i]
            out.append(round(float(m[i] + step * (gl - gr) / (gl + gr)), 10) + 0.0)
    return out


def gap_scan(D_s: int, m_values=None, transverse: BzGrid | None = None,
             threshold: float = GAP_THRESHOLD) -> list[float]:
    """Critical masses of the ``D_s``-dimensional descendant of the 4D model."""
    if not 1 <= D_s <= 4:
        raise PreconditionError(f"D_s must be in 1..4, got {D_s}")
    if m_values is None:
        m_values = np.round(np.arange(-5.0, 5.0 + 1e-9, 0.01), 10)
    if D_s == 4:
        grid = BzGrid((4,) * 4)
        gaps = [float(np.linalg.norm(qh4d(m).d(grid.momenta()), axis=0).min()) for m in m_values]
        return find_critical(m_values, gaps, threshold)
    transverse = transverse or BzGrid((ESH_TRANSVERSE[4 - D_s],) * (4 - D_s), offset=0.5)
    gaps = scan_gaps(qh4d, range(D_s), m_values, transverse)
    return find_critical(m_values, gaps, threshold)


# ---------------------------------------------------------------------------
# gap-closing inheritance at a decoupled gapless momentum

@dataclass(frozen=True)
class InheritanceCheck:
    status: str  # "pass", "fail" or "inapplicable"
    deviation: float
    reason: str = ""

    @property
    def passed(self) -> bool:
        return self.status == "pass"


def inheritance_check(model: DiracModel, spec: SubsystemSpec, q0, tol: float = 1e-8) -> InheritanceCheck:
    """Check that a gapless point of the decoupled Hamiltonian forces a 1/2 correlation eigenvalue.

    At ``q0`` split ``d = h(q0) + f(k_perp)`` with ``h`` the vector of the
    decoupled subsystem.  The inheritance argument needs ``h(q0) = 0`` and,
    for every component of ``f``, either oddness under ``k_perp -> -k_perp``
    or evenness together with ``f(pi - k_perp) = -f(k_perp)`` at fixed
    ``|f|``.  When those hold the averaged unit vector must vanish; the
    check reports ``"pass"`` if ``|<d_hat>_perp| < tol`` (correlation
    eigenvalue 1/2), ``"fail"`` otherwise and ``"inapplicable"`` when a
    precondition is violated.
    """
    kept, traced, grid = spec.resolve(model.D)
    if any(n % 2 for n in grid.points_per_axis):
        return InheritanceCheck("inapplicable", np.nan, "transverse grid needs an even size per axis")
    q0 = np.asarray(q0, dtype=float).reshape(len(kept), 1)
    h0 = model.restricted_d(kept, q0)[:, 0]
    if np.abs(h0).max() > 1e-12:
        return InheritanceCheck("inapplicable", np.nan, f"decoupled vector h(q0) = {h0.tolist()} is not zero")
    perp = grid.momenta()

    def f_at(kp):
        k = np.empty((model.D, kp.shape[1]))
        for j, ax in enumerate(kept):
            k[ax] = q0[j, 0]
        for j, ax in enumerate(traced):
            k[ax] = kp[j]
        return model.d(k) - h0[:, None]

    f = f_at(perp)
    f_minus = f_at(-perp)
    f_refl = f_at(pi - perp)
    for i in range(model.N):
        odd = np.abs(f_minus[i] + f[i]).max() < 1e-12
        even = np.abs(f_minus[i] - f[i]).max() < 1e-12
        if odd:
            continue
        if not even:
            return InheritanceCheck("inapplicable", np.nan, f"component {i} has no definite parity")
        if np.abs(f_refl[i] + f[i]).max() > 1e-12:
            return InheritanceCheck("inapplicable", np.nan, f"even component {i} is not odd under k -> pi - k")
    if np.abs(np.linalg.norm(f_refl, axis=0) - np.linalg.norm(f, axis=0)).max() > 1e-12:
        return InheritanceCheck("inapplicable", np.nan, "|f| is not invariant under k -> pi - k")
    r = esh(model, spec, q0)
    dev = float(r.x[0])
    return InheritanceCheck("pass" if dev < tol else "fail", dev)
