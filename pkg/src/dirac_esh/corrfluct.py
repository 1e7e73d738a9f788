"""Correlation matrices, entanglement spectra, number fluctuations and time correlations.

Convention: the stored correlation matrix is ``C_ij = <c_i^dag c_j>^*``,
the transpose of the more common ``<c_i^dag c_j>``.  At half filling it is
the restriction of the filled-band projector ``sum_{E<0} |psi><psi|`` to
the subsystem rows and columns.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .clifford import CliffordRep
from .entmap import EshResult, SubsystemSpec, esh
from .errors import AmbiguousFillingError, GaplessError, PreconditionError
from .models import DiracModel, LatticeGeometry, realspace_hamiltonian
from .numerics import BzGrid, fermi, hermitian_eigh, kahan_mean

# |E| below this counts as a zero mode of a finite Hamiltonian
ZERO_MODE_TOL = 1e-12
# entanglement Hamiltonian needs xi at least this far from 0 and 1
EH_EDGE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class CorrelationMatrix:
    """Correlation matrix or a stack of momentum blocks ``(..., M, M)``.

    ``context`` is ``"momentum"`` for per-``k_s`` blocks and ``"real-space"``
    for a subsystem of lattice sites.
    """

    matrix: np.ndarray
    context: str = "real-space"

    def spectrum(self) -> np.ndarray:
        """Sorted eigenvalues, shape ``(..., M)``."""
        return np.linalg.eigvalsh(self.matrix)

    def validate(self, tol: float = 1e-10) -> "CorrelationMatrix":
        m = self.matrix
        if np.abs(m - np.swapaxes(m, -1, -2).conj()).max() > tol:
            raise PreconditionError("correlation matrix is not Hermitian")
        xi = self.spectrum()
        if xi.min() < -tol or xi.max() > 1 + tol:
            raise PreconditionError(f"correlation spectrum [{xi.min():.3e}, {xi.max():.3e}] leaves [0, 1]")
        return self


def corr_momentum(result: EshResult, rep: CliffordRep) -> CorrelationMatrix:
    """Subsystem blocks ``(1 - F d_s . Gamma) / 2`` for every point of ``result``."""
    if np.any(result.x > 1.0 + 1e-12):
        raise PreconditionError("F |d_s| exceeds 1")
    u = result.F[None, :] * result.d
    eye = np.eye(rep.dim)
    return CorrelationMatrix(0.5 * (eye - rep.dot(u)), "momentum")


def thermal_corr(d, T, rep: CliffordRep) -> CorrelationMatrix:
    """Thermal correlation blocks of ``H = d . Gamma`` at temperature ``T``.

    ``(1/2) sum_eta (1 + eta d_hat . Gamma) n_F(eta |d|)``; ``d`` has shape
    ``(N,)`` or ``(N, P)``, ``T`` is a scalar or broadcasts against ``P``.
    ``T = 0`` gives the negative-band projector.
    """
    d = np.asarray(d, dtype=float)
    single = d.ndim == 1
    d = d.reshape(d.shape[0], -1)
    T = np.broadcast_to(np.asarray(T, dtype=float), d.shape[1:])
    norm = np.linalg.norm(d, axis=0)
    if np.any((T == 0) & (norm == 0)):
        raise PreconditionError("occupation is undefined for |d| = 0 at T = 0")
    n_plus = fermi(norm, T)
    n_minus = fermi(-norm, T)
    with np.errstate(invalid="ignore", divide="ignore"):
        dhat = np.where(norm > 0, d / np.where(norm > 0, norm, 1.0), 0.0)
    eye = np.eye(rep.dim)
    c = 0.5 * ((n_plus + n_minus)[:, None, None] * eye
               + (n_plus - n_minus)[:, None, None] * rep.dot(dhat))
    return CorrelationMatrix(c[0] if single else c, "momentum")


def _filled_projector(h: np.ndarray) -> np.ndarray:
    w, v = hermitian_eigh(h)
    if np.abs(w).min() < ZERO_MODE_TOL:
        raise AmbiguousFillingError(
            f"finite Hamiltonian has a zero mode (|E| = {np.abs(w).min():.3e}); half filling is ambiguous"
        )
    occ = v[:, w < 0]
    return occ @ occ.conj().T


def _orbital_index(site_idx: np.ndarray, dim: int) -> np.ndarray:
    return (site_idx[:, None] * dim + np.arange(dim)[None, :]).ravel()


def realspace_corr(model: DiracModel, geom: LatticeGeometry) -> CorrelationMatrix:
    """Half-filled ground-state correlation matrix restricted to ``geom.subsystem``.

    Full diagonalisation of the finite Hamiltonian.  Rows are ordered by the
    subsystem site list, orbital fastest.

    Raises
    ------
    AmbiguousFillingError
        If the finite Hamiltonian has an eigenvalue within ``1e-12`` of zero.
    """
    if not geom.subsystem:
        raise PreconditionError("geometry has an empty subsystem")
    proj = _filled_projector(realspace_hamiltonian(model, geom))
    idx = _orbital_index(geom.site_index(geom.subsystem), model.rep.dim)
    return CorrelationMatrix(proj[np.ix_(idx, idx)], "real-space")


def strip_corr(model: DiracModel, geom: LatticeGeometry, axis: int) -> CorrelationMatrix:
    """Same as :func:`realspace_corr` using Bloch decomposition along a periodic axis.

    The lattice is diagonalised one momentum ``k = 2 pi n / L_axis`` at a
    time, so the cost is ``L_axis`` diagonalisations of size
    ``dim * n_sites / L_axis`` instead of one of size ``dim * n_sites``.
    """
    if geom.boundary[axis] != "periodic":
        raise PreconditionError(f"axis {axis} must be periodic for a Bloch decomposition")
    if not geom.subsystem:
        raise PreconditionError("geometry has an empty subsystem")
    dim = model.rep.dim
    L = geom.sizes[axis]
    sub = np.asarray(geom.subsystem, dtype=int)
    along = sub[:, axis]
    rest = sub.copy()
    rest[:, axis] = 0
    reduced_sizes = list(geom.sizes)
    reduced_sizes[axis] = 1
    rest_idx = _orbital_index(np.ravel_multi_index(rest.T, reduced_sizes), dim)
    along_orb = np.repeat(along, dim)
    out = np.zeros((len(rest_idx), len(rest_idx)), dtype=complex)
    for n in range(L):
        k = 2.0 * np.pi * n / L
        proj = _filled_projector(realspace_hamiltonian(model, geom, bloch=(axis, k)))
        phase = np.exp(1j * k * (along_orb[:, None] - along_orb[None, :]))
        out += phase * proj[np.ix_(rest_idx, rest_idx)]
    return CorrelationMatrix(out / L, "real-space")


def segment_corr(model: DiracModel, spec: SubsystemSpec, L: int, sites) -> CorrelationMatrix:
    """Real-space correlation of a finite segment of a 1D subsystem.

    The subsystem keeps one axis of an ``L``-periodic lattice whose traced
    axes are sampled by ``spec.transverse``; ``sites`` lists the kept-axis
    coordinates of the segment.  Built from the momentum blocks by
    ``C_xx' = (1/L) sum_k exp(i k (x - x')) C(k)``.
    """
    kept, _, _ = spec.resolve(model.D)
    if len(kept) != 1:
        raise PreconditionError("segment correlations need a one-dimensional subsystem")
    grid = BzGrid((L,))
    blocks = corr_momentum(esh(model, spec, grid.momenta()), model.rep).matrix
    x = np.asarray(sites, dtype=float)
    k = grid.axis(0)
    phase = np.exp(1j * (x[:, None, None] - x[None, :, None]) * k[None, None, :]) / L
    c = np.einsum("xyk,kab->xayb", phase, blocks)
    n = len(x) * model.rep.dim
    return CorrelationMatrix(c.reshape(n, n), "real-space")


def particle_variance(c: CorrelationMatrix) -> float:
    """``Delta N^2 = Tr[C (1 - C)] = sum_i xi_i (1 - xi_i)``, summed over all blocks."""
    m = np.asarray(c.matrix if isinstance(c, CorrelationMatrix) else c)
    tr = np.trace(m, axis1=-2, axis2=-1).real
    sq = np.sum(np.abs(m) ** 2, axis=(-2, -1))
    return float(max(0.0, np.sum(tr - sq)))


def variance_from_x(x, dim: int) -> float:
    """Block variance from ``x = F |d_s|``: each block has eigenvalues ``(1 +- x)/2``."""
    x = np.asarray(x, dtype=float)
    return float(np.sum(0.25 * dim * (1.0 - x * x)))


def entanglement_hamiltonian(c: CorrelationMatrix) -> np.ndarray:
    """``H_E = ln((1 - C) / C)`` through the eigendecomposition of ``C``.

    Raises
    ------
    PreconditionError
        If an eigenvalue lies within ``1e-12`` of 0 or 1.
    """
    m = np.asarray(c.matrix if isinstance(c, CorrelationMatrix) else c)
    if m.ndim != 2:
        return np.stack([entanglement_hamiltonian(CorrelationMatrix(b)) for b in m])
    w, v = hermitian_eigh(m)
    if w.min() < EH_EDGE_TOL or w.max() > 1.0 - EH_EDGE_TOL:
        raise PreconditionError("correlation eigenvalue at 0 or 1: entanglement energy is infinite")
    eps = np.log1p(-w) - np.log(w)
    return (v * eps) @ v.conj().T


def correlation_spectrum(result: EshResult, rep: CliffordRep) -> np.ndarray:
    """Rows ``(point, xi, E, n_F(E; T))`` pairing each block eigenvalue with its ESH level.

    The eigenvalue ``(1 - x)/2`` belongs to ``E = +|d_s|`` and ``(1 + x)/2``
    to ``E = -|d_s|``; each appears ``dim/2`` times.
    """
    norm = result.norm
    x = result.x
    rows = []
    for p in range(len(result)):
        for sign in (+1.0, -1.0):
            E = sign * norm[p]
            xi = 0.5 * (1.0 - sign * x[p])
            occ = float(fermi(E, result.T[p])) if not result.clamped[p] else float(E < 0)
            rows.extend([(p, xi, E, occ)] * (rep.dim // 2))
    return np.asarray(rows, dtype=float)


# ---------------------------------------------------------------------------
# time-dependent correlations

def _fiber(model: DiracModel, spec: SubsystemSpec, k_s):
    kept, traced, grid = spec.resolve(model.D)
    k_s = np.asarray(k_s, dtype=float).reshape(len(kept))
    perp = grid.momenta()
    k = np.empty((model.D, perp.shape[1]))
    for j, ax in enumerate(kept):
        k[ax] = k_s[j]
    for j, ax in enumerate(traced):
        k[ax] = perp[j]
    d = model.d(k)
    norm = np.linalg.norm(d, axis=0)
    if norm.min() < 1e-9:
        raise GaplessError(f"transverse fiber at k_s={k_s.tolist()} is gapless")
    return d, norm


def time_corr(model: DiracModel, spec: SubsystemSpec, k_s, t: float) -> np.ndarray:
    """``C(t) = < (1 - d_hat . Gamma)/2 * exp(i |d| t) >_perp`` at one ``k_s``.

    Each filled band of energy ``-|d|`` contributes the phase
    ``exp(-i E t)``.  The result is a complex matrix, generally not
    Hermitian for ``t != 0``; ``t = 0`` gives the static block.
    """
    d, norm = _fiber(model, spec, k_s)
    dhat = d / norm
    phase = np.exp(1j * norm * t)
    coeff = np.concatenate([phase[None], -(dhat * phase)], axis=0)
    avg = kahan_mean(coeff, axis=-1)
    return 0.5 * (avg[0] * np.eye(model.rep.dim) + model.rep.dot(avg[1:]))


def thermal_time_corr(d, T: float, rep: CliffordRep, t: float) -> np.ndarray:
    """Time correlation of the thermal ESH state: ``sum_eta P_eta n_F(eta |d|) exp(-i eta |d| t)``."""
    d = np.asarray(d, dtype=float)
    norm = float(np.linalg.norm(d))
    if norm == 0:
        return 0.5 * np.eye(rep.dim, dtype=complex)
    dhat = rep.dot(d / norm)
    eye = np.eye(rep.dim)
    out = np.zeros((rep.dim, rep.dim), dtype=complex)
    for eta in (1.0, -1.0):
        occ = float(fermi(eta * norm, T)) if T > 0 else float(eta < 0)
        out += 0.5 * (eye + eta * dhat) * occ * np.exp(-1j * eta * norm * t)
    return out


def transverse_bandwidth(model: DiracModel, spec: SubsystemSpec, k_s) -> float:
    """``max |d| - min |d|`` over the traced fiber at ``k_s``."""
    _, norm = _fiber(model, spec, k_s)
    return float(norm.max() - norm.min())


def time_departure(model: DiracModel, spec: SubsystemSpec, k_s, t: float) -> float:
    """Operator-norm distance between ``C(t)`` and the ESH thermal evolution at the same ``t``."""
    r = esh(model, spec, np.asarray(k_s, dtype=float).reshape(-1, 1))
    c_t = time_corr(model, spec, k_s, t)
    c_th = thermal_time_corr(r.d[:, 0], float(r.T[0]), model.rep, t)
    return float(np.linalg.norm(c_t - c_th, ord=2))


def chain_variance(model: DiracModel, spec: SubsystemSpec, L: int) -> tuple[float, float, float]:
    """Number variance of an ``L``-site periodic 1D subsystem.

    Returns ``(exact, thermal, T_mean)``: the exact subsystem value, the
    value of the ESH at the single temperature ``T_mean`` (mean of
    ``T(k)``), and that temperature.
    """
    r = esh(model, spec, BzGrid((L,)).momenta())
    dim = model.rep.dim
    T_mean = float(kahan_mean(r.T))
    if T_mean > 0:
        x_th = np.tanh(r.norm / (2.0 * T_mean))
    else:
        x_th = np.ones_like(r.norm)
    return variance_from_x(r.x, dim), variance_from_x(x_th, dim), T_mean
