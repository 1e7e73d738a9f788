"""Model zoo: QWZ, 4D quantum Hall, weak-TI stack of SSH chains, continuum Dirac.

A lattice model is written as ``d(k) = sum_R c_R exp(i k.R)`` with complex
N-vectors ``c_R`` (``c_{-R} = conj(c_R)``), which gives the Bloch vector, the
finite real-space Hamiltonian and the subsystem-restricted ("decoupled")
vector from one table.  Energies are measured in units of ``t_x = 1``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .clifford import CliffordRep, build_gammas, pauli_rep
from .errors import PreconditionError
from .numerics import BzGrid, check_hermitian


@dataclass(frozen=True, eq=False)
class DiracModel:
    """Dirac-form Hamiltonian ``H(k) = d(k) . Gamma`` on a D-dimensional domain.

    Attributes
    ----------
    name, D, rep
        Label, spatial dimension and Clifford representation.
    params : dict
        Named parameters (``m``, ``t_x``, ``t_y``, ``t_x_prime``, ``cutoff``).
    terms : tuple of (R, c_R)
        Fourier table of a lattice model, ``None`` for continuum or custom models.
    mass_index : int
        Component whose shift under transverse averaging is reported as ``delta_m``.
    kind : {"lattice", "continuum"}
    cutoff : float, optional
        Momentum cutoff ``Lambda`` of a continuum model, domain ``[-Lambda, Lambda]^D``.
    """

    name: str
    D: int
    rep: CliffordRep
    params: dict = field(default_factory=dict)
    terms: tuple | None = None
    mass_index: int = 0
    kind: str = "lattice"
    cutoff: float | None = None
    dfunc: Callable | None = None

    @property
    def N(self) -> int:
        return self.rep.N

    def d(self, k) -> np.ndarray:
        """Dirac vector for momenta ``k`` of shape ``(D, ...)``; returns ``(N, ...)``."""
        k = np.asarray(k, dtype=float)
        if k.shape[0] != self.D:
            raise ValueError(f"{self.name} needs {self.D} momentum components, got {k.shape[0]}")
        if self.dfunc is not None:
            return np.asarray(self.dfunc(k), dtype=float)
        return fourier_sum(self.terms, k, self.N)

    def bloch(self, k) -> np.ndarray:
        """Bloch matrices ``(..., dim, dim)`` for momenta ``(D, ...)``."""
        return self.rep.dot(self.d(k))

    def restricted_d(self, kept_axes: Sequence[int], k_s) -> np.ndarray:
        """Vector with every hopping that leaves the subsystem removed.

        This is the lower-dimensional Hamiltonian ``h(k_s)`` of the
        decoupled subsystem (all transverse couplings set to zero).  For the
        continuum model the transverse momenta are set to zero instead.
        """
        kept_axes = tuple(kept_axes)
        k_s = np.asarray(k_s, dtype=float)
        if self.kind == "continuum":
            full = np.zeros((self.D,) + k_s.shape[1:])
            for j, ax in enumerate(kept_axes):
                full[ax] = k_s[j]
            return self.d(full)
        if self.terms is None:
            raise PreconditionError(f"{self.name} has no hopping table; restricted vector undefined")
        traced = [ax for ax in range(self.D) if ax not in kept_axes]
        sub = tuple(
            (tuple(R[ax] for ax in kept_axes), c)
            for R, c in self.terms
            if all(R[ax] == 0 for ax in traced)
        )
        return fourier_sum(sub, k_s, self.N)

    def gap(self, grid: BzGrid) -> float:
        """``min |d(k)|`` over a grid."""
        if self.kind == "continuum":
            raise PreconditionError("gap on a BZ grid is undefined for a continuum model")
        return float(np.linalg.norm(self.d(grid.momenta()), axis=0).min())

    def check_terms(self, grid: BzGrid | None = None) -> float:
        """Max deviation between the explicit formula and the Fourier table."""
        if self.terms is None or self.dfunc is None:
            return 0.0
        grid = grid or BzGrid((7,) * self.D, offset=0.3)
        k = grid.momenta()
        return float(np.abs(self.dfunc(k) - fourier_sum(self.terms, k, self.N)).max())


def fourier_sum(terms, k, N) -> np.ndarray:
    """``Re sum_R c_R exp(i k.R)`` for momenta ``(dim, ...)``."""
    k = np.asarray(k, dtype=float)
    out = np.zeros((N,) + k.shape[1:], dtype=complex)
    for R, c in terms:
        phase = np.exp(1j * np.tensordot(np.asarray(R, dtype=float), k, axes=(0, 0))) if len(R) else 1.0
        out += np.asarray(c, dtype=complex).reshape((N,) + (1,) * (k.ndim - 1)) * phase
    return out.real


def _merge(terms: Mapping) -> tuple:
    return tuple((tuple(int(x) for x in R), np.asarray(c, dtype=complex)) for R, c in terms.items())


def _unit(N, i, value):
    v = np.zeros(N, dtype=complex)
    v[i] = value
    return v


# ---------------------------------------------------------------------------
# zoo

def qwz(m: float, t_x: float = 1.0, t_y: float = 1.0) -> DiracModel:
    """Qi-Wu-Zhang Chern insulator, ``d = (t_x sin kx, t_y sin ky, m - t_x cos kx - t_y cos ky)``."""
    def dfunc(k):
        kx, ky = k
        return np.stack([
            t_x * np.sin(kx),
            t_y * np.sin(ky),
            m - t_x * np.cos(kx) - t_y * np.cos(ky),
        ])

    terms = {
        (0, 0): _unit(3, 2, m),
        (1, 0): _unit(3, 0, -0.5j * t_x) + _unit(3, 2, -0.5 * t_x),
        (-1, 0): _unit(3, 0, 0.5j * t_x) + _unit(3, 2, -0.5 * t_x),
        (0, 1): _unit(3, 1, -0.5j * t_y) + _unit(3, 2, -0.5 * t_y),
        (0, -1): _unit(3, 1, 0.5j * t_y) + _unit(3, 2, -0.5 * t_y),
    }
    return DiracModel("qwz", 2, pauli_rep(), dict(m=m, t_x=t_x, t_y=t_y),
                      _merge(terms), mass_index=2, dfunc=dfunc)


def qh4d(m: float) -> DiracModel:
    """4D quantum Hall lattice model ``d = (m - sum cos k_i, sin k_1, ..., sin k_4)``."""
    def dfunc(k):
        return np.concatenate([(m - np.cos(k).sum(axis=0))[None], np.sin(k)])

    terms = {(0, 0, 0, 0): _unit(5, 0, m)}
    for i in range(4):
        for sgn in (1, -1):
            R = [0, 0, 0, 0]
            R[i] = sgn
            terms[tuple(R)] = _unit(5, 0, -0.5) + _unit(5, i + 1, -0.5j * sgn)
    return DiracModel("qh4d", 4, build_gammas(2, 5), dict(m=m), _merge(terms),
                      mass_index=0, dfunc=dfunc)


def wti(t_x: float, t_x_prime: float, t_y: float) -> DiracModel:
    """Stack of SSH chains, ``d = (t_x + t'_x cos kx + 2 t_y cos ky, t'_x sin kx, 0)``."""
    def dfunc(k):
        kx, ky = k
        return np.stack([
            t_x + t_x_prime * np.cos(kx) + 2.0 * t_y * np.cos(ky),
            t_x_prime * np.sin(kx),
            np.zeros_like(kx),
        ])

    terms = {
        (0, 0): _unit(3, 0, t_x),
        (1, 0): _unit(3, 0, 0.5 * t_x_prime) + _unit(3, 1, -0.5j * t_x_prime),
        (-1, 0): _unit(3, 0, 0.5 * t_x_prime) + _unit(3, 1, 0.5j * t_x_prime),
        (0, 1): _unit(3, 0, t_y),
        (0, -1): _unit(3, 0, t_y),
    }
    return DiracModel("wti", 2, pauli_rep(), dict(t_x=t_x, t_x_prime=t_x_prime, t_y=t_y),
                      _merge(terms), mass_index=0, dfunc=dfunc)


def wti_phase(t_x: float, t_x_prime: float, t_y: float) -> str:
    """``"wti"``, ``"trivial"`` or ``"metallic"`` (boundaries are metallic)."""
    gap = abs(t_x_prime - t_x) - 2.0 * abs(t_y)
    if gap <= 0:
        return "metallic"
    return "wti" if t_x_prime > t_x else "trivial"


def continuum_dirac(m: float, cutoff: float) -> DiracModel:
    """Massive 2D Dirac fermion ``d = (kx, ky, m)`` on ``[-cutoff, cutoff]^2``."""
    if m == 0:
        raise PreconditionError("continuum Dirac model needs a finite mass |m| > 0 (infrared divergence)")
    if cutoff <= 0:
        raise PreconditionError("cutoff must be positive")

    def dfunc(k):
        kx, ky = k
        return np.stack([kx, ky, np.full_like(kx, m)])

    return DiracModel("continuum", 2, pauli_rep(), dict(m=m, cutoff=cutoff), None,
                      mass_index=2, kind="continuum", cutoff=cutoff, dfunc=dfunc)


def from_terms(name: str, D: int, rep: CliffordRep, terms: Mapping, mass_index: int = 0,
               params: dict | None = None) -> DiracModel:
    """User-defined finite-range lattice model from its Fourier table.

    ``terms`` maps integer displacement tuples ``R`` to complex N-vectors
    ``c_R``; Hermiticity requires ``c_{-R} = conj(c_R)``.
    """
    merged = _merge(terms)
    lookup = {R: c for R, c in merged}
    for R, c in merged:
        if len(R) != D or len(c) != rep.N:
            raise PreconditionError(f"term {R} does not match D={D}, N={rep.N}")
        minus = tuple(-x for x in R)
        if minus not in lookup or np.abs(lookup[minus] - c.conj()).max() > 1e-12:
            raise PreconditionError(f"term {R} has no Hermitian partner c_{{-R}} = conj(c_R)")
    return DiracModel(name, D, rep, dict(params or {}), merged, mass_index=mass_index)


ZOO = {"qwz": qwz, "qh4d": qh4d, "wti": wti, "continuum": continuum_dirac}


def make_model(name: str, **params) -> DiracModel:
    try:
        factory = ZOO[name]
    except KeyError:
        raise PreconditionError(f"unknown model {name!r}; known: {sorted(ZOO)}") from None
    return factory(**params)


# ---------------------------------------------------------------------------
# real space

@dataclass(frozen=True)
class LatticeGeometry:
    """Finite lattice of unit cells with per-axis boundary conditions.

    ``subsystem`` lists the unit cells kept in the reduced state, in the
    order used for the correlation-matrix rows.
    """

    sizes: tuple
    boundary: tuple
    subsystem: tuple = ()

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.sizes)
        bc = (self.boundary,) * len(sizes) if isinstance(self.boundary, str) else tuple(self.boundary)
        sub = tuple(tuple(int(x) for x in site) for site in self.subsystem)
        if len(bc) != len(sizes) or any(b not in ("periodic", "open") for b in bc):
            raise PreconditionError(f"boundary must be 'periodic'/'open' per axis, got {bc}")
        if any(s < 1 for s in sizes):
            raise PreconditionError(f"lattice sizes must be positive, got {sizes}")
        for site in sub:
            if len(site) != len(sizes) or any(not 0 <= x < s for x, s in zip(site, sizes)):
                raise PreconditionError(f"subsystem site {site} lies outside lattice {sizes}")
        if len(set(sub)) != len(sub):
            raise PreconditionError("subsystem has duplicate sites")
        object.__setattr__(self, "sizes", sizes)
        object.__setattr__(self, "boundary", bc)
        object.__setattr__(self, "subsystem", sub)

    @property
    def n_sites(self) -> int:
        return int(np.prod(self.sizes))

    def site_index(self, sites) -> np.ndarray:
        sites = np.asarray(sites, dtype=int).reshape(-1, len(self.sizes))
        return np.ravel_multi_index(sites.T, self.sizes)

    def with_subsystem(self, subsystem) -> "LatticeGeometry":
        return LatticeGeometry(self.sizes, self.boundary, tuple(subsystem))


def row(sizes: Sequence[int], axis: int, fixed: Mapping[int, int], start: int = 0,
        length: int | None = None) -> tuple:
    """Sites of a straight segment along ``axis`` with the other coordinates fixed."""
    length = sizes[axis] - start if length is None else length
    sites = []
    for x in range(start, start + length):
        site = [fixed.get(a, 0) for a in range(len(sizes))]
        site[axis] = x
        sites.append(tuple(site))
    return tuple(sites)


def realspace_hamiltonian(model: DiracModel, geom: LatticeGeometry,
                          bloch: tuple[int, float] | None = None) -> np.ndarray:
    """Single-particle Hamiltonian on a finite lattice.

    Basis index ``site * dim + orbital`` with sites in lexicographic order.
    The block between cells ``r`` and ``r + R`` is ``c_R . Gamma``, so a
    periodic lattice reproduces the Bloch spectrum on its momentum grid.

    Parameters
    ----------
    bloch : (axis, k), optional
        Fourier transform along one periodic axis: that axis is collapsed to
        a single cell and every hop along it picks up ``exp(i k R_axis)``.
        The geometry's size on that axis is ignored.
    """
    if model.kind != "lattice" or model.terms is None:
        raise PreconditionError(f"{model.name} has no lattice hopping table; real-space form undefined")
    if len(geom.sizes) != model.D:
        raise PreconditionError(f"geometry has {len(geom.sizes)} axes, model is {model.D}D")
    if bloch is not None:
        axis, kb = bloch
        sizes = list(geom.sizes)
        sizes[axis] = 1
        bcs = list(geom.boundary)
        bcs[axis] = "periodic"
        geom = LatticeGeometry(tuple(sizes), tuple(bcs))
    dim = model.rep.dim
    ns = geom.n_sites
    h = np.zeros((ns, dim, ns, dim), dtype=complex)
    cells = np.indices(geom.sizes).reshape(len(geom.sizes), -1)
    src = np.ravel_multi_index(cells, geom.sizes)
    for R, c in model.terms:
        block = model.rep.dot(c)
        if bloch is not None:
            block = block * np.exp(1j * kb * R[axis])
        dst = cells + np.asarray(R, dtype=int)[:, None]
        keep = np.ones(ns, dtype=bool)
        for ax, (n, bc) in enumerate(zip(geom.sizes, geom.boundary)):
            if bc == "periodic":
                dst[ax] %= n
            else:
                keep &= (dst[ax] >= 0) & (dst[ax] < n)
        if not keep.any():
            continue
        dst_idx = np.ravel_multi_index(dst[:, keep], geom.sizes)
        h[src[keep], :, dst_idx, :] += block
    h = h.reshape(ns * dim, ns * dim)
    return check_hermitian(h, tol=1e-10)
