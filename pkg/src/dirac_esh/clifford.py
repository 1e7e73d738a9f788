"""Clifford (Gamma) matrix representations and discrete symmetry operators."""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

from .errors import PreconditionError

SIGMA0 = np.eye(2, dtype=complex)
SIGMAX = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMAY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMAZ = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = (SIGMAX, SIGMAY, SIGMAZ)


def kron(*mats) -> np.ndarray:
    return reduce(np.kron, mats)


# tau (outer) x sigma (inner) basis of the 4D quantum Hall model
QH4D_GAMMAS = (
    kron(SIGMAZ, SIGMA0),
    kron(SIGMAY, SIGMAX),
    kron(SIGMAY, SIGMAY),
    kron(SIGMAY, SIGMAZ),
    kron(SIGMAX, SIGMA0),
)


@dataclass(frozen=True)
class CliffordRep:
    """``N`` mutually anticommuting Hermitian unitaries of size ``2**n``."""

    n: int
    gammas: tuple

    @property
    def dim(self) -> int:
        return 2 ** self.n

    @property
    def N(self) -> int:
        return len(self.gammas)

    def stack(self) -> np.ndarray:
        """Gammas as an array of shape ``(N, dim, dim)``."""
        return np.stack(self.gammas)

    def dot(self, d) -> np.ndarray:
        """``sum_mu d_mu Gamma^mu``; ``d`` has shape ``(N, ...)``, result ``(..., dim, dim)``."""
        d = np.asarray(d)
        if d.shape[0] != self.N:
            raise ValueError(f"d-vector has {d.shape[0]} components, representation has {self.N}")
        return np.tensordot(d, self.stack(), axes=(0, 0))

    def algebra_violation(self) -> float:
        """Max entry of ``{G_mu, G_nu} - 2 delta_mu_nu 1`` over all pairs."""
        eye = np.eye(self.dim)
        worst = 0.0
        for mu, a in enumerate(self.gammas):
            for nu, b in enumerate(self.gammas):
                anti = a @ b + b @ a - 2.0 * eye * (mu == nu)
                worst = max(worst, float(np.abs(anti).max()))
        return worst


def _full_set(n: int) -> list[np.ndarray]:
    """All ``2n+1`` gammas of size ``2**n``."""
    if n == 1:
        return list(PAULI)
    if n == 2:
        return list(QH4D_GAMMAS)
    lower = _full_set(n - 1)
    eye = np.eye(2 ** (n - 1))
    return [kron(SIGMAX, g) for g in lower] + [kron(SIGMAY, eye), kron(SIGMAZ, eye)]


def build_gammas(n: int, N: int) -> CliffordRep:
    """First ``N`` gammas of the ``2**n``-dimensional representation.

    ``n = 1`` gives the Pauli matrices, ``n = 2`` the tau x sigma basis of the
    4D quantum Hall model, larger ``n`` the recursive tensor-product
    construction built on that basis.
    """
    if n < 1:
        raise PreconditionError(f"n must be >= 1, got {n}")
    if not 1 <= N <= 2 * n + 1:
        raise PreconditionError(f"no set of {N} anticommuting {2**n}x{2**n} matrices (need N <= {2*n+1})")
    return CliffordRep(n, tuple(_full_set(n)[:N]))


def pauli_rep() -> CliffordRep:
    return build_gammas(1, 3)


# ---------------------------------------------------------------------------
# symmetry operators

@dataclass(frozen=True)
class SymmetryOp:
    """``kind`` in {"time-reversal", "particle-hole", "chiral"}.

    Antiunitary operators act as ``unitary @ K`` with ``K`` complex
    conjugation.
    """

    kind: str
    unitary: np.ndarray
    antiunitary: bool

    def __post_init__(self):
        u = np.asarray(self.unitary, dtype=complex)
        object.__setattr__(self, "unitary", u)
        if self.kind not in ("time-reversal", "particle-hole", "chiral"):
            raise ValueError(f"unknown symmetry kind {self.kind!r}")
        if np.abs(u @ u.conj().T - np.eye(u.shape[0])).max() > 1e-12:
            raise PreconditionError("symmetry operator is not unitary")

    def square_sign(self) -> int:
        """``+1`` or ``-1`` for ``(U K)^2 = U U^*``; ``0`` for unitary operators."""
        if not self.antiunitary:
            return 0
        sq = self.unitary @ self.unitary.conj()
        eye = np.eye(sq.shape[0])
        if np.allclose(sq, eye, atol=1e-12):
            return 1
        if np.allclose(sq, -eye, atol=1e-12):
            return -1
        raise PreconditionError("antiunitary operator does not square to +-1")


def time_reversal(unitary) -> SymmetryOp:
    return SymmetryOp("time-reversal", unitary, True)


def particle_hole(unitary) -> SymmetryOp:
    return SymmetryOp("particle-hole", unitary, True)


def chiral(unitary) -> SymmetryOp:
    return SymmetryOp("chiral", unitary, False)


# operators of the 4D quantum Hall model in the tau x sigma basis
QH4D_TRS = time_reversal(1j * kron(SIGMAZ, SIGMAY))
QH4D_PHS = particle_hole(kron(SIGMAY, SIGMAY))
QH4D_CHIRAL = chiral(kron(SIGMAX, SIGMA0))


@dataclass(frozen=True)
class SymmetryCheck:
    passed: bool
    max_violation: float


def check_symmetry(hamiltonian, grid, op: SymmetryOp, tol: float = 1e-10) -> SymmetryCheck:
    """Test a symmetry relation of a Bloch Hamiltonian on every grid point.

    Parameters
    ----------
    hamiltonian : callable
        Maps momenta ``(D, npts)`` to matrices ``(npts, dim, dim)``.
    grid : BzGrid
        Unshifted grid with even ``L`` on every axis so that ``-k`` is a
        grid point.
    op : SymmetryOp

    Notes
    -----
    time-reversal: ``U H(k)^* U^dag = H(-k)``;
    particle-hole: ``U H(k)^* U^dag = -H(-k)``;
    chiral: ``U H(k) U^dag = -H(k)``.
    """
    if any(n % 2 for n in grid.points_per_axis):
        raise PreconditionError("symmetry check needs an even number of points per axis")
    k = grid.momenta()
    h = np.asarray(hamiltonian(k))
    u = op.unitary
    if op.kind == "chiral":
        lhs = u @ h @ u.conj().T
        rhs = -h
    else:
        lhs = u @ h.conj() @ u.conj().T
        h_minus = h[grid.minus_index()]
        rhs = h_minus if op.kind == "time-reversal" else -h_minus
    dev = float(np.abs(lhs - rhs).max())
    return SymmetryCheck(dev < tol, dev)


# Altland-Zirnbauer labels keyed by (T^2, C^2, chiral), 0 = absent
_AZ = {
    (0, 0, 0): "A",
    (0, 0, 1): "AIII",
    (1, 0, 0): "AI",
    (1, 1, 1): "BDI",
    (0, 1, 0): "D",
    (-1, 1, 1): "DIII",
    (-1, 0, 0): "AII",
    (-1, -1, 1): "CII",
    (0, -1, 0): "C",
    (1, -1, 1): "CI",
}


def classify(trs: int, phs: int, chiral_present: bool | None = None) -> str:
    """Symmetry-class label from the (TRS, PHS, chiral) triple.

    ``trs`` and ``phs`` are the squares (+1/-1) of the operators, 0 if absent.
    When both antiunitary symmetries are present chiral symmetry is implied.
    """
    ch = 1 if (trs and phs) else int(bool(chiral_present))
    return _AZ[(trs, phs, ch)]
