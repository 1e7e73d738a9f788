"""Fast property suite behind ``dirac-esh selftest``.

Each check returns ``(name, ok, detail)``.  Inputs are drawn from a fixed
seed so the suite is reproducible.
"""
from __future__ import annotations

import numpy as np

from . import corrfluct as cf
from . import entmap as em
from . import topo
from .clifford import build_gammas
from .models import qh4d, qwz
from .numerics import BzGrid, hermitian_eigh

SEED = 20240607


def check_clifford(max_n: int = 3):
    worst = 0.0
    for n in range(1, max_n + 1):
        worst = max(worst, build_gammas(n, 2 * n + 1).algebra_violation())
    return "clifford algebra n<=3", worst < 1e-12, f"max violation {worst:.2e}"


def check_eigensolver(trials: int = 20):
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for _ in range(trials):
        dim = int(rng.integers(2, 24))
        a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        a = a + a.conj().T
        for method in ("jacobi", "lapack"):
            w, v = hermitian_eigh(a, method=method)
            res = np.abs((v * w) @ v.conj().T - a).max() / np.abs(a).max()
            orth = np.abs(v.conj().T @ v - np.eye(dim)).max()
            worst = max(worst, res, orth)
    return "eigensolver reconstruction", worst < 1e-10, f"max residual {worst:.2e}"


def _sample_blocks():
    spec = em.SubsystemSpec((0,), BzGrid((128,)))
    grid = BzGrid((32,))
    for m in (0.5, 1.4, 2.5):
        for t_y in (0.2, 1.0):
            model = qwz(m, 1.0, t_y)
            yield cf.corr_momentum(em.esh_grid(model, spec, grid), model.rep)


def check_corr_bounds():
    lo, hi = np.inf, -np.inf
    for c in _sample_blocks():
        xi = c.spectrum()
        lo, hi = min(lo, xi.min()), max(hi, xi.max())
    ok = lo >= -1e-12 and hi <= 1 + 1e-12
    return "correlation eigenvalues in [0,1]", ok, f"range [{lo:.3g}, {hi:.3g}]"


def check_variance_identity():
    worst, smallest = 0.0, np.inf
    for c in _sample_blocks():
        xi = c.spectrum()
        direct = float(np.sum(xi * (1 - xi)))
        trace = cf.particle_variance(c)
        worst = max(worst, abs(direct - trace))
        smallest = min(smallest, trace)
    ok = worst < 1e-10 and smallest >= 0
    return "variance = sum xi(1-xi) >= 0", ok, f"max mismatch {worst:.2e}, min {smallest:.3g}"


def check_refinement():
    """Doubling the grid moves ``nu_raw`` by less than 0.01 away from critical masses."""
    worst = 0.0
    for d, m, L, method in ((1, 0.5, 400, "central"), (2, -1.0, 48, "central"), (4, 1.5, 16, "spectral")):
        if d == 4:
            pair = [topo.invariant_nu(qh4d(m).d, 4, n, method=method, refine=False) for n in (L, 2 * L)]
        else:
            pair = [topo.esh_invariant(m, d, L=n, method=method) for n in (L, 2 * L)]
        worst = max(worst, abs(pair[1].nu_raw - pair[0].nu_raw))
    return "invariant grid-refinement stability", worst < 0.01, f"max change {worst:.2e}"


CHECKS = (check_clifford, check_eigensolver, check_corr_bounds, check_variance_identity, check_refinement)


def run_all():
    return [check() for check in CHECKS]
