import numpy as np
import pytest

from dirac_esh.entmap import SubsystemSpec, esh, esh_4d_descendants
from dirac_esh.errors import GaplessError, PreconditionError
from dirac_esh.models import qh4d, qwz, wti
from dirac_esh.numerics import BzGrid
from dirac_esh.topo import (TopoResult, inheritance_check, esh_invariant, esh_winding, find_critical,
                            gap_scan, invariant_nu, scan_gaps, sphere_area, weak_indices)

COARSE = {1: 400, 2: 48, 3: 16, 4: 16}


def nu(m, d):
    method = "spectral" if d >= 3 else "central"
    return esh_invariant(m, d, L=COARSE[d], method=method)


def test_sphere_areas():
    assert sphere_area(1) == pytest.approx(2 * np.pi)
    assert sphere_area(2) == pytest.approx(4 * np.pi)
    assert sphere_area(4) == pytest.approx(8 * np.pi ** 2 / 3)


def test_winding_of_a_circle():
    for w in (1, -2, 3):
        r = invariant_nu(lambda k: np.stack([np.cos(w * k[0]), np.sin(w * k[0])]), 1, L=64,
                         method="spectral")
        assert r.nu == w and r.error < 1e-12


def test_qwz_chern_number():
    # the 2D parent itself is a degree-2 map: Chern number +-1 for 0 < |m| < 2
    assert abs(invariant_nu(qwz(1.0).d, 2, L=64).nu) == 1
    assert invariant_nu(qwz(3.0).d, 2, L=64).nu == 0
    assert invariant_nu(qwz(1.0).d, 2, L=64).nu == -invariant_nu(qwz(-1.0).d, 2, L=64).nu


def test_gap_floor_and_component_count():
    with pytest.raises(GaplessError):
        invariant_nu(qwz(2.0).d, 2, L=16)
    with pytest.raises(PreconditionError):
        invariant_nu(lambda k: qwz(1.0).d(k)[:2], 2, L=8)
    with pytest.raises(GaplessError):
        esh_invariant(2.0, 4)


@pytest.mark.parametrize("m, expected", [
    # frozen from an analytic-derivative evaluation on a shifted 24^4 grid
    (-3.5, 0.999998), (-1.5, -2.99946), (-0.5, -2.99897), (0.5, 2.99897),
    (1.5, 2.99946), (2.5, -0.99937), (4.5, -0.000124),
])
def test_parent_nu4_matches_analytic_oracle(m, expected):
    r = nu(m, 4)
    assert r.nu == round(expected)
    assert abs(r.nu_raw - expected) < 5e-3


def test_parent_nu4_monte_carlo_difference():
    # a 4e5-sample Monte-Carlo estimate of the same integral gives
    # nu(1) - nu(3) = 3.006 - (-0.993), integer part 4
    assert nu(1.0, 4).nu - nu(3.0, 4).nu == 4


@pytest.mark.parametrize("d", [1, 2, 3])
def test_descendant_vanishes_outside_window(d):
    for m in (d + 0.5, -(d + 0.5), 4.5):
        r = nu(m, d)
        assert r.nu == 0 and r.accepted


def test_descendant_values_inside_window():
    assert nu(0.5, 1).nu == nu(-0.5, 1).nu == -1
    assert nu(0.5, 2).nu == -1 and nu(-0.5, 2).nu == 1
    assert nu(1.5, 2).nu == -1
    assert nu(0.5, 3).nu == nu(-0.5, 3).nu == 2
    assert nu(1.5, 3).nu == nu(-1.5, 3).nu == -1


@pytest.mark.parametrize("d, critical", [(1, (-1, 1)), (2, (-2, 0, 2)), (3, (-3, -1, 1, 3))])
def test_nu_changes_only_across_critical_masses(d, critical):
    edges = (-4.75,) + tuple(critical) + (4.75,)
    plateaus = []
    for lo, hi in zip(edges, edges[1:]):
        lo, hi = max(lo, -d - 0.75), min(hi, d + 0.75)
        values = {nu(m, d).nu for m in np.linspace(lo + 0.25, hi - 0.25, 2)}
        assert len(values) == 1, (lo, hi, values)
        plateaus.append(values.pop())
    assert all(a != b for a, b in zip(plateaus, plateaus[1:]))


def test_zero_dimensional_descendant():
    assert esh_invariant(3.5, 0).nu in (0, 1)
    assert esh_invariant(3.5, 0).nu != esh_invariant(-3.5, 0).nu


@pytest.mark.parametrize("d, m, L, method", [(1, 0.5, 400, "central"), (4, 1.5, 16, "spectral")])
def test_refinement_stability(d, m, L, method):
    a = esh_invariant(m, d, L=L, method=method)
    b = esh_invariant(m, d, L=2 * L, method=method)
    assert abs(a.nu_raw - b.nu_raw) < 0.01


def test_richardson_flag():
    r = esh_invariant(0.5, 2, L=12, method="central")
    assert isinstance(r, TopoResult)
    assert r.refined and r.nu == -1


@pytest.mark.parametrize("D_s", [1, 2, 3])
def test_descendant_uses_first_components(D_s):
    r = esh_4d_descendants(0.5, D_s, grid=BzGrid((4,) * D_s))
    assert np.abs(r.d[D_s + 1:]).max() < 1e-12


@pytest.mark.parametrize("D_s, expected", [
    (1, [-1.0, 1.0]), (2, [-2.0, 0.0, 2.0]), (3, [-3.0, -1.0, 1.0, 3.0]),
    (4, [-4.0, -2.0, 0.0, 2.0, 4.0]),
])
def test_gap_scan(D_s, expected):
    m = np.round(np.arange(-5.0, 5.0 + 1e-9, 0.05), 10)
    found = gap_scan(D_s, m)
    assert len(found) == len(expected)
    np.testing.assert_allclose(found, expected, atol=0.05)


def test_qwz_esh_gap_scan():
    m = np.round(np.arange(-3.0, 3.0 + 1e-9, 0.05), 10)
    spec_grid = BzGrid((256,), offset=0.5)
    gaps = scan_gaps(lambda x: qwz(x, 1.0, 1.0), (0,), m, spec_grid)
    np.testing.assert_allclose(find_critical(m, gaps), [-1.0, 1.0], atol=0.05)
    # the m = 1 closing sits at k_x = 0
    grid = BzGrid((4,))
    r = esh(qwz(1.0, 1.0, 1.0), SubsystemSpec((0,), spec_grid), grid.momenta())
    assert np.argmin(r.norm) == 0 and r.norm[0] < 1e-12


def test_find_critical_interpolates():
    m = np.linspace(-1, 1, 21)
    gaps = np.abs(m - 0.33)
    assert find_critical(m, gaps) == pytest.approx([0.33], abs=1e-9)
    assert find_critical(m, np.ones_like(m)) == []


def test_weak_indices():
    for method in ("phase", "derivative"):
        w = weak_indices(wti(1.0, 4.0, 1.0), method=method)
        assert (w.nu_x, w.nu_y) == (1, 0)
        w = weak_indices(wti(4.0, 1.0, 1.0), method=method)
        assert (w.nu_x, w.nu_y) == (0, 0)
    with pytest.raises(GaplessError):
        weak_indices(wti(1.0, 2.0, 1.0))
    with pytest.raises(PreconditionError):
        weak_indices(qwz(1.0))


def test_esh_winding_along_y_vanishes_identically():
    model = wti(1.0, 4.0, 1.0)
    w = esh_winding(model, 1)
    assert w.identically_zero and w.winding == 0
    w = esh_winding(model, 0)
    assert not w.identically_zero and w.winding == 1


def test_inheritance_check():
    chain = SubsystemSpec((0,), BzGrid((512,)))
    c = inheritance_check(qwz(1.0), chain, [0.0])
    assert c.passed and c.deviation < 1e-8
    c = inheritance_check(qwz(1.4), chain, [0.0])
    assert c.status == "inapplicable"
    c = inheritance_check(qh4d(1.0), SubsystemSpec((0,), BzGrid((16, 16, 16))), [0.0])
    assert c.passed and c.deviation < 1e-8
    c = inheritance_check(qwz(1.0), SubsystemSpec((0,), BzGrid((15,))), [0.0])
    assert c.status == "inapplicable"
