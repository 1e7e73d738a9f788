import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dirac_esh.clifford import pauli_rep
from dirac_esh.errors import PreconditionError
from dirac_esh.models import (LatticeGeometry, continuum_dirac, fourier_sum, from_terms, make_model,
                              qh4d, qwz, realspace_hamiltonian, row, wti, wti_phase)
from dirac_esh.numerics import BzGrid

momentum = st.floats(-10, 10, allow_nan=False)
param = st.floats(-3, 3, allow_nan=False)


def test_qwz_values():
    np.testing.assert_allclose(qwz(1.4).d(np.zeros((2, 1)))[:, 0], [0, 0, -0.6], atol=1e-15)
    m = qwz(1.0)
    assert m.D == 2 and m.N == 3 and m.rep.dim == 2


def test_qwz_gap_and_closing():
    assert qwz(1.0).gap(BzGrid((64, 64))) > 0.5
    # with d_z = m - cos kx - cos ky the closing sits at k=0 for m=2 and at
    # (pi, 0), (0, pi) for m=0
    assert np.linalg.norm(qwz(2.0).d(np.zeros((2, 1)))) < 1e-15
    k = np.array([[np.pi, 0.0], [0.0, np.pi]])
    np.testing.assert_allclose(np.linalg.norm(qwz(0.0).d(k), axis=0), 0.0, atol=1e-15)
    assert np.linalg.norm(qwz(2.0).d(k), axis=0).min() == 2.0
    # grid minimisation oracle: the 2D QWZ gap only closes at m in {0, +-2}
    for m in (-2.0, 0.0, 2.0):
        assert qwz(m).gap(BzGrid((64, 64))) < 1e-12


def test_qh4d_values_and_gap_closings():
    model = qh4d(5.0)
    assert model.D == 4 and model.N == 5 and model.rep.dim == 4
    assert abs(model.gap(BzGrid((8,) * 4)) - 1.0) < 1e-14
    assert qh4d(4.0).gap(BzGrid((4,) * 4)) < 1e-15
    perms = np.pi * np.eye(4)
    np.testing.assert_allclose(np.linalg.norm(qh4d(2.0).d(perms), axis=0), 0.0, atol=1e-15)
    # at m=2 no other point of the 4^4 grid closes the gap
    grid = BzGrid((4,) * 4)
    norms = np.linalg.norm(qh4d(2.0).d(grid.momenta()), axis=0)
    assert np.sum(norms < 1e-12) == 4


def test_qh4d_bands_twofold():
    model = qh4d(1.3)
    k = np.array([0.3, -1.1, 2.0, 0.7])
    w = np.linalg.eigvalsh(model.bloch(k))
    e = np.linalg.norm(model.d(k))
    np.testing.assert_allclose(w, [-e, -e, e, e], atol=1e-14)


def test_wti_phases():
    model = wti(1.0, 4.0, 1.0)
    d = model.d(BzGrid((9, 9)).momenta())
    assert np.all(d[2] == 0)
    assert wti_phase(1.0, 4.0, 1.0) == "wti"
    assert wti_phase(4.0, 1.0, 1.0) == "trivial"
    assert wti_phase(1.0, 2.0, 1.0) == "metallic"
    assert wti_phase(1.0, 2.0, 0.0) == "wti"
    assert wti(1.0, 2.0, 1.0).gap(BzGrid((64, 64))) < 0.2


def test_continuum():
    model = continuum_dirac(0.7, 50.0)
    np.testing.assert_allclose(model.d(np.zeros((2, 1)))[:, 0], [0, 0, 0.7])
    k = np.array([[3.0], [-4.0]])
    assert abs(np.linalg.norm(model.d(k)) - np.sqrt(25 + 0.49)) < 1e-14
    with pytest.raises(PreconditionError):
        continuum_dirac(0.0, 10.0)
    with pytest.raises(PreconditionError):
        continuum_dirac(1.0, 0.0)
    with pytest.raises(PreconditionError):
        realspace_hamiltonian(model, LatticeGeometry((2, 2), "periodic"))


@pytest.mark.parametrize("model", [qwz(1.4, 1.0, 0.5), qh4d(-1.3), wti(1.0, 4.0, 0.7)])
def test_fourier_table_matches_formula(model):
    assert model.check_terms() < 1e-14


@settings(max_examples=50, deadline=None)
@given(kx=momentum, ky=momentum, m=param, ty=param)
def test_qwz_periodic_and_antisymmetric(kx, ky, m, ty):
    model = qwz(m, 1.0, ty)
    k = np.array([[kx], [ky]])
    base = model.d(k)
    for shift in (np.array([[2 * np.pi], [0]]), np.array([[0], [2 * np.pi]])):
        np.testing.assert_allclose(model.d(k + shift), base, atol=1e-13)
    flipped = model.d(np.array([[kx], [-ky]]))
    assert abs(flipped[1, 0] + base[1, 0]) <= 1e-15


@settings(max_examples=30, deadline=None)
@given(k=st.lists(momentum, min_size=4, max_size=4), m=st.floats(-5, 5))
def test_bloch_spectrum_is_plus_minus_norm(k, m):
    for model, kk in ((qh4d(m), np.array(k)), (qwz(m), np.array(k[:2]))):
        w = np.linalg.eigvalsh(model.bloch(kk))
        e = np.linalg.norm(model.d(kk))
        half = model.rep.dim // 2
        np.testing.assert_allclose(w, [-e] * half + [e] * half, atol=1e-12 * max(1, e))


def test_geometry_validation():
    g = LatticeGeometry((3, 4), "open", [(0, 0), (2, 3)])
    assert g.boundary == ("open", "open") and g.n_sites == 12
    np.testing.assert_array_equal(g.site_index([(0, 0), (2, 3)]), [0, 11])
    with pytest.raises(PreconditionError):
        LatticeGeometry((3, 4), "open", [(3, 0)])
    with pytest.raises(PreconditionError):
        LatticeGeometry((3, 4), "open", [(1, 1), (1, 1)])
    with pytest.raises(PreconditionError):
        LatticeGeometry((3, 4), "twisted")
    assert row((5, 10), 0, {1: 5}) == tuple((x, 5) for x in range(5))
    assert row((5, 10), 1, {0: 2}, start=3, length=2) == ((2, 3), (2, 4))


def test_realspace_periodic_matches_bloch():
    model = qwz(1.4, 1.0, 0.6)
    h = realspace_hamiltonian(model, LatticeGeometry((8, 8), "periodic"))
    assert h.shape == (128, 128)
    norms = np.linalg.norm(model.d(BzGrid((8, 8)).momenta()), axis=0)
    expected = np.sort(np.concatenate([norms, -norms]))
    np.testing.assert_allclose(np.linalg.eigvalsh(h), expected, atol=1e-10)


def test_realspace_single_cell_and_open():
    model = qwz(1.4)
    h = realspace_hamiltonian(model, LatticeGeometry((1, 1), "periodic"))
    np.testing.assert_allclose(np.linalg.eigvalsh(h), [-0.6, 0.6], atol=1e-14)
    h = realspace_hamiltonian(model, LatticeGeometry((5, 10), "open"))
    assert h.shape == (100, 100)
    np.testing.assert_allclose(h, h.conj().T, atol=1e-15)


def test_realspace_bloch_reduction():
    model = qwz(0.8, 1.0, 0.5)
    geom = LatticeGeometry((4, 6), ("open", "periodic"))
    full = np.linalg.eigvalsh(realspace_hamiltonian(model, geom))
    parts = [np.linalg.eigvalsh(realspace_hamiltonian(model, geom, bloch=(1, 2 * np.pi * n / 6)))
             for n in range(6)]
    np.testing.assert_allclose(np.sort(np.concatenate(parts)), full, atol=1e-12)


def test_from_terms_and_zoo():
    rep = pauli_rep()
    terms = {(0,): np.array([0, 0, 0.5]), (1,): np.array([-0.5j, 0, -0.5]), (-1,): np.array([0.5j, 0, -0.5])}
    model = from_terms("chain", 1, rep, terms, mass_index=2)
    k = np.array([[0.4]])
    np.testing.assert_allclose(model.d(k)[:, 0], [np.sin(0.4), 0, 0.5 - np.cos(0.4)], atol=1e-15)
    np.testing.assert_allclose(fourier_sum(model.terms, k, 3), model.d(k))
    bad = {(1,): np.array([1.0, 0, 0])}
    with pytest.raises(PreconditionError):
        from_terms("bad", 1, rep, bad)
    assert make_model("qwz", m=1.0).params["m"] == 1.0
    with pytest.raises(PreconditionError):
        make_model("graphene")
