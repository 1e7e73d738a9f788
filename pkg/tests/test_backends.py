"""The compiled kernels and their pure-Python twin must agree."""
import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from dirac_esh import _kernels_py
from dirac_esh._backend import BACKEND, available_backends

compiled = available_backends().get("compiled")
needs_compiled = pytest.mark.skipif(compiled is None, reason="compiled extension not built")


def test_backend_reported():
    assert BACKEND in ("compiled", "python")
    assert "python" in available_backends()


def test_pure_python_env_switch():
    env = dict(os.environ, DIRAC_ESH_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "from dirac_esh import BACKEND; print(BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


@needs_compiled
@settings(max_examples=50, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(1, 5), st.integers(1, 400)),
              elements=st.floats(-1e8, 1e8)))
def test_kahan_bit_identical(values):
    values = np.ascontiguousarray(values)
    a = np.asarray(compiled.kahan_mean_rows(values))
    b = np.asarray(_kernels_py.kahan_mean_rows(values))
    assert np.array_equal(a, b)


@needs_compiled
@settings(max_examples=25, deadline=None)
@given(n=st.integers(1, 14), seed=st.integers(0, 2**32 - 1))
def test_jacobi_twins_agree(n, seed):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    a = np.ascontiguousarray(a + a.conj().T)
    wc, vc, sc = compiled.jacobi_eigh(a, 1e-12, 100)
    wp, vp, sp = _kernels_py.jacobi_eigh(a, 1e-12, 100)
    assert sc >= 0 and sp >= 0
    np.testing.assert_allclose(np.sort(wc), np.sort(wp), atol=1e-11 * max(1, np.abs(a).max()))
    for w, v in ((wc, vc), (wp, vp)):
        np.testing.assert_allclose(a @ v, v * w, atol=1e-10 * max(1, np.abs(a).max()))
