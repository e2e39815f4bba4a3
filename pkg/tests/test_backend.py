import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dunkl_hardy import BACKEND
from dunkl_hardy._backend import available_backends, load_backend
from dunkl_hardy.kernels import default_rule

BACKENDS = available_backends()
needs_both = pytest.mark.skipif(len(BACKENDS) < 2, reason="compiled extension not built")


def test_python_backend_always_available():
    assert "python" in BACKENDS
    assert BACKEND in BACKENDS
    with pytest.raises(ValueError):
        load_backend("fortran")


@needs_both
@settings(max_examples=100, deadline=None)
@given(st.floats(0, 5), st.floats(1e-3, 1e6))
def test_reduced_bessel_parity(nu, z):
    py, cc = load_backend("python"), load_backend("compiled")
    a = py.reduced_bessel(nu, np.array([z]))
    b = cc.reduced_bessel(nu, np.array([z]))
    assert np.allclose(a, b, rtol=1e-13, atol=0)


@needs_both
def test_kernel_parity_on_grids():
    py, cc = load_backend("python"), load_backend("compiled")
    x = np.linspace(-8, 8, 41)
    for k in (0.0, 0.5, 1.0, 3.3):
        # the opposite-sign bracket loses a few digits to cancellation in either backend
        assert np.allclose(py.heat_matrix(k, 0.7, x, x), cc.heat_matrix(k, 0.7, x, x), rtol=1e-11, atol=0)
        assert np.allclose(py.dunkl_matrix(k, x, x), cc.dunkl_matrix(k, x, x), rtol=1e-12, atol=0)
        z = np.geomspace(1e-4, 1e4, 50)
        for s in (1.0, -1.0):
            assert np.allclose(py.kernel_bracket(k, z, np.full(50, s)), cc.kernel_bracket(k, z, np.full(50, s)),
                               rtol=1e-11, atol=0)


@needs_both
def test_poisson_parity(rng):
    py, cc = load_backend("python"), load_backend("compiled")
    rule = default_rule()
    k = np.array([1.0, 0.5])
    X = rng.uniform(-4, 4, (30, 2))
    Y = rng.uniform(-4, 4, (30, 2))
    a = py.poisson_pairs(k, 0.8, X, Y, rule.v, rule.w)
    b = cc.poisson_pairs(k, 0.8, X, Y, rule.v, rule.w)
    assert np.allclose(a, b, rtol=1e-12, atol=0)
