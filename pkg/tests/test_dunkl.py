import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from dunkl_hardy.dunkl import (MultiplicitySetup, SignVector, apply_dunkl_laplacian, apply_dunkl_operator,
                               dunkl_kernel, dunkl_kernel_1d, dunkl_kernel_1d_integral, field_from_dict,
                               field_to_dict, load_field, orbit, reflect_field, sample_field, save_field,
                               sign_vectors)
from dunkl_hardy.errors import DomainError, GridError
from dunkl_hardy.quadrature import make_axis


def _bessel_oracle(k, x, y):
    # E_k(x,y) = Gamma(k+1/2) (z/2)^{1/2-k} (I_{k-1/2}(z) + sign(z) I_{k+1/2}(z)) with |z| = |xy|, in mpmath
    with mpmath.workdps(30):
        k = mpmath.mpf(k)
        z = mpmath.mpf(x) * y
        a = abs(z)
        s = 1 if z >= 0 else -1
        return float(mpmath.gamma(k + 0.5) * (a / 2) ** (0.5 - k)
                     * (mpmath.besseli(k - 0.5, a) + s * mpmath.besseli(k + 0.5, a)))


def test_kernel_examples():
    assert dunkl_kernel_1d(1.0, 1.0, 0.0) == 1.0
    assert dunkl_kernel_1d(0.0, 1.3, -0.7) == pytest.approx(math.exp(-0.91), rel=1e-15)
    assert dunkl_kernel_1d(1.0, 1.0, 1.0) == pytest.approx(math.cosh(1.0), rel=1e-13)
    assert dunkl_kernel_1d(1.0, 1.0, 1.0) == pytest.approx(1.5430806348, rel=1e-10)


@pytest.mark.parametrize("k", [0.3, 1.0, 2.5])
@pytest.mark.parametrize("x,y", [(1.0, 2.0), (-3.0, 1.5), (5.0, -5.0), (0.2, 0.1), (4.0, 5.0)])
def test_kernel_against_mpmath(k, x, y):
    ref = _bessel_oracle(k, x, y)
    # xy < 0 cancels the leading exponentials and costs a few digits
    assert dunkl_kernel_1d(k, x, y) == pytest.approx(ref, rel=1e-13 if x * y >= 0 else 1e-11)
    assert dunkl_kernel_1d_integral(k, x, y) == pytest.approx(ref, rel=1e-10)


def test_kernel_product_and_classical():
    s = MultiplicitySetup((1.0, 2.0))
    x, y = np.array([1.0, 2.0]), np.array([0.5, -1.0])
    assert dunkl_kernel(s, x, y) == pytest.approx(dunkl_kernel_1d(1, 1, 0.5) * dunkl_kernel_1d(2, 2, -1), rel=1e-14)
    assert dunkl_kernel(MultiplicitySetup((1.0, 1.0)), [1, 1], [0, 0]) == 1.0
    s0 = MultiplicitySetup((0.0, 0.0))
    assert dunkl_kernel(s0, x, y) == pytest.approx(math.exp(x @ y), rel=1e-15)


@settings(max_examples=80, deadline=None)
@given(st.floats(0, 4), st.floats(-6, 6), st.floats(-6, 6))
def test_kernel_symmetric_and_positive(k, x, y):
    a = dunkl_kernel_1d(k, x, y)
    assert a > 0
    assert a == pytest.approx(dunkl_kernel_1d(k, y, x), rel=1e-10)
    # E(x, y) = E(-x, -y)
    assert a == pytest.approx(dunkl_kernel_1d(k, -x, -y), rel=1e-10)


def test_large_arguments_against_high_precision():
    # mpmath quadrature of the Beta integral at 40 digits
    assert dunkl_kernel_1d(1.5, 20.0, 20.0) == pytest.approx(1.038605492545047934e170, rel=1e-12)


def test_setup_constants():
    s = MultiplicitySetup((0.5, 1.0))
    assert s.N == 5.0
    gauss = 1.0
    for k in s.k:
        gauss *= quad(lambda y: abs(y) ** (2 * k) * math.exp(-y * y / 2), -np.inf, np.inf, epsrel=1e-13)[0]
    assert s.c_mm == pytest.approx(gauss, rel=1e-12)
    with pytest.raises(DomainError):
        MultiplicitySetup((-0.1,))
    with pytest.raises(DomainError):
        MultiplicitySetup(())


def _eigen_residual(k, h, y=0.8):
    s = MultiplicitySetup((k,))
    f = sample_field(s, lambda x: dunkl_kernel_1d(k, x, y), 3.0, h)
    d = apply_dunkl_operator(s, 0, f)
    inner = slice(1, -1)
    return np.max(np.abs(d.values[inner] - y * f.values[inner]))


@pytest.mark.parametrize("k", [0.5, 1.0, 2.0])
def test_dunkl_operator_eigen_relation_second_order(k):
    r = [_eigen_residual(k, h) for h in (0.1, 0.05, 0.025)]
    for a, b in zip(r, r[1:]):
        assert 3.5 <= a / b <= 4.5


def test_dunkl_operator_on_linear_and_constant():
    s = MultiplicitySetup((1.0,))
    f = sample_field(s, lambda x: x, 2.0, 0.1)
    d = apply_dunkl_operator(s, 0, f)
    assert np.allclose(d.values, 3.0, atol=1e-12)
    c = sample_field(s, lambda x: np.ones_like(x), 2.0, 0.1)
    assert np.allclose(apply_dunkl_operator(s, 0, c).values, 0.0)
    assert np.allclose(apply_dunkl_laplacian(s, c).values, 0.0)


def test_laplacian_classical_gaussian():
    s = MultiplicitySetup((0.0,))
    errs = []
    for h in (0.1, 0.05):
        f = sample_field(s, lambda x: np.exp(-x ** 2), 4.0, h)
        L = apply_dunkl_laplacian(s, f)
        x = f.axes[0].nodes
        errs.append(np.max(np.abs(L.values - (4 * x ** 2 - 2) * np.exp(-x ** 2))[1:-1]))
    assert 3.5 <= errs[0] / errs[1] <= 4.5


def test_laplacian_eigen_relation_two_dims():
    s = MultiplicitySetup((0.5, 1.0))
    y = np.array([0.6, -0.4])
    res = []
    for h in (0.1, 0.05):
        f = sample_field(s, lambda a, b: dunkl_kernel(s, np.stack([a, b], -1), y), 2.0, h)
        L = apply_dunkl_laplacian(s, f)
        res.append(np.max(np.abs(L.values - (y @ y) * f.values)[2:-2, 2:-2]))
    assert res[1] < 1e-2 and 3.5 <= res[0] / res[1] <= 4.5


def test_operators_commute():
    s = MultiplicitySetup((1.0, 0.5))
    f = sample_field(s, lambda a, b: np.exp(-a ** 2 - b ** 2) * (1 + a + 0.5 * b + a * b), 3.0, 0.05)
    a = apply_dunkl_operator(s, 0, apply_dunkl_operator(s, 1, f)).values
    b = apply_dunkl_operator(s, 1, apply_dunkl_operator(s, 0, f)).values
    assert np.max(np.abs(a - b)[3:-3, 3:-3]) < 1e-2


def test_orbit_and_reflection():
    s = MultiplicitySetup((1.0, 1.0))
    assert SignVector((-1, 1)).apply([1.0, -2.0]).tolist() == [-1.0, -2.0]
    pts = orbit(s, [1.0, -2.0])
    assert len({tuple(p) for p in pts}) == 4
    assert len(sign_vectors(3)) == 8
    f = sample_field(s, lambda a, b: a + 2 * b ** 3, 2.0, 0.5)
    g = reflect_field(f, SignVector((-1, 1)))
    a, b = g.mesh()
    assert np.array_equal(g.values, -a + 2 * b ** 3)
    assert np.array_equal(reflect_field(f, SignVector.identity(2)).values, f.values)


def test_asymmetric_grid_rejected():
    s = MultiplicitySetup((1.0,))
    ax = make_axis(1.0, 2.0, 0.1)
    from dunkl_hardy.dunkl import SampledField
    from dunkl_hardy.quadrature import Axis
    bad = Axis(ax.nodes + 0.05, ax.weights, 1.0, 0.1, False)
    with pytest.raises(GridError):
        apply_dunkl_operator(s, 0, SampledField((bad,), np.zeros(ax.size)))


def test_field_round_trip(tmp_path):
    s = MultiplicitySetup((1.0, 0.0))
    f = sample_field(s, lambda a, b: np.exp(-a * a - b * b), 3.0, 0.25, source="gauss")
    path = tmp_path / "f.json"
    save_field(path, f)
    g = load_field(path)
    assert np.array_equal(g.values, f.values)
    assert all(np.array_equal(a.weights, b.weights) for a, b in zip(f.axes, g.axes))
    assert g.meta["source"] == "gauss"
    axes, vals, dom, _ = field_from_dict(field_to_dict(f.axes, f.values * 1j, "frequency"))
    assert dom == "frequency" and np.array_equal(vals, f.values * 1j)
    with pytest.raises(GridError):
        field_from_dict({"format": "other"})
