import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import i0

from dunkl_hardy import kernels
from dunkl_hardy.dunkl import MultiplicitySetup, make_grid
from dunkl_hardy.errors import DomainError

# 0.5 * exp(-1/2) * I_0(1/2), evaluated with scipy
BESSEL_HEAT_HALF = 0.32251763522457505


def test_classical_heat_value():
    s = MultiplicitySetup((0.0,))
    assert kernels.heat_kernel(s, 1.0, 0.0, 0.0) == pytest.approx((4 * math.pi) ** -0.5, rel=1e-14)


def test_bessel_heat_closed_form():
    assert 0.5 * math.exp(-0.5) * i0(0.5) == pytest.approx(BESSEL_HEAT_HALF, rel=1e-15)
    s = MultiplicitySetup((0.5,))
    assert kernels.bessel_heat_kernel(s, 1.0, 1.0, 1.0) == pytest.approx(BESSEL_HEAT_HALF, rel=1e-13)


@pytest.mark.parametrize("k", [0.5, 1.0, 2.2])
def test_bessel_heat_is_even_part_of_dunkl_heat(k, rng):
    s = MultiplicitySetup((k,))
    for _ in range(20):
        t = float(np.exp(rng.uniform(-3, 2)))
        x, y = rng.uniform(0.01, 5, 2)
        lhs = kernels.heat_kernel(s, t, x, y) + kernels.heat_kernel(s, t, x, -y)
        assert kernels.bessel_heat_kernel(s, t, x, y) == pytest.approx(lhs, rel=1e-10)


def test_bessel_heat_normalization():
    s = MultiplicitySetup((1.0,))
    ax = make_grid(s, 20.0, 0.02, stagger=True)[0]
    y = ax.nodes[ax.nodes > 0]
    w = ax.one_sided_weights(1)[ax.nodes > 0]
    for x in (0.3, 1.0, 2.5):
        assert w @ kernels.bessel_heat_kernel(s, 1.0, x, y) == pytest.approx(1.0, abs=1e-6)
    with pytest.raises(DomainError):
        kernels.bessel_heat_kernel(s, 1.0, -1.0, 1.0)


def test_heat_mass_and_semigroup():
    s = MultiplicitySetup((1.0,))
    axes = make_grid(s, 30.0, 0.05)
    assert kernels.heat_mass(s, 1.0, [0.7], axes) == pytest.approx(1.0, abs=1e-6)
    assert kernels.chapman_kolmogorov(1.0, 0.5, 0.5, 0.4, -1.1, axes[0]) < 1e-4


def test_heat_kernel_product_structure():
    s = MultiplicitySetup((1.0, 0.5))
    x, y = np.array([0.3, -1.0]), np.array([1.2, 0.4])
    prod = kernels.heat_kernel_1d(1.0, 0.8, 0.3, 1.2) * kernels.heat_kernel_1d(0.5, 0.8, -1.0, 0.4)
    assert kernels.heat_kernel(s, 0.8, x, y) == pytest.approx(prod, rel=1e-14)
    with pytest.raises(DomainError):
        kernels.heat_kernel(s, 0.0, x, y)


@settings(max_examples=60, deadline=None)
@given(st.floats(0, 3), st.floats(1e-2, 1e2), st.floats(-10, 10), st.floats(-10, 10))
def test_heat_kernel_positive_symmetric(k, t, x, y):
    a = kernels.heat_kernel_1d(k, t, x, y)
    assert a > 0 or a == 0.0 and (x - y) ** 2 / (4 * t) > 700
    assert a == pytest.approx(kernels.heat_kernel_1d(k, t, y, x), rel=1e-12)


def test_log_heat_kernel_matches():
    for k in (0.0, 0.7):
        for t, x, y in ((0.3, 1.0, 2.0), (2.0, -1.0, 3.0), (0.05, 4.0, -4.0)):
            v = kernels.heat_kernel_1d(k, t, x, y)
            assert kernels.log_heat_kernel_1d(k, t, x, y) == pytest.approx(math.log(v), rel=1e-12)


def test_classical_poisson_value():
    s = MultiplicitySetup((0.0,))
    assert kernels.poisson_kernel(s, 1.0, 0.0, 0.0) == pytest.approx(1 / math.pi, rel=1e-10)
    for t, x, y in ((0.1, 0.0, 2.0), (3.0, -1.0, 5.0), (0.5, 0.2, 0.25)):
        cauchy = t / (math.pi * (t * t + (x - y) ** 2))
        assert kernels.poisson_kernel(s, t, x, y) == pytest.approx(cauchy, rel=1e-8)


def test_classical_poisson_two_dims():
    s = MultiplicitySetup((0.0, 0.0))
    t, x, y = 0.7, np.array([0.3, -0.2]), np.array([1.0, 0.5])
    ref = t / (2 * math.pi * (t * t + np.sum((x - y) ** 2)) ** 1.5)
    assert kernels.poisson_kernel(s, t, x, y) == pytest.approx(ref, rel=1e-8)


def test_poisson_mass_symmetry_and_rule_convergence(rng):
    s = MultiplicitySetup((1.0,))
    assert kernels.poisson_mass(s, 1.0, 0.5) == pytest.approx(1.0, abs=1e-4)
    rule = kernels.default_rule()
    fine = rule.refined()
    for _ in range(10):
        t = float(np.exp(rng.uniform(-2, 2)))
        x, y = rng.uniform(-4, 4, 2)
        a = kernels.poisson_kernel(s, t, x, y)
        assert a == pytest.approx(kernels.poisson_kernel(s, t, y, x), rel=1e-12)
        assert abs(a - kernels.poisson_kernel(s, t, x, y, fine)) < 1e-8 * max(a, 1.0)
    assert rule.integrate(lambda u: np.ones_like(u)) == pytest.approx(math.sqrt(math.pi), rel=1e-10)
    assert math.isfinite(kernels.poisson_lp_mass(s, 1.0, 0.0, 2))


def test_heat_regimes_reports(rng):
    reps = kernels.check_heat_regimes(1.0, kernels.heat_regime_samples(2000, rng))
    assert [r.regime for r in reps] == list(kernels.HEAT_REGIMES)
    for r in reps:
        assert r.min_ratio > 0 and math.isfinite(r.spread)
    # k = 0 near the origin: ratio is 1 / (2 Gamma(1/2)) at t = 1
    near = kernels.heat_regime_ratios(0.0, "near", np.array([1.0]), np.array([0.0]), np.array([0.0]))
    assert near[0] == pytest.approx(1 / (2 * math.sqrt(math.pi)), rel=1e-14)


def test_regime_boundary_agreement():
    # on xy = t both comparands apply; their ratios differ by at most a factor e
    t = np.array([0.5, 2.0, 10.0])
    x = np.sqrt(t) * np.array([0.5, 1.0, 3.0])
    y = t / x
    a = kernels.heat_regime_ratios(1.0, "near", t, x, y)
    b = kernels.heat_regime_ratios(1.0, "same-sign", t, x, y)
    assert np.all(np.abs(np.log(a / b)) <= 1.0 + 1e-12)
    with pytest.raises(DomainError):
        kernels.check_heat_regimes(1.0, {"near": (t, x, y)})


def test_poisson_bounds(rng):
    s = MultiplicitySetup((1.0,))
    rep = kernels.check_poisson_bounds(s, kernels.poisson_bound_samples(s, 1000, rng), 0.3)
    assert math.isfinite(rep.max_ratio) and rep.min_ratio > 0
    assert math.isfinite(rep.extra["sup_weighted"])
    with pytest.raises(DomainError):
        kernels.check_poisson_bounds(s, kernels.poisson_bound_samples(s, 5, rng), 0.34)
    # P_t(0,0) mu(B(0,t)) is constant in t by homogeneity
    from dunkl_hardy.geometry import mu_ball
    vals = [kernels.poisson_kernel(s, t, 0.0, 0.0) * mu_ball(s, 0.0, t) for t in (1.0, 10.0, 1000.0)]
    assert np.ptp(vals) < 1e-8 * vals[0]


def test_kernel_csv(tmp_path):
    path = tmp_path / "k.csv"
    kernels.write_kernel_csv(path, [1.0, 2.0], [0.0, 1.0], [0.0, 0.5], [0.3, 0.2], [0.3, 0.1])
    lines = path.read_text().splitlines()
    assert lines[0] == "t,x1,y1,kernel,comparand,ratio"
    assert lines[2].endswith(",2.0")
