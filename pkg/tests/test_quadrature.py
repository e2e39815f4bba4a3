import math

import numpy as np
import pytest

from dunkl_hardy.errors import GridError
from dunkl_hardy.quadrature import gauss_legendre_panels, make_axis, riemann_zeta


def _moment(k, p):
    # int_R |y|^{2k} y^{2p} exp(-y^2) dy
    return math.gamma(k + p + 0.5)


@pytest.mark.parametrize("k", [0.0, 0.3, 0.5, 1.0, 2.5])
@pytest.mark.parametrize("stagger", [False, True])
def test_gaussian_moments(k, stagger):
    ax = make_axis(k, 12.0, 0.1, stagger=stagger)
    for p in range(4):
        got = ax.integrate(ax.nodes ** (2 * p) * np.exp(-ax.nodes ** 2))
        assert got == pytest.approx(_moment(k, p), rel=1e-10)


@pytest.mark.parametrize("stagger", [False, True])
def test_one_sided_weights_halve_even_integrals(stagger):
    ax = make_axis(1.3, 10.0, 0.1, stagger=stagger)
    f = np.exp(-ax.nodes ** 2) * (1 + ax.nodes ** 2)
    whole = ax.integrate(f)
    for side in (1, -1):
        assert ax.one_sided_weights(side) @ f == pytest.approx(whole / 2, rel=1e-8)


def test_one_sided_weights_on_odd_integrand():
    ax = make_axis(0.7, 10.0, 0.05)
    f = ax.nodes * np.exp(-ax.nodes ** 2)
    # int_0^inf y^{2k+1} exp(-y^2) dy = Gamma(k+1)/2
    assert ax.one_sided_weights(1) @ f == pytest.approx(math.gamma(1.7) / 2, rel=1e-8)


def test_axis_layout():
    ax = make_axis(1.0, 1.0, 0.25)
    assert np.allclose(ax.nodes, np.linspace(-1, 1, 9))
    assert ax.zero_index == 4 and ax.is_symmetric()
    st = make_axis(1.0, 1.0, 0.25, stagger=True)
    assert st.zero_index is None and 0.0 not in st.nodes and st.is_symmetric()
    with pytest.raises(GridError):
        make_axis(1.0, 0.1, 0.1)
    with pytest.raises(GridError):
        make_axis(-1.0, 1.0, 0.1)


def test_zeta_and_panels():
    assert riemann_zeta(2.0) == pytest.approx(math.pi ** 2 / 6, rel=1e-13)
    assert riemann_zeta(0.5) == pytest.approx(-1.4603545088095868, rel=1e-12)
    v, w = gauss_legendre_panels(np.array([0.0, 0.5, 2.0]), 8)
    assert np.sum(w * v ** 5) == pytest.approx(2.0 ** 6 / 6, rel=1e-14)
