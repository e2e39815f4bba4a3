import math

import numpy as np
import pytest
from scipy.special import dawsn

from dunkl_hardy import kernels, transform as tr
from dunkl_hardy.dunkl import MultiplicitySetup, sample_field
from dunkl_hardy.errors import DomainError


def _gauss_poly(*x):
    r2 = sum(c ** 2 for c in x)
    return (1 + x[0] + r2) * np.exp(-r2)


@pytest.mark.parametrize("k", [(0.0,), (0.5,), (1.0,), (2.5,), (0.5, 1.0)])
def test_plancherel_and_inversion(k):
    s = MultiplicitySetup(k)
    h = 0.05 if s.n == 1 else 0.1
    f = sample_field(s, _gauss_poly, 10.0 if s.n == 1 else 8.0, h)
    assert tr.plancherel_ratio(s, f) == pytest.approx(1.0, abs=1e-4)
    back = tr.inverse_transform(tr.dunkl_transform(s, f))
    assert np.max(np.abs(back.values - f.values)) < 1e-4 * np.max(np.abs(f.values))
    assert back.meta["imag_residual"] < 1e-8


def test_gaussian_fixed_point():
    s = MultiplicitySetup((1.0, 0.3))
    g = sample_field(s, lambda *x: np.exp(-0.5 * sum(c ** 2 for c in x)), 8.0, 0.1)
    G = tr.dunkl_transform(s, g)
    assert np.max(np.abs(G.values - np.exp(-0.5 * sum(c ** 2 for c in G.mesh())))) < 1e-6


def test_classical_transform_against_closed_form():
    # Fourier transform of x exp(-x^2/2) with the unitary convention is -i xi exp(-xi^2/2)
    s = MultiplicitySetup((0.0,))
    f = sample_field(s, lambda x: x * np.exp(-x ** 2 / 2), 12.0, 0.05)
    F = tr.dunkl_transform(s, f)
    xi = F.mesh()[0]
    assert np.max(np.abs(F.values - (-1j * xi * np.exp(-xi ** 2 / 2)))) < 1e-6


def test_zero_field_and_envelope_check():
    s = MultiplicitySetup((1.0,))
    z = sample_field(s, lambda x: 0 * x, 5.0, 0.1)
    assert np.all(tr.dunkl_transform(s, z).values == 0)
    assert np.all(tr.riesz_transform(s, z, 0).values == 0)
    wide = sample_field(s, lambda x: np.exp(-x ** 2 / 50), 5.0, 0.1)
    with pytest.raises(DomainError):
        tr.dunkl_transform(s, wide)


def test_riesz_classical_dawson_oracle():
    s = MultiplicitySetup((0.0,))
    f = sample_field(s, lambda x: np.exp(-x ** 2), 12.0, 0.05)
    r = tr.riesz_transform(s, f, 0)
    oracle = -2 / math.sqrt(math.pi) * dawsn(f.axes[0].nodes)
    assert np.max(np.abs(r.values - oracle)) < 1e-4 * np.max(np.abs(oracle))


def test_riesz_parity_and_symbols():
    s = MultiplicitySetup((1.0, 0.5))
    f = sample_field(s, lambda a, b: np.exp(-a * a - 2 * b * b), 7.0, 0.1)
    for j in range(2):
        r = tr.riesz_transform(s, f, j).values
        assert np.max(np.abs(r + np.flip(r, axis=j))) < 1e-10
    xi = [np.array([0.3, 0.0, -1.0]), np.array([0.4, 0.0, 2.0])]
    total = tr.riesz_symbol(0)(xi) ** 2 + tr.riesz_symbol(1)(xi) ** 2
    assert np.allclose(total[[0, 2]], -1.0) and total[1] == 0
    assert np.all(np.abs(tr.riesz_symbol(0)(xi)) <= 1)


def test_riesz_squares_sum_to_minus_identity():
    s = MultiplicitySetup((1.0, 0.5))
    f = sample_field(s, lambda a, b: (1 + a) * np.exp(-a * a - b * b), 7.0, 0.1)
    F = tr.dunkl_transform(s, f)
    acc = 0
    for j in range(2):
        m = tr.riesz_symbol(j)
        acc = acc + tr.apply_multiplier(tr.apply_multiplier(F, m), m).values
    mask = sum(c ** 2 for c in F.mesh()) > 0
    assert np.max(np.abs(acc + F.values)[mask]) < 1e-10


def test_identity_multiplier_and_heat_diagonalization():
    s = MultiplicitySetup((1.0,))
    f = sample_field(s, _gauss_poly, 10.0, 0.05)
    F = tr.dunkl_transform(s, f)
    assert np.array_equal(tr.apply_multiplier(F, tr.identity_symbol()).values, F.values)
    t = 0.4
    hf = kernels.heat_semigroup(f, t)
    H = tr.dunkl_transform(s, hf)
    xi = F.mesh()[0]
    assert np.max(np.abs(H.values - np.exp(-t * xi ** 2) * F.values)) < 1e-4


def test_poisson_multiplier_matches_kernel_route():
    s = MultiplicitySetup((1.0,))
    f = sample_field(s, lambda x: np.exp(-x ** 2) * (1 + x), 10.0, 0.05)
    t = 0.7
    u = tr.poisson_semigroup(s, f, t)
    ax = f.axes[0]
    for x in (-1.5, 0.0, 0.35, 2.0):
        direct = float(ax.weights @ (kernels.poisson_kernel(s, t, x, ax.nodes) * f.values))
        i = np.argmin(np.abs(ax.nodes - x))
        if abs(ax.nodes[i] - x) < 1e-12:
            assert u.values[i] == pytest.approx(direct, abs=1e-4)


def test_hoermander_norm():
    s = MultiplicitySetup((1.0,))
    one = tr.hoermander_norm(tr.identity_symbol(), s, 0.1, [1.0, 7.0])
    assert one == pytest.approx(tr.hoermander_norm(tr.identity_symbol(), s, 0.1, [3.0]), rel=1e-12)
    a = tr.hoermander_norm(tr.riesz_symbol(0), s, 0.1, [1.0])
    b = tr.hoermander_norm(tr.riesz_symbol(0), s, 0.1, [10.0])
    assert a == pytest.approx(b, rel=1e-6)
    grow = [tr.hoermander_norm(tr.norm_symbol(), s, 0.1, [t]) for t in (1.0, 10.0, 100.0)]
    assert grow[0] < grow[1] < grow[2]
    with pytest.raises(DomainError):
        tr.hoermander_norm(tr.identity_symbol(), s, 0.0, [1.0])


def test_spectral_container_round_trip():
    s = MultiplicitySetup((1.0,))
    f = sample_field(s, _gauss_poly, 8.0, 0.1)
    F = tr.dunkl_transform(s, f)
    G = tr.spectral_from_dict(tr.spectral_to_dict(F))
    assert np.array_equal(G.values, F.values)
    assert np.allclose(G.space_axes[0].nodes, F.space_axes[0].nodes)


def test_inverse_batch_matches_single_route():
    s = MultiplicitySetup((1.0,))
    f = sample_field(s, _gauss_poly, 10.0, 0.05)
    F = tr.dunkl_transform(s, f)
    vals, imag = tr.inverse_batch(f.axes, F.freq_axes, F.base[None], [(tr.poisson_symbol(0.5), tr.riesz_symbol(0))])
    single = tr.inverse_transform(F.with_multiplier(tr.poisson_symbol(0.5)).with_multiplier(tr.riesz_symbol(0)))
    assert np.allclose(vals[0, 0], single.values, atol=1e-14)
    assert imag < 1e-10
