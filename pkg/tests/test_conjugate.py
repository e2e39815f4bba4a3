import numpy as np
import pytest
from scipy.special import wofz

from dunkl_hardy import conjugate
from dunkl_hardy.acceptance import atom_orbit_field
from dunkl_hardy.dunkl import MultiplicitySetup, SampledField, make_grid, sample_field
from dunkl_hardy.errors import DomainError, GridError


def gaussian_system(k, extent=10.0, step=0.05, t_max=1.0):
    setup = MultiplicitySetup((k,))
    f = sample_field(setup, lambda x: np.exp(-x ** 2), extent, step)
    t = conjugate.uniform_t_grid(0.1, t_max, step)
    return setup, conjugate.build_conjugate_system(setup, f, t)


def test_uniform_t_grid():
    t = conjugate.uniform_t_grid(0.1, 1.0, 0.1)
    assert t.size == 10
    assert t[-1] == pytest.approx(1.0)
    with pytest.raises(DomainError):
        conjugate.uniform_t_grid(0.0, 1.0, 0.1)


def test_classical_gaussian_matches_faddeeva():
    # for k = 0 the system of exp(-x^2) is the Faddeeva function w(x + it)
    _, C = gaussian_system(0.0)
    x = C.axes[0].nodes
    z = x[None, :] + 1j * C.t_grid[:, None]
    w = wofz(z)
    sel = np.abs(x) <= 4
    assert np.max(np.abs(C.u[0][:, sel] - w.real[:, sel])) < 1e-6
    assert np.max(np.abs(C.u[1][:, sel] - w.imag[:, sel])) < 1e-6


def test_zero_source_gives_zero_system():
    setup = MultiplicitySetup((1.0,))
    axes = make_grid(setup, 6.0, 0.1)
    f = SampledField(axes, np.zeros(axes[0].size))
    C = conjugate.build_conjugate_system(setup, f, [0.5, 1.0])
    assert np.all(C.u == 0)


def test_complex_source_rejected():
    setup = MultiplicitySetup((1.0,))
    axes = make_grid(setup, 6.0, 0.1)
    f = SampledField(axes, 1j * np.exp(-axes[0].nodes ** 2))
    with pytest.raises(DomainError):
        conjugate.build_conjugate_system(setup, f, [0.5])


def test_bad_t_grid_rejected():
    setup = MultiplicitySetup((1.0,))
    f = sample_field(setup, lambda x: np.exp(-x ** 2), 6.0, 0.1)
    with pytest.raises(DomainError):
        conjugate.build_conjugate_system(setup, f, [1.0, 0.5])


@pytest.mark.parametrize("k", [0.0, 0.5, 1.5])
def test_cr_residuals_shrink_with_step(k):
    res = []
    for h in (0.1, 0.05):
        setup, C = gaussian_system(k, extent=8.0, step=h, t_max=1.2)
        res.append(conjugate.cr_residuals(setup, C, window=2.0, t_range=(0.3, 1.0)))
    for fam in ("gradient", "divergence"):
        assert res[1].residuals[fam] < res[0].residuals[fam] / 3
    assert res[0].residuals["curl"] == 0.0


def test_cr_residuals_two_dimensional_curl():
    setup = MultiplicitySetup((1.0, 0.5))
    f = sample_field(setup, lambda x, y: np.exp(-x ** 2 - (y - 0.3) ** 2), 6.0, 0.1)
    C = conjugate.build_conjugate_system(setup, f, conjugate.uniform_t_grid(0.2, 1.0, 0.1))
    rep = conjugate.cr_residuals(setup, C, window=2.0)
    assert max(rep.residuals.values()) < 5e-2 * rep.scale
    assert rep.residuals["curl"] > 0


def test_cr_residuals_grid_checks():
    setup, C = gaussian_system(1.0, extent=6.0, step=0.1, t_max=0.5)
    with pytest.raises(GridError):
        conjugate.cr_residuals(MultiplicitySetup((0.5,)), C)
    with pytest.raises(GridError):
        conjugate.cr_residuals(setup, C, window=2.0, t_range=(5.0, 6.0))


def test_orbit_field_structure():
    setup = MultiplicitySetup((1.0,))
    f = sample_field(setup, lambda x: np.exp(-(x - 0.5) ** 2), 6.0, 0.1)
    C = conjugate.build_conjugate_system(setup, f, [0.5, 1.0])
    F = conjugate.build_orbit_field(setup, C)
    assert len(F.signs) == 2
    assert np.array_equal(F.components[0], C.u)
    flipped = F.components[1]
    assert np.allclose(flipped[0], C.u[0][:, ::-1])
    assert np.allclose(flipped[1], -C.u[1][:, ::-1])
    # |F| is even in x
    assert np.allclose(F.magnitude, F.magnitude[:, ::-1])


def test_orbit_field_needs_symmetric_grid():
    from dunkl_hardy.quadrature import Axis

    setup = MultiplicitySetup((1.0,))
    ax = make_grid(setup, 4.0, 0.1)[0]
    shifted = Axis(ax.nodes + 0.05, ax.weights, 1.0, 0.1, False)
    C = conjugate.ConjugateField(np.array([0.5]), (shifted,), np.zeros((2, 1, ax.size)))
    with pytest.raises(GridError):
        conjugate.build_orbit_field(setup, C)


def test_scan_zero_source_has_empty_domain():
    setup = MultiplicitySetup((1.0,))
    axes = make_grid(setup, 4.0, 0.1)
    C = conjugate.build_conjugate_system(setup, SampledField(axes, np.zeros(axes[0].size)),
                                         conjugate.uniform_t_grid(0.1, 1.0, 0.1))
    rep = conjugate.subharmonicity_scan(setup, conjugate.build_orbit_field(setup, C), 0.5)
    assert rep.checked == 0 and rep.violation_count == 0


def test_scan_rejects_bad_exponent():
    F = atom_orbit_field(MultiplicitySetup((1.0,)), 6.0, 0.1, (0.3,), t_max=1.0)
    with pytest.raises(DomainError):
        conjugate.subharmonicity_scan(MultiplicitySetup((1.0,)), F, 1.5)


def test_scan_classical_above_threshold():
    # with k = 0 and n = 1 every q > 0 works; a fine grid shows no violations
    setup = MultiplicitySetup((0.0,))
    F = atom_orbit_field(setup, 8.0, 0.05, (0.3,))
    rep = conjugate.subharmonicity_scan(setup, F, 0.6)
    assert rep.checked > 0
    assert rep.violation_count == 0


def test_scan_small_exponent_fails_with_reflections():
    setup = MultiplicitySetup((1.0,))
    F = atom_orbit_field(setup, 8.0, 0.05, (0.3,))
    assert conjugate.subharmonicity_scan(setup, F, 0.05).violation_count > 0
    q = conjugate.admissible_q_bound(setup).q
    assert conjugate.subharmonicity_scan(setup, F, q).violation_count == 0


def test_gradient_matrices_inequalities():
    setup = MultiplicitySetup((1.0,))
    F = atom_orbit_field(setup, 6.0, 0.05, (0.3,), t_max=1.0)
    ax = F.axes[0]
    i = int(np.argmin(np.abs(ax.nodes - 0.7)))
    mats = conjugate.gradient_matrices(setup, F, (5, i))
    assert len(mats) == 2
    for m in mats:
        assert m.B.shape == (2, 2)
        assert m.checks["trace_ok"] and m.checks["asym_ok"]
        assert m.checks["trace_identity_ok"]


def test_gradient_matrices_node_checks():
    setup = MultiplicitySetup((1.0,))
    F = atom_orbit_field(setup, 6.0, 0.1, (0.3,), t_max=1.0)
    with pytest.raises(GridError):
        conjugate.gradient_matrices(setup, F, (0, 30))
    with pytest.raises(DomainError):
        conjugate.gradient_matrices(setup, F, (4, F.axes[0].zero_index))


def test_q_bound_values():
    classical = conjugate.admissible_q_bound(MultiplicitySetup((0.0, 0.0)))
    assert classical.classical and classical.q == pytest.approx(0.5)
    qb = conjugate.admissible_q_bound(MultiplicitySetup((1.0,)))
    assert qb.eps == pytest.approx(1 / 12)
    assert not qb.classical and qb.admissible
    assert qb.q == pytest.approx(2 - 1 / (1 - qb.delta))
    # a larger total multiplicity shrinks eps, hence delta, and raises q
    qb2 = conjugate.admissible_q_bound(MultiplicitySetup((2.0,)))
    assert qb2.delta < qb.delta and qb2.q > qb.q


def test_components_are_harmonic_to_second_order():
    from dunkl_hardy.dunkl import dunkl_second, second_derivative

    worst = []
    for h in (0.1, 0.05):
        setup, C = gaussian_system(1.0, extent=8.0, step=h, t_max=1.2)
        x = C.axes[0].nodes
        sel = (np.abs(x) <= 2)[None, :] & (C.t_grid >= 0.3)[:, None]
        sel[0] = sel[-1] = False
        res = 0.0
        for ell in range(2):
            lap = second_derivative(C.u[ell], h, 0) + dunkl_second(C.u[ell], C.axes[0], 1)
            res = max(res, float(np.max(np.abs(lap[sel]))))
        worst.append(res)
    assert worst[1] < worst[0] / 3


def test_scan_q_one_classical():
    setup = MultiplicitySetup((0.0,))
    F = atom_orbit_field(setup, 8.0, 0.05, (0.3,))
    rep = conjugate.subharmonicity_scan(setup, F, 1.0)
    assert rep.violation_count == 0
    assert rep.min_value >= -rep.tol_fd


def test_gradient_matrices_zero_field():
    setup = MultiplicitySetup((1.0,))
    axes = make_grid(setup, 4.0, 0.1)
    C = conjugate.build_conjugate_system(setup, SampledField(axes, np.zeros(axes[0].size)),
                                         conjugate.uniform_t_grid(0.1, 1.0, 0.1))
    F = conjugate.build_orbit_field(setup, C)
    for m in conjugate.gradient_matrices(setup, F, (4, 25)):
        assert np.all(m.B == 0) and np.all(m.reflection == 0)
        assert m.checks["trace_sq"] == 0 and m.checks["trace_ok"] and m.checks["asym_ok"]


def test_gradient_matrices_classical_trace_vanishes():
    setup = MultiplicitySetup((0.0,))
    F = atom_orbit_field(setup, 6.0, 0.05, (0.3,), t_max=1.0)
    i = int(np.argmin(np.abs(F.axes[0].nodes - 0.6)))
    for m in conjugate.gradient_matrices(setup, F, (6, i)):
        assert abs(np.trace(m.B)) <= m.checks["tol_trace"] ** 0.5 + 1e-8


def test_smallest_violation_free_q():
    setup = MultiplicitySetup((1.0,))
    F = atom_orbit_field(setup, 8.0, 0.05, (0.3,))
    res = conjugate.smallest_violation_free_q(setup, F, tol=0.05)
    bound = conjugate.admissible_q_bound(setup).q
    assert res["q"] is not None
    lo, hi = res["bracket"]
    assert hi - lo <= 0.05
    # the admissible bound is violation-free, so the bisected exponent is not larger
    assert res["q"] <= bound + 0.05
    assert conjugate.paper_q_bound is conjugate.admissible_q_bound
