import numpy as np
import pytest

from dunkl_hardy import hardy
from dunkl_hardy.dunkl import MultiplicitySetup, SampledField, make_grid, sample_field
from dunkl_hardy.errors import DomainError, GridError


@pytest.fixture(scope="module")
def grid1():
    setup = MultiplicitySetup((1.0,))
    return setup, make_grid(setup, 12.0, 0.05)


@pytest.mark.parametrize("profile", hardy.ATOM_PROFILES)
@pytest.mark.parametrize("center", [0.0, 1.3, -2.0])
def test_atom_invariants(grid1, profile, center):
    setup, axes = grid1
    a = hardy.make_atom(setup, (center,), 0.8, profile, axes=axes)
    vals = a.field.values
    assert abs(a.mean) < 1e-12
    assert a.sup_bound == pytest.approx(1.0)
    assert np.max(np.abs(vals)) * a.mu_ball <= 1.01
    outside = np.abs(axes[0].nodes - center) >= 0.8
    assert np.all(vals[outside] == 0)


def test_atom_two_dimensional():
    setup = MultiplicitySetup((0.5, 1.0))
    axes = make_grid(setup, 5.0, 0.1)
    a = hardy.make_atom(setup, (0.4, -0.6), 1.0, "radial-cancel", axes=axes)
    assert abs(a.mean) < 1e-12
    assert a.describe()["profile"] == "radial-cancel"


def test_atom_argument_checks(grid1):
    setup, axes = grid1
    with pytest.raises(GridError):
        hardy.make_atom(setup, (11.5,), 1.0, axes=axes)
    with pytest.raises(GridError):
        hardy.make_atom(setup, (0.0,), 0.1, axes=axes)
    with pytest.raises(DomainError):
        hardy.make_atom(setup, (0.0,), 1.0, "square", axes=axes)
    with pytest.raises(DomainError):
        hardy.make_atom(setup, (0.0, 1.0), 1.0, axes=axes)
    with pytest.raises(GridError):
        hardy.make_atom(setup, (0.0,), 1.0)


def test_log_t_set():
    t = hardy.log_t_set(5, 1e-2, 1e2)
    assert np.allclose(t, [1e-2, 1e-1, 1, 10, 100])
    r = hardy.refine_t_set(t)
    assert r.size == 9 and np.allclose(r[1], np.sqrt(1e-3))
    with pytest.raises(DomainError):
        hardy.log_t_set(0)


def test_maximal_function_grows_with_time_set(grid1):
    setup, axes = grid1
    f = hardy.make_atom(setup, (0.5,), 1.0, "odd", axes=axes).field
    coarse = hardy.maximal_function(setup, f, "heat", hardy.log_t_set(8))
    fine = hardy.maximal_function(setup, f, "heat", hardy.refine_t_set(hardy.log_t_set(8)))
    assert np.all(fine.values >= coarse.values - 1e-15)
    assert np.all(coarse.values >= np.abs(f.values))


def test_maximal_function_heat_and_poisson_agree_on_scale(grid1):
    setup, axes = grid1
    f = sample_field(setup, lambda x: np.exp(-x ** 2), 12.0, 0.05)
    mh = hardy.maximal_function(setup, f, "heat", hardy.log_t_set(10))
    mp = hardy.maximal_function(setup, f, "poisson", hardy.log_t_set(10))
    # for a positive bump both suprema are attained as t -> 0 near its peak
    i = axes[0].zero_index
    assert mh.values[i] == pytest.approx(1.0)
    assert mp.values[i] == pytest.approx(1.0, abs=1e-6)
    with pytest.raises(DomainError):
        hardy.maximal_function(setup, f, "wave")
    with pytest.raises(DomainError):
        hardy.maximal_function(setup, f, t_set=[-1.0])


def test_h1_ratio_bounded_for_atoms(grid1):
    setup, axes = grid1
    atoms = [hardy.make_atom(setup, (c,), r, p, axes=axes)
             for c, r, p in [(0.0, 1.0, "odd"), (1.5, 0.6, "radial-cancel"), (-2.0, 1.5, "odd")]]
    reps = hardy.h1_family(setup, [a.field for a in atoms], hardy.log_t_set(20))
    for rep in reps:
        assert not rep.flagged
        assert 0.1 < rep.characterization_ratio < 10
        assert rep.maximal_heat_l1 >= rep.l1_norm * 0.99
        assert rep.t_refinement_delta >= 0


def test_h1_flags_nonzero_mean(grid1):
    setup, _ = grid1
    f = sample_field(setup, lambda x: np.exp(-x ** 2), 12.0, 0.05)
    rep = hardy.h1_characterization_ratio(setup, f, hardy.log_t_set(10), refine=False)
    assert rep.flagged and "mean" in rep.reason
    assert np.isnan(rep.t_refinement_delta)


def test_h1_rejects_undecayed_field(grid1):
    setup, axes = grid1
    f = SampledField(axes, np.ones(axes[0].size))
    with pytest.raises(DomainError):
        hardy.h1_family(setup, [f])


def test_poisson_decay_monotone(grid1):
    setup, axes = grid1
    f = hardy.make_atom(setup, (0.0,), 1.0, "odd", axes=axes).field
    table = hardy.poisson_decay_check(setup, f, 0.1, radius_seq=(2, 5, 10, 50))
    assert table.monotone
    assert table.truncated == [False, False, False, True]
    assert table.sup[0] > table.sup[-1]
    with pytest.raises(DomainError):
        hardy.poisson_decay_check(setup, f, 0.0)


def test_maximal_l2_ratio_is_moderate(grid1):
    setup, axes = grid1
    fields = [sample_field(setup, lambda x, c=c: np.exp(-(x - c) ** 2), 12.0, 0.05) for c in (0.0, 1.0)]
    worst, ratios = hardy.maximal_l2_ratio(setup, fields, hardy.log_t_set(15))
    assert len(ratios) == 2
    assert 1.0 <= worst < 5.0


@pytest.fixture(scope="module")
def half_grid():
    setup = MultiplicitySetup((1.0,))
    axes = make_grid(setup, 10.0, 0.05, stagger=True)
    x = axes[0].nodes[axes[0].nodes > 0]
    return setup, axes, np.exp(-x ** 2) * (1 + x ** 2)


def test_bessel_fold_is_even(half_grid):
    setup, axes, half = half_grid
    f = hardy.bessel_fold(setup, axes, half)
    assert np.array_equal(f.values, f.values[::-1])
    nodes, vals = hardy.positive_part(f)
    assert np.array_equal(vals, half)


def test_bessel_fold_fills_origin():
    setup = MultiplicitySetup((1.0,))
    axes = make_grid(setup, 4.0, 0.1)
    x = axes[0].nodes[axes[0].nodes > 0]
    f = hardy.bessel_fold(setup, axes, 1 - x ** 2 + x ** 4)
    assert f.values[axes[0].zero_index] == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(GridError):
        hardy.bessel_fold(setup, axes, np.ones(3))


def test_fold_identities(half_grid):
    setup, axes, half = half_grid
    rep = hardy.fold_identities(setup, axes, half, t=0.5, nodes=50)
    assert rep.semigroup_deviation < 1e-8
    assert rep.riesz_deviation < 1e-6
    assert rep.h1_constant == pytest.approx(rep.expected_constant, rel=1e-6)


def test_bessel_routines_need_staggered_axes():
    setup = MultiplicitySetup((1.0,))
    axes = make_grid(setup, 4.0, 0.1)
    x = axes[0].nodes[axes[0].nodes > 0]
    with pytest.raises(GridError):
        hardy.bessel_heat_semigroup(setup, axes, np.exp(-x ** 2), 0.5)
