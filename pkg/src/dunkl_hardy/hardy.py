"""Atoms, maximal functions, the Riesz characterization ratio and Bessel folding.

Everything is computed on a truncated tensor grid.  Maximal functions are
suprema over a finite logarithmic set of times, so they are lower bounds of
the true suprema; L1 norms are integrals over the grid only.  Both
truncations are quantified in the reports (refinement of the time set,
growth between nested boxes).
"""

import math
from dataclasses import dataclass, field

import numpy as np

from ._backend import core
from .dunkl import SampledField, make_grid
from .errors import DomainError, GridError
from .geometry import mu_ball
from .kernels import bessel_heat_kernel
from .transform import (
    _axis_const,
    dunkl_transform,
    frequency_axes,
    inverse_batch,
    normalized_bessel_j,
    poisson_symbol,
    riesz_symbol,
)

__all__ = [
    "Atom",
    "H1Report",
    "DecayTable",
    "FoldReport",
    "ATOM_PROFILES",
    "log_t_set",
    "refine_t_set",
    "make_atom",
    "random_atoms",
    "maximal_function",
    "maximal_stack",
    "h1_characterization_ratio",
    "h1_family",
    "poisson_decay_check",
    "maximal_l2_ratio",
    "positive_part",
    "bessel_fold",
    "bessel_heat_semigroup",
    "bessel_riesz",
    "fold_identities",
]

ATOM_PROFILES = ("odd", "radial-cancel")
BUMP_POWER = 8
MEAN_TOL = 1e-8


def log_t_set(count=40, t_min=1e-3, t_max=1e3):
    """Logarithmically spaced times, endpoints included."""
    if count < 1:
        raise DomainError("the time set must not be empty")
    if not 0 < t_min <= t_max:
        raise DomainError("need 0 < t_min <= t_max")
    return np.geomspace(t_min, t_max, count)


def refine_t_set(t_set):
    """Insert the geometric midpoint between neighbours (doubles the density)."""
    t = np.sort(np.asarray(t_set, float))
    mids = np.sqrt(t[1:] * t[:-1])
    return np.sort(np.concatenate([t, mids]))


@dataclass(frozen=True, eq=False)
class Atom:
    """A mean-zero function supported in a ball with ``sup |a| mu(B) = C_a``.

    Attributes
    ----------
    center, radius : ball
    profile : str
    field : SampledField
    mu_ball : float
    sup_bound : float
        ``C_a = max |a| * mu(B)`` on the grid.
    mean : float
        ``int a dmu`` by the grid quadrature.
    """

    center: tuple
    radius: float
    profile: str
    field: SampledField
    mu_ball: float
    sup_bound: float
    mean: float

    def describe(self):
        return {"center": list(self.center), "radius": self.radius, "profile": self.profile,
                "mu_ball": self.mu_ball, "sup_bound": self.sup_bound, "mean": self.mean}


def _bump(rho2):
    return np.where(rho2 < 1, (1 - np.minimum(rho2, 1.0)) ** BUMP_POWER, 0.0)


def make_atom(setup, center, radius, profile="radial-cancel", axes=None, extent=None, step=None):
    """Smooth atom supported in ``B(center, radius)``.

    With ``s = (x - center)/radius`` and the wide bump ``w = (1 - |s|^2)_+^p``
    the raw profile is ``s_1 w`` (``odd``) or ``(1 - 4|s|^2)_+^p``
    (``radial-cancel``).  The mu-mean is then removed by subtracting a
    multiple of ``w`` and the result is scaled so that
    ``max |a| * mu(B) = 1`` on the grid.

    Parameters
    ----------
    setup : MultiplicitySetup
    center : sequence of float
    radius : float
    profile : {"odd", "radial-cancel"}
    axes : tuple of Axis, optional
        Grid to sample on; otherwise built from ``extent`` and ``step``.

    Returns
    -------
    Atom
    """
    if profile not in ATOM_PROFILES:
        raise DomainError(f"profile must be one of {ATOM_PROFILES}")
    if radius <= 0:
        raise DomainError("radius must be positive")
    c = np.atleast_1d(np.asarray(center, float))
    if c.shape != (setup.n,):
        raise DomainError("center must have n coordinates")
    if axes is None:
        if extent is None or step is None:
            raise GridError("give either axes or extent and step")
        axes = make_grid(setup, extent, step)
    for j, ax in enumerate(axes):
        if abs(c[j]) + radius > ax.extent - 2 * ax.step:
            raise GridError("ball is not inside the grid domain")
        if radius < 4 * ax.step:
            raise GridError("ball is resolved by fewer than four grid steps")
    X = np.meshgrid(*[ax.nodes for ax in axes], indexing="ij")
    s = [(xj - cj) / radius for xj, cj in zip(X, c)]
    rho2 = sum(v ** 2 for v in s)
    wide = _bump(rho2)
    raw = s[0] * wide if profile == "odd" else _bump(4 * rho2)
    probe = SampledField(tuple(axes), raw)
    a = raw - float(probe.integrate()) / float(probe.integrate(wide)) * wide
    mu = mu_ball(setup, tuple(c), radius)
    a = a / (np.max(np.abs(a)) * mu)
    f = SampledField(tuple(axes), a, {"source": "atom", "center": c.tolist(), "radius": float(radius),
                                      "profile": profile})
    return Atom(tuple(c.tolist()), float(radius), profile, f, float(mu),
                float(np.max(np.abs(a)) * mu), float(f.integrate()))


def random_atoms(setup, count, rng, axes, radius_range=(0.5, 2.0), center_range=3.0):
    """``count`` atoms with random centers, radii and alternating profiles."""
    out = []
    for i in range(count):
        r = float(rng.uniform(*radius_range))
        c = rng.uniform(-center_range, center_range, setup.n)
        out.append(make_atom(setup, c, r, ATOM_PROFILES[i % 2], axes=axes))
    return out


def _apply_heat(axes, stack, t):
    vals = stack
    for j, ax in enumerate(axes):
        op = core.heat_matrix(ax.k, float(t), ax.nodes, ax.nodes) * ax.weights[None, :]
        vals = np.moveaxis(np.tensordot(op, vals, axes=(1, j + 1)), 0, j + 1)
    return vals


def maximal_stack(setup, axes, stack, semigroup="heat", t_set=None, include_limit=True, freq=None):
    """Maximal functions of several fields sharing one grid.

    Parameters
    ----------
    setup : MultiplicitySetup
    axes : tuple of Axis
    stack : ndarray
        Fields stacked on a leading axis.
    semigroup : {"heat", "poisson"}
        The heat semigroup is applied with kernel matrices, the Poisson
        semigroup with the multiplier ``exp(-t|xi|)``.
    t_set : array_like, optional
        Defaults to :func:`log_t_set`.
    include_limit : bool
        Include ``|f|``, the limit as ``t -> 0``, in the supremum.

    Returns
    -------
    ndarray
        Same shape as ``stack``.
    """
    t_set = log_t_set() if t_set is None else np.asarray(t_set, float)
    if t_set.size == 0:
        raise DomainError("the time set must not be empty")
    if np.any(t_set <= 0):
        raise DomainError("times must be positive")
    stack = np.asarray(stack, float)
    best = np.abs(stack) if include_limit else np.zeros_like(stack)
    if semigroup == "heat":
        for t in t_set:
            best = np.maximum(best, np.abs(_apply_heat(axes, stack, t)))
    elif semigroup == "poisson":
        freq = freq or frequency_axes(axes)
        bases = np.stack([dunkl_transform(setup, SampledField(tuple(axes), v), freq).base for v in stack])
        chains = [(poisson_symbol(float(t)),) for t in t_set]
        vals, _ = inverse_batch(axes, freq, bases, chains)
        best = np.maximum(best, np.max(np.abs(vals), axis=0))
    else:
        raise DomainError("semigroup must be 'heat' or 'poisson'")
    return best


def maximal_function(setup, f, semigroup="heat", t_set=None, include_limit=True, freq=None):
    """Pointwise ``max_t |T_t f|`` over ``t_set`` for ``T = heat`` or ``poisson``.

    A lower bound of the supremum over all ``t > 0``; refining ``t_set``
    can only increase it.
    """
    vals = maximal_stack(setup, f.axes, f.values[None], semigroup, t_set, include_limit, freq)[0]
    return f.with_values(vals, maximal=semigroup)


def _box_l1(axes, values, half_width):
    """``int |v| dmu`` over ``max_j |x_j| <= half_width``."""
    mask = np.ones(values.shape[-len(axes):], bool)
    for j, ax in enumerate(axes):
        sh = [1] * len(axes)
        sh[j] = ax.size
        mask = mask & (np.abs(ax.nodes.reshape(sh)) <= half_width + 1e-12)
    out = np.abs(values) * mask
    for ax in axes:
        out = np.tensordot(ax.weights, out, axes=(0, -len(axes)))
    return out


@dataclass
class H1Report:
    """L1 data of one function and the two-sided comparison ratio.

    ``characterization_ratio = (l1_norm + sum(riesz_l1)) / maximal_heat_l1``.
    ``t_refinement_delta`` is the relative change of ``maximal_heat_l1``
    when the time set is refined; ``box_growth`` is the relative growth of
    ``maximal_heat_l1`` from the half-width box to the full grid.
    """

    l1_norm: float
    maximal_heat_l1: float
    maximal_poisson_l1: float
    riesz_l1: list
    characterization_ratio: float
    mean: float
    t_refinement_delta: float
    box_growth: float
    flagged: bool
    reason: str = ""
    extra: dict = field(default_factory=dict)

    def to_dict(self):
        return {"l1_norm": self.l1_norm, "maximal_heat_l1": self.maximal_heat_l1,
                "maximal_poisson_l1": self.maximal_poisson_l1, "riesz_l1": list(self.riesz_l1),
                "characterization_ratio": self.characterization_ratio, "mean": self.mean,
                "t_refinement_delta": self.t_refinement_delta, "box_growth": self.box_growth,
                "flagged": self.flagged, "reason": self.reason, **self.extra}


def h1_family(setup, fields, t_set=None, freq=None, refine=True, tail_tol=1e-6):
    """:class:`H1Report` for every field in ``fields`` (one shared grid).

    Fields are flagged when their mean is not negligible relative to their
    L1 norm: such a function is not in H1 and its maximal L1 norm grows
    without bound with the domain, so the ratio says nothing.
    """
    fields = list(fields)
    if not fields:
        return []
    axes = fields[0].axes
    for f in fields:
        if not f.same_grid(fields[0]):
            raise GridError("fields must share one grid")
        if f.edge_ratio() > tail_tol:
            raise DomainError("field does not decay at the grid boundary")
    t_set = log_t_set() if t_set is None else np.asarray(t_set, float)
    stack = np.stack([np.real(f.values) for f in fields])
    freq = freq or frequency_axes(axes)
    heat = maximal_stack(setup, axes, stack, "heat", t_set)
    pois = maximal_stack(setup, axes, stack, "poisson", t_set, freq=freq)
    bases = np.stack([dunkl_transform(setup, SampledField(axes, v), freq).base for v in stack])
    riesz, _ = inverse_batch(axes, freq, bases, [(riesz_symbol(j),) for j in range(setup.n)])
    full = max(ax.extent for ax in axes)
    l1 = _box_l1(axes, stack, full)
    heat_l1 = _box_l1(axes, heat, full)
    heat_half = _box_l1(axes, heat, 0.5 * full)
    pois_l1 = _box_l1(axes, pois, full)
    riesz_l1 = _box_l1(axes, riesz, full)  # (n, B)
    if refine:
        t_sorted = np.sort(t_set)
        mids = np.sqrt(t_sorted[1:] * t_sorted[:-1])
        extra = maximal_stack(setup, axes, stack, "heat", mids) if mids.size else heat
        fine = _box_l1(axes, np.maximum(heat, extra), full)
        delta = np.abs(fine - heat_l1) / np.where(heat_l1 > 0, heat_l1, 1.0)
    else:
        delta = np.full(len(fields), np.nan)
    reports = []
    for b, f in enumerate(fields):
        mean = float(f.integrate(stack[b]))
        if heat_l1[b] <= 0:
            raise DomainError("maximal function vanishes; the ratio is undefined")
        ratio = (l1[b] + riesz_l1[:, b].sum()) / heat_l1[b]
        bad = abs(mean) > MEAN_TOL * max(l1[b], 1e-300)
        reports.append(H1Report(float(l1[b]), float(heat_l1[b]), float(pois_l1[b]),
                                [float(v) for v in riesz_l1[:, b]], float(ratio), mean,
                                float(delta[b]), float(heat_l1[b] / heat_half[b] - 1), bool(bad),
                                "nonzero mean: not in H1" if bad else ""))
    return reports


def h1_characterization_ratio(setup, f, t_set=None, freq=None, refine=True):
    """``(||f||_1 + sum_j ||R_j f||_1) / ||h_* f||_1`` with diagnostics."""
    return h1_family(setup, [f], t_set, freq, refine)[0]


@dataclass
class DecayTable:
    eps: float
    radii: list
    sup: list
    monotone: bool
    truncated: list

    def to_dict(self):
        return {"eps": self.eps, "radii": self.radii, "sup": self.sup, "monotone": self.monotone,
                "truncated": self.truncated}


def poisson_decay_check(setup, f, eps, radius_seq=(5, 10, 20, 50), t_set=None, freq=None):
    """``sup |P_{t+eps} f(x)|`` over grid nodes and times with ``|x| + t >= R``.

    ``truncated[i]`` is true when the spatial grid does not reach ``R``, so
    that only large times contribute to that row.
    """
    if eps <= 0:
        raise DomainError("eps must be positive")
    t_set = np.concatenate([[0.0], np.geomspace(1e-2, 1e3, 51)]) if t_set is None else np.asarray(t_set, float)
    freq = freq or frequency_axes(f.axes)
    base = dunkl_transform(setup, f.with_values(np.real(f.values)), freq).base
    vals, _ = inverse_batch(f.axes, freq, base[None], [(poisson_symbol(float(t + eps)),) for t in t_set])
    vals = np.abs(vals[:, 0])
    r = np.sqrt(sum(c ** 2 for c in f.mesh()))
    reach = max(float(np.max(r)), 0.0)
    sups = []
    for R in radius_seq:
        best = 0.0
        for i, t in enumerate(t_set):
            sel = r + t >= R
            if sel.any():
                best = max(best, float(vals[i][sel].max()))
        sups.append(best)
    mono = all(a >= b - 1e-15 for a, b in zip(sups, sups[1:]))
    return DecayTable(float(eps), [float(R) for R in radius_seq], sups, mono,
                      [bool(R > reach) for R in radius_seq])


def maximal_l2_ratio(setup, fields, t_set=None, freq=None):
    """``max ||P_* f||_2 / ||f||_2`` over a battery of fields on one grid."""
    fields = list(fields)
    axes = fields[0].axes
    stack = np.stack([np.real(f.values) for f in fields])
    pm = maximal_stack(setup, axes, stack, "poisson", t_set, freq=freq)
    ratios = [math.sqrt(float(fields[0].integrate(pm[b] ** 2)) / float(fields[0].integrate(stack[b] ** 2)))
              for b in range(len(fields))]
    return max(ratios), ratios


# Bessel setting on the positive orthant

def _positive_index(ax):
    return np.nonzero(ax.nodes > 0)[0]


def positive_part(f):
    """Nodes and values of ``f`` on the open positive orthant."""
    idx = [_positive_index(ax) for ax in f.axes]
    return [ax.nodes[i] for ax, i in zip(f.axes, idx)], f.values[np.ix_(*idx)]


def bessel_fold(setup, axes, half_values):
    """Even extension of orthant samples to the full symmetric grid.

    ``half_values`` are samples at the positive nodes of ``axes``.  On
    unstaggered axes the origin plane is filled by the even quartic
    through the first three positive nodes.
    """
    vals = np.asarray(half_values)
    expect = tuple(_positive_index(ax).size for ax in axes)
    if vals.shape != expect:
        raise GridError(f"orthant samples of shape {vals.shape}, expected {expect}")
    for ax in axes:
        if not ax.is_symmetric():
            raise GridError("folding needs symmetric axes")
    out = vals
    for j, ax in enumerate(axes):
        parts = [np.flip(out, axis=j)]
        if not ax.stagger:
            first = np.take(out, [0, 1, 2], axis=j)
            # even quartic in x through x = h, 2h, 3h, evaluated at 0
            origin = np.tensordot(np.array([15.0, -6.0, 1.0]) / 10.0, first, axes=(0, j))
            parts.append(np.expand_dims(origin, j))
        parts.append(out)
        out = np.concatenate(parts, axis=j)
    return SampledField(tuple(axes), out, {"source": "bessel-fold"})


def _check_half_axes(axes):
    for ax in axes:
        if not ax.stagger:
            raise GridError("the orthant routines need staggered axes (0 must not be a node)")


def _half_weights(ax):
    """One-sided rule for ``y^{2k} dy`` on the positive nodes."""
    return ax.one_sided_weights(1)[_positive_index(ax)]


def _folded_weights(ax):
    """Full-line rule folded onto the positive nodes; exact-order for even integrands."""
    return 2.0 * ax.weights[_positive_index(ax)]


def bessel_heat_semigroup(setup, axes, half_values, t):
    """Bessel heat semigroup on the open orthant by kernel quadrature.

    Uses the Bessel heat kernel with one-sided weights for ``y^{2k} dy``;
    independent of the full-line Dunkl heat kernel.
    """
    _check_half_axes(axes)
    vals = np.asarray(half_values, float)
    for j, ax in enumerate(axes):
        x = ax.nodes[_positive_index(ax)]
        one = type(setup)((ax.k,))
        K = bessel_heat_kernel(one, t, x[:, None, None], x[None, :, None]) * _half_weights(ax)[None, :]
        vals = np.moveaxis(np.tensordot(K, vals, axes=(1, j)), 0, j)
    return vals


def _hankel_mats(ax, fx, odd=False):
    """Forward (``y -> xi``) and inverse (``xi -> x``) orthant matrices."""
    x = ax.nodes[_positive_index(ax)]
    xi = fx.nodes[fx.nodes >= 0]
    # y-integrands are even, so the folded full-line rule keeps its accuracy
    wx = _folded_weights(ax)
    wxi = fx.one_sided_weights(1)[fx.nodes >= 0]
    c = _axis_const(ax.k)
    fwd = normalized_bessel_j(ax.k - 0.5, np.multiply.outer(xi, x)) * wx[None, :] / c
    w = np.multiply.outer(x, xi)
    if odd:
        kern = w / (2 * ax.k + 1) * normalized_bessel_j(ax.k + 0.5, w)
    else:
        kern = normalized_bessel_j(ax.k - 0.5, w)
    # the half-line xi integral counts once for each of the two half-lines
    inv = kern * wxi[None, :] * (2.0 / c)
    return fwd, inv, xi


def bessel_riesz(setup, axes, half_values, j, freq=None):
    """Bessel Riesz transform on the orthant through Hankel transforms.

    ``R_j f(x) = -c^{-1} int (xi_j/|xi|) Hf(xi) phi_j(x, xi) dmu_+(xi)`` where
    ``phi_j`` is the product of normalized Bessel functions with the
    ``j``-th factor replaced by its odd companion.  Its even extension is
    ``|R_j|`` of the even extension of ``f`` on the full line.
    """
    _check_half_axes(axes)
    if not 0 <= j < setup.n:
        raise DomainError(f"axis {j} out of range")
    freq = freq or frequency_axes(axes)
    H = np.asarray(half_values, float)
    xis = []
    invs = []
    for i, (ax, fx) in enumerate(zip(axes, freq)):
        fwd, inv, xi = _hankel_mats(ax, fx, odd=(i == j))
        H = np.moveaxis(np.tensordot(fwd, H, axes=(1, i)), 0, i)
        xis.append(xi)
        invs.append(inv)
    grid = np.meshgrid(*xis, indexing="ij")
    r = np.sqrt(sum(g ** 2 for g in grid))
    with np.errstate(divide="ignore", invalid="ignore"):
        H = H * np.where(r > 0, grid[j] / np.where(r > 0, r, 1.0), 0.0)
    for i, inv in enumerate(invs):
        H = np.moveaxis(np.tensordot(inv, H, axes=(1, i)), 0, i)
    return -H


@dataclass
class FoldReport:
    t: float
    semigroup_deviation: float
    riesz_deviation: float
    nodes: int
    h1_constant: float
    expected_constant: float

    def to_dict(self):
        return {"t": self.t, "semigroup_deviation": self.semigroup_deviation,
                "riesz_deviation": self.riesz_deviation, "nodes": self.nodes,
                "h1_constant": self.h1_constant, "expected_constant": self.expected_constant}


def fold_identities(setup, axes, half_values, t=0.5, nodes=100, rng=None, freq=None):
    """Compare the Bessel operators with the Dunkl operators on even extensions.

    * ``max |(e^{tB} f)~ - e^{tL} f~|`` at ``nodes`` random orthant nodes;
    * ``max | |R_j f~| - |(R_j f)~| | / max |R_j f~|`` at the same nodes;
    * ``c = (||f||_1 + sum ||R_j f||_1) / (||f~||_1 + sum ||R_j f~||_1)``
      with the orthant norms on the left, expected ``2^-n``.

    Returns
    -------
    FoldReport
    """
    from .kernels import heat_semigroup
    from .transform import riesz_transform

    _check_half_axes(axes)
    rng = rng or np.random.default_rng(0)
    freq = freq or frequency_axes(axes)
    ft = bessel_fold(setup, axes, half_values)
    idx = [_positive_index(ax) for ax in axes]
    shape = tuple(i.size for i in idx)
    picks = [tuple(int(rng.integers(0, s)) for s in shape) for _ in range(nodes)]

    def at(arr, p):
        return float(arr[p])

    def full_at(arr, p):
        return float(arr[tuple(i[q] for i, q in zip(idx, p))])

    bh = bessel_heat_semigroup(setup, axes, half_values, t)
    dh = heat_semigroup(ft, t).values
    semi = max(abs(at(bh, p) - full_at(dh, p)) for p in picks)
    riesz_dev = 0.0
    half_norm = _orthant_l1(axes, half_values)
    full_norm = ft.lp_norm(1)
    for j in range(setup.n):
        br = bessel_riesz(setup, axes, half_values, j, freq)
        dr = riesz_transform(setup, ft, j, freq).values
        scale = float(np.max(np.abs(dr)))
        dev = max(abs(abs(at(br, p)) - abs(full_at(dr, p))) for p in picks)
        riesz_dev = max(riesz_dev, dev / scale if scale > 0 else dev)
        half_norm += _orthant_l1(axes, br)
        full_norm += float(ft.integrate(np.abs(dr)))
    c = half_norm / full_norm if full_norm > 0 else math.nan
    return FoldReport(float(t), float(semi), float(riesz_dev), len(picks), float(c), 2.0 ** -setup.n)


def _orthant_l1(axes, values):
    out = np.abs(np.asarray(values, float))
    for ax in axes:
        out = np.tensordot(_half_weights(ax), out, axes=(0, 0))
    return float(out)
