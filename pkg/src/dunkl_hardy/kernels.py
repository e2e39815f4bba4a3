"""Heat, Bessel-heat and Poisson kernels, and checks of their size bounds.

All one-dimensional heat factors are evaluated as

    h_t(x, y) = 2^{-k-3/2} t^{-k-1/2} exp(-(|x|-|y|)^2 / 4t) B_k(|xy|/2t, sign(xy)),

where ``B_k`` is the scaled Bessel bracket of the kernel core, so no
exponential larger than one is ever formed.
"""

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from ._backend import core
from .dunkl import SampledField
from .errors import DomainError
from .geometry import mu_ball_batch
from .quadrature import gauss_legendre_panels

__all__ = [
    "SubordinationRule",
    "default_rule",
    "heat_matrix",
    "heat_regime_ratios",
    "KernelBoundReport",
    "heat_kernel",
    "heat_kernel_1d",
    "log_heat_kernel_1d",
    "bessel_heat_kernel",
    "poisson_kernel",
    "heat_semigroup",
    "heat_mass",
    "poisson_mass",
    "poisson_lp_mass",
    "chapman_kolmogorov",
    "heat_regime_samples",
    "check_heat_regimes",
    "poisson_bound_samples",
    "check_poisson_bounds",
    "write_kernel_csv",
]


def _check_t(t):
    if not (np.isfinite(t) and t > 0):
        raise DomainError(f"time must be positive, got {t}")


def _pairs(setup, x, y):
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    if setup.n == 1:
        x = x[..., None] if x.shape[-1:] != (1,) else x
        y = y[..., None] if y.shape[-1:] != (1,) else y
    if x.shape[-1] != setup.n or y.shape[-1] != setup.n:
        raise DomainError("points must have n coordinates")
    return np.broadcast_arrays(x, y)


def _scalar(out):
    return float(out) if np.ndim(out) == 0 else out


def heat_kernel_1d(k, t, x, y):
    """One-dimensional factor ``h_t(x, y)`` for multiplicity ``k``."""
    _check_t(t)
    return _scalar(core.heat_kernel_1d(float(k), float(t), x, y))


def heat_kernel(setup, t, x, y):
    """Heat kernel ``h_t(x, y)`` as a product of one-dimensional factors.

    ``x`` and ``y`` broadcast with the coordinate on the last axis (for
    ``n = 1`` plain scalars or arrays are accepted as well).
    """
    _check_t(t)
    x, y = _pairs(setup, x, y)
    out = 1.0
    for j, kj in enumerate(setup.k):
        out = out * core.heat_kernel_1d(kj, float(t), x[..., j], y[..., j])
    return _scalar(out)


def log_heat_kernel_1d(k, t, x, y):
    """Natural log of the one-dimensional heat factor, without underflow."""
    x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
    xy = x * y
    z = np.abs(xy) / (2 * t)
    if k == 0:
        return -0.5 * np.log(4 * np.pi * t) - (x - y) ** 2 / (4 * t)
    gap = (np.abs(x) - np.abs(y)) ** 2 / (4 * t)
    bracket = core.kernel_bracket(float(k), z, np.sign(xy))
    return (-(k + 1.5) * math.log(2) - (k + 0.5) * np.log(t) - gap + np.log(bracket))


def bessel_heat_kernel(setup, t, x, y):
    """Heat kernel of the Bessel operator on ``(0, inf)^n``.

    Product of ``(2t)^{-1} exp(-(x^2+y^2)/4t) I_{k-1/2}(xy/2t) (xy)^{1/2-k}``,
    computed as ``(2t)^{-k-1/2} exp(-(x-y)^2/4t) Rhat_{k-1/2}(xy/2t)``.
    """
    _check_t(t)
    x, y = _pairs(setup, x, y)
    if np.any(x <= 0) or np.any(y <= 0):
        raise DomainError("Bessel heat kernel needs strictly positive coordinates")
    out = 1.0
    for j, kj in enumerate(setup.k):
        xj, yj = x[..., j], y[..., j]
        red = core.reduced_bessel(kj - 0.5, xj * yj / (2 * t))
        out = out * (2 * t) ** (-kj - 0.5) * np.exp(-(xj - yj) ** 2 / (4 * t)) * red
    return _scalar(out)


@dataclass(frozen=True, eq=False)
class SubordinationRule:
    """Quadrature for ``int_0^inf exp(-u) g(u) du / sqrt(u)``.

    With ``u = v^2`` the integral becomes ``2 int_0^inf exp(-v^2) g(v^2) dv``,
    which removes the endpoint singularity.  The ``v`` range ``[0, v_max]``
    is covered by panels graded geometrically toward 0 (where kernel
    integrands behave like ``v^N`` with non-integer ``N``) followed by
    uniform panels.

    Attributes
    ----------
    v, w : ndarray
        Nodes and plain weights on ``[0, v_max]``.
    v_max : float
    panels : int
    """

    v: np.ndarray
    w: np.ndarray
    v_max: float
    panels: int
    params: dict = field(default_factory=dict)

    @classmethod
    def build(cls, v_max=8.5, width=0.5, order=12, levels=10, ratio=0.2):
        grade_end = min(1.0, v_max)
        graded = [grade_end * ratio ** j for j in range(levels, 0, -1)]
        uniform = np.arange(grade_end, v_max + 1e-12, width)
        if uniform[-1] < v_max - 1e-12:
            uniform = np.append(uniform, v_max)
        edges = np.concatenate([[0.0], graded, uniform])
        v, w = gauss_legendre_panels(edges, order)
        params = {"v_max": v_max, "width": width, "order": order, "levels": levels, "ratio": ratio}
        return cls(v, w, float(v_max), len(edges) - 1, params)

    def refined(self):
        """Same rule with panel widths halved."""
        p = dict(self.params)
        p["width"] /= 2
        p["levels"] *= 2
        p["ratio"] = math.sqrt(p["ratio"])
        return SubordinationRule.build(**p)

    @property
    def u(self):
        return self.v ** 2

    @property
    def W(self):
        """Weights for ``g(u)`` so that ``sum(W g(u))`` approximates the integral."""
        return 2 * np.exp(-self.v ** 2) * self.w

    def integrate(self, g):
        return float(np.sum(self.W * g(self.u)))


_DEFAULT_RULE = None


def default_rule():
    global _DEFAULT_RULE
    if _DEFAULT_RULE is None:
        _DEFAULT_RULE = SubordinationRule.build()
    return _DEFAULT_RULE


def poisson_kernel(setup, t, x, y, rule=None):
    """Poisson kernel ``P_t(x, y)`` by subordination to the heat kernel.

    The subordination variable is rescaled per pair so that the Gaussian
    factor peaks at the same place for every pair; see ``_pycore.poisson_pairs``.
    """
    _check_t(t)
    rule = rule or default_rule()
    x, y = _pairs(setup, x, y)
    shape = x.shape[:-1]
    X = x.reshape(-1, setup.n)
    Y = y.reshape(-1, setup.n)
    out = core.poisson_pairs(np.asarray(setup.k, float), float(t), X, Y, rule.v, rule.w)
    return _scalar(np.asarray(out).reshape(shape))


def heat_matrix(k, t, x, y):
    return core.heat_matrix(float(k), float(t), x, y)


def heat_semigroup(f, t):
    """``e^{tL} f`` evaluated on the grid of ``f`` by weighted quadrature."""
    _check_t(t)
    vals = f.values
    for j, ax in enumerate(f.axes):
        op = core.heat_matrix(ax.k, float(t), ax.nodes, ax.nodes) * ax.weights[None, :]
        vals = np.moveaxis(np.tensordot(op, vals, axes=(1, j)), 0, j)
    return f.with_values(vals)


def heat_mass(setup, t, x, axes):
    """``int h_t(x, y) dmu(y)`` over the tensor grid ``axes``."""
    x = np.atleast_1d(np.asarray(x, float))
    total = 1.0
    for j, ax in enumerate(axes):
        total *= float(ax.weights @ core.heat_kernel_1d(setup.k[j], float(t), x[j], ax.nodes))
    return total


def _line_integral(fun, k, centers, scale):
    """``int_R fun(y) |y|^{2k} dy`` by adaptive quadrature split at ``centers``."""
    pts = sorted({0.0, *[float(c) for c in centers], *[-float(c) for c in centers]})
    g = lambda y: fun(y) * abs(y) ** (2 * k)
    total = 0.0
    edges = [-np.inf] + pts + [np.inf]
    for a, b in zip(edges[:-1], edges[1:]):
        if np.isinf(a) and np.isinf(b):
            continue
        lo, hi = a, b
        if np.isinf(lo):
            lo = hi - scale
            total += quad(g, -np.inf, lo, epsabs=0, epsrel=1e-12, limit=400)[0]
        if np.isinf(hi):
            hi = lo + scale
            total += quad(g, hi, np.inf, epsabs=0, epsrel=1e-12, limit=400)[0]
        total += quad(g, lo, hi, epsabs=0, epsrel=1e-12, limit=400)[0]
    return total


def poisson_mass(setup, t, x, rule=None):
    """``int P_t(x, y) dmu(y)`` on the whole line (``n = 1`` only).

    The Poisson kernel has algebraic tails, so a truncated grid would lose
    mass of order ``t / R``; adaptive quadrature on unbounded intervals
    keeps the result accurate.
    """
    if setup.n != 1:
        raise DomainError("poisson_mass is implemented for n = 1")
    x = float(np.atleast_1d(x)[0])
    fun = lambda y: poisson_kernel(setup, t, x, y, rule)
    return _line_integral(fun, setup.k[0], [x], max(t, 1.0))


def poisson_lp_mass(setup, t, x, p, rule=None):
    """``int P_t(x, y)^p dmu(y)`` (``n = 1`` only)."""
    if setup.n != 1:
        raise DomainError("poisson_lp_mass is implemented for n = 1")
    x = float(np.atleast_1d(x)[0])
    fun = lambda y: poisson_kernel(setup, t, x, y, rule) ** p
    return _line_integral(fun, setup.k[0], [x], max(t, 1.0))


def chapman_kolmogorov(k, t, s, x, y, axis):
    """Relative defect of ``int h_t(x,z) h_s(z,y) dmu(z) = h_{t+s}(x,y)``."""
    lhs = float(axis.weights @ (core.heat_kernel_1d(k, t, x, axis.nodes)
                                * core.heat_kernel_1d(k, s, axis.nodes, y)))
    rhs = float(core.heat_kernel_1d(k, t + s, x, y))
    return abs(lhs - rhs) / rhs


@dataclass(frozen=True)
class KernelBoundReport:
    """Observed ratios of a kernel to a comparand over a sample set."""

    regime: str
    count: int
    min_ratio: float
    max_ratio: float
    extra: dict = field(default_factory=dict)

    @property
    def spread(self):
        return self.max_ratio / self.min_ratio

    def to_dict(self):
        return {"regime": self.regime, "count": self.count, "min_ratio": self.min_ratio,
                "max_ratio": self.max_ratio, **self.extra}


HEAT_REGIMES = ("near", "same-sign", "opposite-sign")


def heat_regime_samples(count, rng, t_range=(1e-2, 1e2), spread=30.0):
    """Stratified ``(t, x, y)`` samples for the three heat-kernel regimes.

    Each regime gets ``count`` samples, a tenth of which sit exactly on
    the boundary ``|xy| = t``.  Returns a dict regime -> (t, x, y) arrays.
    """
    out = {}
    edge = max(1, count // 10)
    for name in HEAT_REGIMES:
        t = np.exp(rng.uniform(*np.log(t_range), count))
        if name == "near":
            prod = t * rng.uniform(-1, 1, count)
            prod[:edge] = t[:edge] * np.where(rng.random(edge) < 0.5, -1, 1)
        else:
            prod = t * np.exp(rng.uniform(0, np.log(spread ** 2), count))
            prod[:edge] = t[:edge]
            if name == "opposite-sign":
                prod = -prod
        # split |xy| between the coordinates with a random log-ratio
        ratio = np.exp(rng.uniform(-2, 2, count))
        mag = np.sqrt(np.abs(prod))
        x = mag * ratio * rng.choice([-1, 1], count)
        y = np.sign(prod) * np.sign(x) * mag / ratio
        y = np.where(prod == 0, rng.uniform(-1, 1, count), y)
        out[name] = (t, x, y)
    return out


def _log_comparand(regime, k, t, x, y):
    if regime == "near":
        return -(k + 0.5) * np.log(t) - (x ** 2 + y ** 2) / (4 * t)
    if regime == "same-sign":
        return -0.5 * np.log(t) - k * np.log(x * y) - (x - y) ** 2 / (4 * t)
    return 0.5 * np.log(t) - (k + 1) * np.log(-x * y) - (x + y) ** 2 / (4 * t)


def heat_regime_ratios(k, regime, t, x, y):
    """Ratios of the heat factor to the comparand of ``regime``."""
    return np.exp(log_heat_kernel_1d(k, t, x, y) - _log_comparand(regime, k, t, x, y))


def check_heat_regimes(k, sample_set):
    """Min and max ratio of ``h_t`` to the comparand of each regime.

    Parameters
    ----------
    k : float
    sample_set : dict
        Regime name -> ``(t, x, y)`` arrays, as produced by
        :func:`heat_regime_samples`.

    Returns
    -------
    list of KernelBoundReport

    Notes
    -----
    The opposite-sign comparand needs ``k > 0``: for ``k = 0`` the kernel is
    the Gaussian ``exp(-(x-y)^2/4t)`` and the ratio decays like
    ``exp(-|xy|/t)``, so that report has ``min_ratio`` near 0.
    """
    reports = []
    for regime in HEAT_REGIMES:
        t, x, y = (np.asarray(a, float) for a in sample_set.get(regime, ((), (), ())))
        if t.size == 0:
            raise DomainError(f"regime {regime!r} has no samples")
        prod = x * y
        ok = {"near": np.abs(prod) <= t * (1 + 1e-12),
              "same-sign": prod >= t * (1 - 1e-12),
              "opposite-sign": -prod >= t * (1 - 1e-12)}[regime]
        if not ok.all():
            raise DomainError(f"samples outside regime {regime!r}")
        ratio = heat_regime_ratios(k, regime, t, x, y)
        reports.append(KernelBoundReport(regime, int(t.size), float(ratio.min()), float(ratio.max())))
    return reports


def poisson_bound_samples(setup, count, rng, t_range=(1e-2, 1e2), x_range=(1e-2, 1e2)):
    """Pairs with ``|x| > 2n|y|`` and log-uniform scales."""
    n = setup.n
    t = np.exp(rng.uniform(*np.log(t_range), count))
    g = rng.standard_normal((count, n))
    x = g / np.linalg.norm(g, axis=1, keepdims=True) * np.exp(rng.uniform(*np.log(x_range), count))[:, None]
    h = rng.standard_normal((count, n))
    frac = rng.uniform(0, 1, count)[:, None] / (2 * n) * 0.999
    y = h / np.linalg.norm(h, axis=1, keepdims=True) * np.linalg.norm(x, axis=1, keepdims=True) * frac
    return t, x, y


def check_poisson_bounds(setup, sample_set, delta, rule=None):
    """Scaled Poisson kernel over ``(t, x, y)`` samples.

    Reports the largest values of ``P_t(x,y) mu(B(x,t))`` and of
    ``P_t(x,y) mu(B(x,t)) (1 + mu(B(x,|x|)) / mu(B(x,t)))^{1+delta}``; the
    second is only taken over pairs with ``|x| > 2n|y|``.
    """
    if not 0 < delta < 1 / setup.N:
        raise DomainError(f"delta must lie in (0, 1/N) = (0, {1 / setup.N:.6g})")
    t, x, y = sample_set
    t = np.atleast_1d(np.asarray(t, float))
    x = np.asarray(x, float).reshape(t.size, setup.n)
    y = np.asarray(y, float).reshape(t.size, setup.n)
    rule = rule or default_rule()
    vals = np.empty(t.size)
    for tv in np.unique(t):
        sel = t == tv
        vals[sel] = core.poisson_pairs(np.asarray(setup.k, float), float(tv), x[sel], y[sel], rule.v, rule.w)
    small = mu_ball_batch(setup.k, x, t)
    first = vals * small
    far = np.linalg.norm(x, axis=1) > 2 * setup.n * np.linalg.norm(y, axis=1)
    norm_x = np.linalg.norm(x, axis=1)
    big = mu_ball_batch(setup.k, x[far], norm_x[far])
    second = first[far] * (1 + big / small[far]) ** (1 + delta)
    extra = {"sup_scaled": float(first.max()), "min_kernel": float(vals.min()),
             "far_pairs": int(far.sum()), "delta": delta}
    if far.any():
        extra["sup_weighted"] = float(second.max())
    return KernelBoundReport("poisson", int(t.size), float(first.min()), float(first.max()), extra)


def write_kernel_csv(path, t, x, y, kernel, comparand):
    """CSV with columns ``t, x..., y..., kernel, comparand, ratio``."""
    t = np.atleast_1d(t)
    x = np.atleast_2d(np.asarray(x, float).reshape(t.size, -1))
    y = np.atleast_2d(np.asarray(y, float).reshape(t.size, -1))
    n = x.shape[1]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t"] + [f"x{j + 1}" for j in range(n)] + [f"y{j + 1}" for j in range(n)]
                   + ["kernel", "comparand", "ratio"])
        for i in range(t.size):
            ratio = kernel[i] / comparand[i] if comparand[i] != 0 else float("nan")
            w.writerow([repr(float(t[i]))] + [repr(float(v)) for v in x[i]] + [repr(float(v)) for v in y[i]]
                       + [repr(float(kernel[i])), repr(float(comparand[i])), repr(float(ratio))])
