"""Measures of Euclidean balls under ``dmu = prod |x_j|^{2k_j} dx``.

In one dimension everything is explicit through the antiderivative
``F(y) = sign(y) |y|^{2k+1} / (2k+1)``.  In higher dimension the ball is
sliced along the first coordinate with ``x_1 = c_1 + r sin(theta)``; each
slice is a lower-dimensional ball of radius ``r cos(theta)`` and the
integral over ``theta`` is done with Gauss-Legendre panels graded toward
every point where the integrand loses smoothness (a slice crossing a
coordinate hyperplane).  All balls in a batch are handled at once.
"""

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import minimize

from .errors import DomainError
from .quadrature import gauss_legendre_panels

__all__ = [
    "BallMeasure",
    "DoublingReport",
    "mu_ball",
    "mu_ball_batch",
    "ball_measure",
    "mu_ball_origin",
    "mu_ball_monte_carlo",
    "doubling_report",
    "quasi_distance",
    "quasi_distance_batch",
    "quasi_distance_box",
    "quasi_ball_measure",
    "t_of_r",
    "sandwich_check",
]

_GRADE_RATIO = 0.15
_GRADE_LEVELS = 6
_PANEL_ORDER = 8


@dataclass(frozen=True)
class BallMeasure:
    center: tuple
    radius: float
    measure: float
    method: str


@dataclass(frozen=True)
class DoublingReport:
    """``mu(B(x,R)) / mu(B(x,r))`` with the two power-law comparands."""

    ratio: float
    lower: float  # (R/r)^n
    upper: float  # (R/r)^N

    @property
    def c1(self):
        return self.ratio / self.lower

    @property
    def c2(self):
        return self.ratio / self.upper


def _antiderivative(k, y):
    return np.sign(y) * np.abs(y) ** (2 * k + 1) / (2 * k + 1)


@lru_cache(maxsize=1)
def _reference_rule():
    # graded toward both ends of [0, 1]
    inner = [0.5 * _GRADE_RATIO ** j for j in range(_GRADE_LEVELS, 0, -1)]
    edges = np.array([0.0] + inner + [0.5] + [1 - e for e in inner[::-1]] + [1.0])
    return gauss_legendre_panels(edges, _PANEL_ORDER)


def _breakpoints(c, r):
    """Angles where the slice integrand is not smooth, shape (B, K)."""
    B, n = c.shape
    cols = [np.clip(-c[:, 0] / r, -1.0, 1.0)]
    rest = c[:, 1:] ** 2
    out = [np.arcsin(cols[0])]
    for size in range(1, n):
        for subset in itertools.combinations(range(n - 1), size):
            dist = np.sqrt(rest[:, list(subset)].sum(axis=1))
            ang = np.arccos(np.clip(dist / r, 0.0, 1.0))
            out += [ang, -ang]
    return np.stack(out, axis=1)


def mu_ball_batch(k, centers, radii):
    """Measures of many balls at once.

    Parameters
    ----------
    k : sequence of float
        Multiplicities, one per axis.
    centers : (B, n) array
    radii : (B,) array of positive radii

    Returns
    -------
    (B,) ndarray
    """
    k = tuple(float(v) for v in k)
    c = np.atleast_2d(np.asarray(centers, float))
    r = np.broadcast_to(np.asarray(radii, float), (c.shape[0],)).astype(float)
    n = len(k)
    if c.shape[1] != n:
        raise DomainError("centers must have n coordinates")
    if n == 1:
        x = c[:, 0]
        return _antiderivative(k[0], x + r) - _antiderivative(k[0], x - r)
    live = r > 0
    out = np.zeros(c.shape[0])
    if not live.any():
        return out
    c = c[live]
    r = r[live]
    B = c.shape[0]
    half = 0.5 * np.pi
    bp = np.sort(np.clip(_breakpoints(c, r), -half, half), axis=1)
    edges = np.concatenate([np.full((B, 1), -half), bp, np.full((B, 1), half)], axis=1)
    a = edges[:, :-1, None]
    width = (edges[:, 1:] - edges[:, :-1])[:, :, None]
    tau, omega = _reference_rule()
    theta = (a + width * tau).reshape(B, -1)
    wts = (width * omega).reshape(B, -1)
    x1 = c[:, :1] + r[:, None] * np.sin(theta)
    rho = r[:, None] * np.cos(theta)
    inner_c = np.repeat(c[:, 1:], theta.shape[1], axis=0)
    inner = mu_ball_batch(k[1:], inner_c, rho.ravel()).reshape(theta.shape)
    integrand = np.abs(x1) ** (2 * k[0]) * rho * inner
    out[live] = np.sum(wts * integrand, axis=1)
    return out


@lru_cache(maxsize=65536)
def _mu_cached(k, center, r):
    return float(mu_ball_batch(k, np.asarray([center]), np.asarray([r]))[0])


def mu_ball(setup, center, r):
    """``mu(B(center, r))``; exact for n = 1, graded quadrature otherwise."""
    if not r > 0:
        raise DomainError("radius must be positive")
    center = tuple(float(v) for v in np.atleast_1d(center))
    if len(center) != setup.n:
        raise DomainError("center must have n coordinates")
    return _mu_cached(tuple(setup.k), center, float(r))


def ball_measure(setup, center, r):
    m = mu_ball(setup, center, r)
    return BallMeasure(tuple(np.atleast_1d(center).tolist()), float(r), m,
                       "closed-form" if setup.n == 1 else "quadrature")


def mu_ball_origin(setup, r):
    """Closed form ``r^N prod Gamma(k_j + 1/2) / Gamma(N/2 + 1)``."""
    logv = sum(math.lgamma(kj + 0.5) for kj in setup.k) - math.lgamma(setup.N / 2 + 1)
    return math.exp(logv + setup.N * math.log(r))


def mu_ball_monte_carlo(setup, center, r, samples, rng):
    """Monte-Carlo estimate and its standard error."""
    n = setup.n
    g = rng.standard_normal((samples, n))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    pts = np.asarray(center, float) + r * g * rng.random((samples, 1)) ** (1.0 / n)
    w = np.prod(np.abs(pts) ** (2 * np.asarray(setup.k)), axis=1)
    vol = math.pi ** (n / 2) / math.gamma(n / 2 + 1) * r ** n
    return vol * w.mean(), vol * w.std(ddof=1) / math.sqrt(samples)


def doubling_report(setup, x, r, R):
    """Volume ratio of concentric balls against ``(R/r)^n`` and ``(R/r)^N``."""
    if not (R >= r > 0):
        raise DomainError("need R >= r > 0")
    ratio = mu_ball(setup, x, R) / mu_ball(setup, x, r)
    q = R / r
    return DoublingReport(ratio, q ** setup.n, q ** setup.N)


def _golden_batch(fun, count, iters=48):
    """Minimize ``fun(s)`` over ``s in [0, 1]`` for ``count`` problems."""
    g = (math.sqrt(5) - 1) / 2
    a = np.zeros(count)
    b = np.ones(count)
    c = b - g * (b - a)
    d = a + g * (b - a)
    fc = fun(c)
    fd = fun(d)
    for _ in range(iters):
        left = fc < fd
        a = np.where(left, a, c)
        b = np.where(left, d, b)
        probe = np.where(left, b - g * (b - a), a + g * (b - a))
        fp = fun(probe)
        c, d = np.where(left, probe, d), np.where(left, c, probe)
        fc, fd = np.where(left, fp, fd), np.where(left, fc, fp)
    return np.where(fc < fd, c, d), np.minimum(fc, fd)


def quasi_distance_batch(setup, X, Y):
    """Segment-search quasi-distance for many pairs.

    The center of the enclosing ball is restricted to the segment from
    ``x`` to ``y``; in one dimension this gives the exact infimum
    ``|F(y) - F(x)|``.
    """
    X = np.atleast_2d(np.asarray(X, float))
    Y = np.atleast_2d(np.asarray(Y, float))
    if setup.n == 1:
        kk = setup.k[0]
        return np.abs(_antiderivative(kk, Y[:, 0]) - _antiderivative(kk, X[:, 0]))
    gap = np.linalg.norm(Y - X, axis=1)

    def measure(s):
        c = X + s[:, None] * (Y - X)
        rad = np.maximum(s, 1 - s) * gap
        return mu_ball_batch(setup.k, c, np.maximum(rad, 1e-300))

    out = np.zeros(X.shape[0])
    live = gap > 0
    if live.any():
        X, Y, gap = X[live], Y[live], gap[live]
        out[live] = _golden_batch(measure, int(live.sum()))[1]
    return out


def _golden_scalar(fun, a=0.0, b=1.0, tol=1e-10):
    g = (math.sqrt(5) - 1) / 2
    c, d = b - g * (b - a), a + g * (b - a)
    fc, fd = fun(c), fun(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - g * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + g * (b - a)
            fd = fun(d)
    return (c, fc) if fc < fd else (d, fd)


def quasi_distance(setup, x, y, method="segment"):
    """Quasi-distance: smallest ``mu`` of a closed ball containing x and y.

    Parameters
    ----------
    method : {"segment", "box", "best"}
        ``segment`` searches centers on the segment ``[x, y]`` (exact in
        one dimension); ``box`` runs a Nelder-Mead search over centers in
        the bounding box; ``best`` returns the smaller of the two.
    """
    x = np.atleast_1d(np.asarray(x, float))
    y = np.atleast_1d(np.asarray(y, float))
    if np.array_equal(x, y):
        return 0.0
    if method == "segment" or setup.n == 1:
        if setup.n == 1:
            return float(quasi_distance_batch(setup, x[None], y[None])[0])
        gap = float(np.linalg.norm(y - x))
        fun = lambda s: mu_ball(setup, x + s * (y - x), max(s, 1 - s) * gap)
        return float(_golden_scalar(fun)[1])
    seg = quasi_distance(setup, x, y, "segment")
    box = quasi_distance_box(setup, x, y)
    if method == "box":
        return box
    if method == "best":
        return min(seg, box)
    raise ValueError(f"unknown method {method!r}")


def quasi_distance_box(setup, x, y):
    """Center search over ``R^n`` by Nelder-Mead from the midpoint."""
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    scale = float(np.linalg.norm(y - x))

    def fun(c):
        rad = max(np.linalg.norm(c - x), np.linalg.norm(c - y))
        return mu_ball(setup, c, rad)

    res = minimize(fun, 0.5 * (x + y), method="Nelder-Mead",
                   options={"xatol": 1e-9 * scale, "fatol": 0.0, "maxiter": 2000})
    return float(min(res.fun, fun(0.5 * (x + y))))


def quasi_ball_measure(setup, x, r, samples=2000, rng=None):
    """``mu`` of the quasi-ball ``{y : d(x, y) < r}``.

    Exact in one dimension (always ``2r`` because the quasi-distance is
    the distance between antiderivative values).  In higher dimension a
    Monte-Carlo estimate over the Euclidean ball of radius ``4 sqrt(t)``
    is returned together with its standard error.
    """
    if setup.n == 1:
        return 2.0 * r, 0.0
    rng = rng or np.random.default_rng(0)
    rad = 4.0 * math.sqrt(t_of_r(setup, x, r))
    n = setup.n
    g = rng.standard_normal((samples, n))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    pts = np.asarray(x, float) + rad * g * rng.random((samples, 1)) ** (1.0 / n)
    dist = quasi_distance_batch(setup, np.broadcast_to(x, pts.shape), pts)
    w = np.prod(np.abs(pts) ** (2 * np.asarray(setup.k)), axis=1) * (dist < r)
    vol = math.pi ** (n / 2) / math.gamma(n / 2 + 1) * rad ** n
    return vol * w.mean(), vol * w.std(ddof=1) / math.sqrt(samples)


def t_of_r(setup, x, r, rtol=1e-10):
    """Solve ``mu(B(x, sqrt(t))) = r`` for ``t`` by bisection in log t."""
    if not r > 0:
        raise DomainError("r must be positive")
    f = lambda logt: mu_ball(setup, x, math.exp(0.5 * logt)) - r
    lo, hi = -2.0, 2.0
    while f(lo) > 0:
        lo *= 2
    while f(hi) < 0:
        hi *= 2
    while hi - lo > rtol:
        mid = 0.5 * (lo + hi)
        if f(mid) > 0:
            hi = mid
        else:
            lo = mid
    return math.exp(0.5 * (lo + hi))


def sandwich_check(setup, x, r, samples, rng):
    """Check ``B(x, sqrt t) inside the quasi-ball of radius r``.

    Returns ``(inner_ok, c_obs)`` where ``c_obs`` is the largest observed
    ``|y - x| / sqrt(t)`` over sampled ``y`` with quasi-distance below
    ``r`` (so the quasi-ball sits in ``B(x, c_obs sqrt t)`` on the sample).
    """
    x = np.asarray(x, float)
    t = t_of_r(setup, x, r)
    n = setup.n
    g = rng.standard_normal((samples, n))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    radial = rng.random((samples, 1)) ** (1.0 / n)
    inside = x + math.sqrt(t) * g * radial
    d_in = quasi_distance_batch(setup, np.broadcast_to(x, inside.shape), inside)
    inner_ok = bool(np.all(d_in <= r * (1 + 1e-6)))
    wide = x + 6.0 * math.sqrt(t) * g * radial
    d_wide = quasi_distance_batch(setup, np.broadcast_to(x, wide.shape), wide)
    hit = d_wide < r
    c_obs = float(np.max(np.linalg.norm(wide[hit] - x, axis=1)) / math.sqrt(t)) if hit.any() else 0.0
    return inner_ok, c_obs
