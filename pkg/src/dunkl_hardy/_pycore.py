"""Vectorized numpy implementation of the hot kernel routines.

This module mirrors ``_ccore`` function by function and is used when the
compiled extension is unavailable or when ``DUNKL_BACKEND=python`` is set.

The central object is the reduced scaled modified Bessel function

    Rhat_nu(z) = exp(-z) * z**(-nu) * I_nu(z),      z >= 0,

which is finite and strictly positive on ``[0, inf)`` with
``Rhat_nu(0) = 2**(-nu) / Gamma(nu + 1)``.  Every kernel in the package
is written in terms of it so that no exponential ever overflows.
"""

import numpy as np
from scipy.special import gammaln

# Series below the crossover, Hankel expansion above it.  At z = 40 the
# smallest Hankel term is ~exp(-2z), far below double precision.
SERIES_CROSSOVER = 40.0
_TINY = 1e-17
_MAX_HANKEL_TERMS = 80
_EXP_UNDERFLOW = 745.0


def crossover(nu):
    return max(SERIES_CROSSOVER, nu * nu)


def _series(nu, z):
    """Power series summed outward from its largest term."""
    out = np.empty_like(z)
    if z.size == 0:
        return out
    q = 0.25 * z * z
    root = 0.5 * (-(nu + 2.0) + np.sqrt(nu * nu + 4.0 * q))
    m0 = np.maximum(np.ceil(root), 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        logz2 = np.where(z > 0, np.log(0.5 * z), 0.0)
    logt0 = 2.0 * m0 * logz2 - gammaln(m0 + 1.0) - gammaln(m0 + nu + 1.0) - z
    total = np.ones_like(z)
    live = q > 0
    # upward sweep
    r = np.ones_like(z)
    m = m0.copy()
    while live.any():
        r = np.where(live, r * q / ((m + 1.0) * (m + nu + 1.0)), 0.0)
        m += 1.0
        total += r
        live &= r > _TINY * total
    # downward sweep
    r = np.ones_like(z)
    m = m0.copy()
    live = (q > 0) & (m > 0)
    while live.any():
        r = np.where(live, r * m * (m + nu) / np.where(live, q, 1.0), 0.0)
        m -= 1.0
        total += r
        live &= (m > 0) & (r > _TINY * total)
    out[:] = np.exp(logt0 - nu * np.log(2.0)) * total
    return out


def _hankel_sum(nu, z):
    """Sum of the Hankel expansion of sqrt(2 pi z) exp(-z) I_nu(z)."""
    mu = 4.0 * nu * nu
    total = np.ones_like(z)
    term = np.ones_like(z)
    for j in range(1, _MAX_HANKEL_TERMS):
        term = -term * (mu - (2 * j - 1) ** 2) / (8.0 * j * z)
        total += term
        if not np.any(np.abs(term) > _TINY * np.abs(total)):
            break
    return total


def reduced_bessel(nu, z):
    """Return ``exp(-z) z**(-nu) I_nu(z)`` for an array of ``z >= 0``."""
    z = np.asarray(z, dtype=float)
    flat = z.ravel()
    out = np.empty_like(flat)
    small = flat <= crossover(nu)
    out[small] = _series(nu, flat[small])
    big = ~small
    if big.any():
        zb = flat[big]
        out[big] = _hankel_sum(nu, zb) * zb ** (-nu) / np.sqrt(2.0 * np.pi * zb)
    return out.reshape(z.shape)


def kernel_bracket(k, z, s):
    """Return ``Rhat_{k-1/2}(z) + s * z * Rhat_{k+1/2}(z)``.

    ``s`` is the sign of ``x*y`` (an array of -1, 0 or +1).  In the
    asymptotic regime the two expansions are combined coefficient by
    coefficient, so the cancellation for ``s = -1`` happens exactly.
    """
    nu = k - 0.5
    z = np.asarray(z, dtype=float)
    s = np.broadcast_to(np.asarray(s, dtype=float), z.shape)
    if k == 0:
        # exp(-z)(cosh z + s sinh z) in closed form; s = -1 cancels completely
        return np.sqrt(2.0 / np.pi) * 0.5 * ((1.0 + s) + (1.0 - s) * np.exp(-2.0 * z))
    zf = z.ravel()
    sf = s.ravel()
    out = np.empty_like(zf)
    small = zf <= crossover(nu + 1.0)
    if small.any():
        zs = zf[small]
        out[small] = reduced_bessel(nu, zs) + sf[small] * zs * reduced_bessel(nu + 1.0, zs)
    big = ~small
    if big.any():
        zb = zf[big]
        sb = sf[big]
        mu0 = 4.0 * nu * nu
        mu1 = 4.0 * (nu + 1.0) ** 2
        t0 = np.ones_like(zb)
        t1 = np.ones_like(zb)
        total = 1.0 + sb
        for j in range(1, _MAX_HANKEL_TERMS):
            odd = (2 * j - 1) ** 2
            t0 = -t0 * (mu0 - odd) / (8.0 * j * zb)
            t1 = -t1 * (mu1 - odd) / (8.0 * j * zb)
            step = t0 + sb * t1
            total = total + step
            scale = np.maximum(np.abs(t0), np.abs(t1))
            if not np.any(scale > _TINY * np.maximum(np.abs(total), 1e-300)):
                break
        out[big] = total * zb ** (-nu) / np.sqrt(2.0 * np.pi * zb)
    return out.reshape(z.shape)


def dunkl_kernel_1d(k, x, y):
    """Real-argument one-dimensional Dunkl kernel, broadcast over x and y."""
    x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
    xy = x * y
    if k == 0:
        return np.exp(xy)
    z = np.abs(xy)
    pref = np.exp((k - 0.5) * np.log(2.0) + gammaln(k + 0.5))
    val = pref * np.exp(z) * kernel_bracket(k, z, np.sign(xy))
    return np.where(xy == 0, 1.0, val)


def heat_kernel_1d(k, t, x, y):
    """One-dimensional Dunkl heat kernel ``h_t(x, y)``, broadcast."""
    x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
    gap = (np.abs(x) - np.abs(y)) ** 2 / (4.0 * t)
    out = np.zeros(x.shape)
    live = gap < _EXP_UNDERFLOW
    if live.any():
        xl = x[live]
        yl = y[live]
        xy = xl * yl
        z = np.abs(xy) / (2.0 * t)
        pref = 2.0 ** (-k - 1.5) * t ** (-k - 0.5)
        out[live] = pref * np.exp(-gap[live]) * kernel_bracket(k, z, np.sign(xy))
    return out


def heat_matrix(k, t, x, y):
    """Matrix ``h_t(x_i, y_j)``."""
    return heat_kernel_1d(k, t, np.asarray(x, float)[:, None], np.asarray(y, float)[None, :])


def dunkl_matrix(k, x, y):
    return dunkl_kernel_1d(k, np.asarray(x, float)[:, None], np.asarray(y, float)[None, :])


def poisson_pairs(k, t, X, Y, v, w):
    """Poisson kernel for P pairs of points by a scaled subordination rule.

    Parameters
    ----------
    k : (n,) array of multiplicities
    t : float
    X, Y : (P, n) arrays
    v, w : nodes and weights of a rule for integrals over ``[0, V]``

    Notes
    -----
    With ``s = sigma * v`` and ``sigma = (1 + |(|x|-|y|)|^2 / t^2)^(-1/2)``
    the integrand becomes ``exp(-v^2) v^N prod_j bracket_j`` times a
    pair-dependent prefactor, which keeps the Gaussian peak at ``v ~ 1``
    for every pair.
    """
    k = np.asarray(k, float)
    X = np.atleast_2d(np.asarray(X, float))
    Y = np.atleast_2d(np.asarray(Y, float))
    n = k.size
    N = n + 2.0 * k.sum()
    delta2 = np.sum((np.abs(X) - np.abs(Y)) ** 2, axis=1)
    sigma = 1.0 / np.sqrt(1.0 + delta2 / (t * t))
    v = np.asarray(v, float)
    w = np.asarray(w, float)
    integrand = np.exp(-v * v)[None, :] * v[None, :] ** N
    integrand = np.broadcast_to(integrand, (X.shape[0], v.size)).copy()
    for j in range(n):
        a = np.abs(X[:, j] * Y[:, j])
        sg = np.sign(X[:, j] * Y[:, j])
        z = a[:, None] * (2.0 * sigma[:, None] ** 2 * v[None, :] ** 2 / (t * t))
        integrand *= kernel_bracket(k[j], z, sg[:, None])
    pref = (2.0 / np.sqrt(np.pi)) * sigma * 2.0 ** (k.sum() - 0.5 * n) * (sigma / t) ** N
    return pref * (integrand @ w)
