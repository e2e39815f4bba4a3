"""Modified Bessel function of the first kind and log-Gamma.

Internally everything is expressed through the reduced scaled function
``Rhat_nu(z) = exp(-z) z**(-nu) I_nu(z)`` supplied by the kernel core, so
the unscaled value is only formed at the very end, in log space.
"""

import math
from dataclasses import dataclass

import numpy as np

from ._backend import core
from .errors import DomainError

__all__ = ["BesselEval", "bessel_i", "bessel_eval", "reduced_bessel_i", "log_gamma"]


@dataclass(frozen=True)
class BesselEval:
    """A single evaluation of ``I_nu(x)`` with its exponentially scaled twin."""

    nu: float
    x: float
    value: float
    scaled_value: float


def _check(nu, x):
    if not math.isfinite(nu) or nu < -0.5:
        raise DomainError(f"order nu={nu} must be a finite real >= -1/2")
    xa = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(xa)):
        raise DomainError("argument x must be finite")
    if np.any(xa < 0):
        raise DomainError("argument x must be nonnegative")
    return xa


def reduced_bessel_i(nu, z):
    """``exp(-z) z**(-nu) I_nu(z)``; finite and positive on ``[0, inf)``."""
    za = _check(nu, z)
    out = core.reduced_bessel(float(nu), za)
    return float(out) if np.ndim(z) == 0 else out


def bessel_i(nu, x, scaled=False):
    """Modified Bessel function ``I_nu(x)`` for ``nu >= -1/2`` and ``x >= 0``.

    Parameters
    ----------
    nu : float
        Order, at least -1/2.
    x : float or array_like
        Nonnegative argument.
    scaled : bool, optional
        Return ``exp(-x) I_nu(x)`` instead, which stays finite for any
        finite ``x`` (the unscaled value overflows past x ~ 713).

    Returns
    -------
    float or ndarray
    """
    xa = _check(nu, x)
    red = core.reduced_bessel(float(nu), xa)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        pos = xa > 0
        safe = np.where(pos, xa, 1.0)
        logpow = np.where(pos, nu * np.log(safe), 0.0)
        if scaled:
            out = red * np.exp(logpow)
        else:
            out = np.exp(xa + logpow + np.log(red))
        # x = 0: x**nu is 1 for nu = 0, 0 for nu > 0 and +inf for nu < 0
        at0 = 1.0 if nu == 0 else (0.0 if nu > 0 else math.inf)
        out = np.where(pos, out, at0)
    return float(out) if np.ndim(x) == 0 else out


def bessel_eval(nu, x):
    """Evaluate ``I_nu(x)`` and its scaled form into a :class:`BesselEval`."""
    return BesselEval(float(nu), float(x), bessel_i(nu, x), bessel_i(nu, x, scaled=True))


def log_gamma(x):
    """Natural logarithm of the Gamma function on ``x > 0``."""
    if not math.isfinite(x) or x <= 0:
        raise DomainError(f"log_gamma requires a finite x > 0, got {x}")
    return math.lgamma(x)
