"""Uniform grids with quadrature weights for ``|y|^{2k} dy``.

The weight ``|y|^{2k}`` is not smooth at the origin, so the plain
trapezoid rule on a uniform grid loses accuracy there.  The rules below
add a small correction stencil next to the origin whose coefficients come
from the generalized Euler-Maclaurin (Navot) expansion of

    h * sum_i |y_i|^{2k} f(y_i) - integral |y|^{2k} f(y) dy,

whose error terms are ``zeta(-2k-j) h^{2k+j+1} f^{(j)}(0) / j!`` (with a
Hurwitz zeta at offset 1/2 for grids staggered by half a step).

* Symmetric rules integrate over the whole line.  Odd-order terms cancel,
  so only even moments need correcting and the result is spectrally
  accurate for functions that are smooth across the origin.
* One-sided rules integrate over a half line.  They correct every order
  up to ``m`` and are accurate to roughly ``h^{2k+m+2}``; they are meant
  for integrands with a kink or jump at the origin.
"""

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.special import roots_legendre, zeta

from .errors import GridError

__all__ = [
    "Axis",
    "make_axis",
    "riemann_zeta",
    "symmetric_correction",
    "one_sided_correction",
    "gauss_legendre_panels",
    "graded_panels",
]

SYMMETRIC_ORDER = 6
ONE_SIDED_ORDER = 8


def riemann_zeta(s):
    """Riemann zeta for any real ``s != 1`` (reflection formula below 1)."""
    if s == 0:
        return -0.5
    if s > 1:
        return float(zeta(s))
    if s == math.floor(s) and s < 0 and int(s) % 2 == 0:
        return 0.0  # trivial zeros
    return (2.0 ** s * math.pi ** (s - 1) * math.sin(math.pi * s / 2)
            * math.gamma(1 - s) * float(zeta(1 - s)))


def _hurwitz_half(s):
    """Hurwitz zeta ``zeta(s, 1/2) = (2^s - 1) zeta(s)``."""
    if s == 0:
        return 0.0
    return (2.0 ** s - 1.0) * riemann_zeta(s)


@lru_cache(maxsize=None)
def symmetric_correction(k, m, stagger):
    """Correction coefficients for the pair nodes ``p = 0..m``.

    The weight added at the nodes ``+-(p + a) h`` (``a = 1/2`` when
    staggered) is ``c_p h^{2k+1}`` each; for an unstaggered grid ``p = 0``
    is the single origin node.
    """
    a = 0.5 if stagger else 0.0
    rhs = np.empty(m + 1)
    mat = np.empty((m + 1, m + 1))
    for j in range(m + 1):
        s = -2.0 * k - 2.0 * j
        rhs[j] = -2.0 * (_hurwitz_half(s) if stagger else riemann_zeta(s))
        for p in range(m + 1):
            node = p + a
            if node == 0:
                mat[j, p] = 1.0 if j == 0 else 0.0
            else:
                mat[j, p] = 2.0 * node ** (2 * j)
    return tuple(np.linalg.solve(mat, rhs))


@lru_cache(maxsize=None)
def one_sided_correction(k, m, stagger):
    """Correction coefficients for the half-line nodes ``i = 0..m``."""
    a = 0.5 if stagger else 0.0
    rhs = np.empty(m + 1)
    mat = np.empty((m + 1, m + 1))
    for j in range(m + 1):
        s = -2.0 * k - j
        rhs[j] = -(_hurwitz_half(s) if stagger else riemann_zeta(s))
        for i in range(m + 1):
            node = i + a
            mat[j, i] = node ** j if node > 0 else (1.0 if j == 0 else 0.0)
    return tuple(np.linalg.solve(mat, rhs))


@dataclass(frozen=True, eq=False)
class Axis:
    """A uniform grid symmetric about 0 with weights for ``|y|^{2k} dy``.

    Attributes
    ----------
    nodes : ndarray
        Strictly increasing, symmetric about 0.
    weights : ndarray
        Whole-line weights (symmetric corrected trapezoid).
    k : float
        Multiplicity defining the weight ``|y|^{2k}``.
    step : float
    stagger : bool
        True when the nodes sit at half-integer multiples of ``step`` so
        that 0 is not a node.
    """

    nodes: np.ndarray
    weights: np.ndarray
    k: float
    step: float
    stagger: bool
    _one_sided: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def size(self):
        return self.nodes.size

    @property
    def extent(self):
        return float(self.nodes[-1])

    @property
    def zero_index(self):
        """Index of the node at 0, or None for staggered axes."""
        return None if self.stagger else self.size // 2

    def mirror_index(self):
        """Permutation ``i -> index of -nodes[i]``."""
        return np.arange(self.size)[::-1]

    def one_sided_weights(self, side):
        """Weights over all nodes for the half line ``side * y >= 0``."""
        if side not in (1, -1):
            raise ValueError("side must be +1 or -1")
        if side not in self._one_sided:
            self._one_sided[side] = _one_sided_weights(self, side)
        return self._one_sided[side]

    def integrate(self, values):
        return np.tensordot(self.weights, values, axes=(0, 0))

    def is_symmetric(self, tol=1e-12):
        return np.allclose(self.nodes, -self.nodes[::-1], atol=tol * max(1.0, self.extent))

    def to_dict(self):
        return {"k": self.k, "step": self.step, "stagger": self.stagger, "size": int(self.size)}


def make_axis(k, extent, step, stagger=False, order=SYMMETRIC_ORDER):
    """Uniform symmetric axis covering ``[-extent, extent]``.

    Parameters
    ----------
    k : float
        Multiplicity of the weight.
    extent : float
        Half-width; the outermost node is the largest grid point not
        exceeding it (up to rounding).
    step : float
        Node spacing.
    stagger : bool
        Shift nodes by half a step so that 0 is not a node.
    order : int
        Number of even moments corrected at the origin.
    """
    if step <= 0 or extent <= 0:
        raise GridError("extent and step must be positive")
    if k < 0:
        raise GridError("multiplicity must be nonnegative")
    a = 0.5 if stagger else 0.0
    M = int(math.floor(extent / step - a + 1e-9))
    if M < 2:
        raise GridError("grid needs at least two nodes on each side of the origin")
    if stagger:
        idx = np.arange(-M - 1, M + 1) + a
    else:
        idx = np.arange(-M, M + 1).astype(float)
    nodes = idx * step
    weights = step * np.abs(nodes) ** (2 * k)
    if not stagger:
        weights[M] = 0.0
    pairs = M + 1 if stagger else M
    m = min(order, pairs - 1)
    coef = symmetric_correction(float(k), m, bool(stagger))
    scale = step ** (2 * k + 1)
    centre = M + 1 if stagger else M  # index of the first node >= 0
    for p, c in enumerate(coef):
        if not stagger and p == 0:
            weights[centre] += c * scale
        elif stagger:
            weights[centre + p] += c * scale
            weights[centre - 1 - p] += c * scale
        else:
            weights[centre + p] += c * scale
            weights[centre - p] += c * scale
    return Axis(nodes=nodes, weights=weights, k=float(k), step=float(step), stagger=bool(stagger))


def _one_sided_weights(axis, side, order=ONE_SIDED_ORDER):
    h = axis.step
    k = axis.k
    w = np.zeros(axis.size)
    if side > 0:
        sel = np.nonzero(axis.nodes >= 0)[0] if not axis.stagger else np.nonzero(axis.nodes > 0)[0]
    else:
        sel = np.nonzero(axis.nodes <= 0)[0][::-1] if not axis.stagger else np.nonzero(axis.nodes < 0)[0][::-1]
    y = np.abs(axis.nodes[sel])
    base = h * y ** (2 * k)
    if not axis.stagger:
        base[0] = 0.0
    m = min(order, sel.size - 1)
    coef = np.asarray(one_sided_correction(float(k), m, axis.stagger))
    base[: m + 1] += coef * h ** (2 * k + 1)
    w[sel] = base
    return w


def gauss_legendre_panels(edges, order):
    """Composite Gauss-Legendre nodes and weights on consecutive panels."""
    x, w = roots_legendre(order)
    edges = np.asarray(edges, float)
    a = edges[:-1, None]
    b = edges[1:, None]
    nodes = 0.5 * (b - a) * x[None, :] + 0.5 * (b + a)
    weights = 0.5 * (b - a) * w[None, :]
    return nodes.ravel(), weights.ravel()


def graded_panels(a, b, ratio=0.2, levels=8):
    """Panel edges on ``[a, b]`` refined geometrically toward both ends."""
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    left = [a + half * ratio ** j for j in range(levels, 0, -1)]
    right = [b - half * ratio ** j for j in range(1, levels + 1)][::-1]
    return np.array([a] + left + [mid] + right + [b])
