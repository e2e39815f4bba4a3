"""Quadrature Dunkl transform on tensor grids, multipliers and Riesz transforms.

Per axis the kernel at imaginary argument is

    E_k(x, -i xi) = j_{k-1/2}(x xi) - i x xi / (2k+1) j_{k+1/2}(x xi),

with the normalized Bessel function ``j_a(w) = Gamma(a+1) (2/w)^a J_a(w)``.
The transform is normalized by the Gaussian integral ``c_mm`` of the
measure, which makes it unitary and fixes ``exp(-|x|^2/2)``.

Multiplier symbols such as ``exp(-t|xi|)`` or ``i xi_j/|xi|`` are not
smooth at ``xi = 0``.  The inverse transform of a multiplied field is
therefore integrated orthant by orthant with one-sided quadrature weights
and with each symbol evaluated at its one-sided limit on the coordinate
hyperplanes, which keeps the inverse high-order accurate.
"""

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln, jv

from .dunkl import SampledField, field_to_dict, field_from_dict
from .errors import DomainError, GridError
from .quadrature import make_axis

__all__ = [
    "MultiplierSpec",
    "SpectralField",
    "frequency_axes",
    "normalized_bessel_j",
    "dunkl_transform",
    "inverse_transform",
    "apply_multiplier",
    "inverse_batch",
    "riesz_symbol",
    "poisson_symbol",
    "heat_symbol",
    "identity_symbol",
    "norm_symbol",
    "riesz_transform",
    "poisson_semigroup",
    "plancherel_ratio",
    "smooth_annulus",
    "hoermander_norm",
    "spectral_to_dict",
    "spectral_from_dict",
]

NORMALIZATION = "c_mm"
_ONE_SIDED_SHIFT = 1e-150


def normalized_bessel_j(a, w):
    """``Gamma(a+1) (2/w)^a J_a(w)``, equal to 1 at ``w = 0``."""
    w = np.abs(np.asarray(w, float))
    out = np.empty_like(w)
    small = w < 1e-6
    ws = w[small]
    out[small] = 1.0 - ws ** 2 / (4 * (a + 1)) + ws ** 4 / (32 * (a + 1) * (a + 2))
    wb = w[~small]
    out[~small] = np.exp(gammaln(a + 1) + a * np.log(2.0 / wb)) * jv(a, wb)
    return out


def _kernel_parts(k, x, xi):
    """Even and odd parts of ``E_k(x, -i xi) = even - i odd`` on a mesh."""
    w = np.multiply.outer(x, xi)
    if k == 0:
        return np.cos(w), np.sin(w)
    even = normalized_bessel_j(k - 0.5, w)
    odd = w / (2 * k + 1) * normalized_bessel_j(k + 0.5, w)
    return even, odd


_CACHE = {}
_CACHE_LIMIT = 16


def _parts_cached(k, x, xi):
    key = (k, x.size, xi.size, hash(x.tobytes()), hash(xi.tobytes()))
    hit = _CACHE.get(key)
    if hit is None:
        if len(_CACHE) >= _CACHE_LIMIT:
            _CACHE.pop(next(iter(_CACHE)))
        hit = _kernel_parts(k, x, xi)
        _CACHE[key] = hit
    return hit


def _axis_const(k):
    return math.exp((k + 0.5) * math.log(2.0) + math.lgamma(k + 0.5))


@dataclass(frozen=True)
class MultiplierSpec:
    """A Fourier-Dunkl multiplier symbol.

    Attributes
    ----------
    symbol : callable
        ``symbol(xi)`` with ``xi`` a list of n broadcastable coordinate
        arrays; returns the symbol values.
    name : str
    degree : float or None
        Homogeneity degree when the symbol is homogeneous.
    axis : int or None
        Coordinate index for Riesz symbols.
    smooth : bool
        False when the symbol has a kink or jump on a coordinate
        hyperplane; the inverse transform then uses one-sided rules.
    """

    symbol: object
    name: str
    degree: float = None
    axis: int = None
    smooth: bool = False
    params: dict = field(default_factory=dict)

    def __call__(self, xi):
        return self.symbol(xi)


def _norm(xi):
    return np.sqrt(sum(np.asarray(c, float) ** 2 for c in xi))


def riesz_symbol(j):
    """``i xi_j / |xi|`` (0 at the origin)."""

    def sym(xi):
        r = _norm(xi)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = 1j * np.where(r > 0, xi[j] / np.where(r > 0, r, 1.0), 0.0)
        return out

    return MultiplierSpec(sym, f"riesz[{j}]", degree=0.0, axis=j, smooth=False, params={"j": j})


def poisson_symbol(t):
    return MultiplierSpec(lambda xi: np.exp(-t * _norm(xi)), f"poisson[{t:g}]",
                          smooth=False, params={"t": t})


def heat_symbol(t):
    return MultiplierSpec(lambda xi: np.exp(-t * _norm(xi) ** 2), f"heat[{t:g}]",
                          smooth=True, params={"t": t})


def identity_symbol():
    return MultiplierSpec(lambda xi: np.ones(np.broadcast(*xi).shape), "identity",
                          degree=0.0, smooth=True)


def norm_symbol():
    return MultiplierSpec(lambda xi: _norm(xi), "norm", degree=1.0, smooth=False)


def frequency_axes(axes, step=None, extent=None):
    """Frequency axes matched to spatial ``axes``.

    Defaults, per axis: step ``0.5 / L`` with ``L`` the spatial half-width
    and extent ``pi / (2h)`` with ``h`` the spatial step.  The fine step
    keeps one-sided corrections at a kinked symbol accurate out to
    ``|x| = L`` (their error grows like ``(|x| dxi)^j``); stopping at half
    the Nyquist frequency keeps the aliased image of the weight's
    singularity at the origin, of size ``(h / (2 pi - h xi))^{2k+1}``,
    small.
    """
    out = []
    for j, ax in enumerate(axes):
        st = step[j] if isinstance(step, (list, tuple)) else step
        ex = extent[j] if isinstance(extent, (list, tuple)) else extent
        st = st or 0.5 / ax.extent
        ex = ex or 0.5 * math.pi / ax.step
        out.append(make_axis(ax.k, ex, st))
    return tuple(out)


@dataclass(frozen=True, eq=False)
class SpectralField:
    """Transform-side values with a pending chain of multipliers.

    ``values`` is the pointwise product of the stored transform with every
    multiplier; the chain is kept so that the inverse transform can treat
    non-smooth symbols with one-sided quadrature.
    """

    space_axes: tuple
    freq_axes: tuple
    base: np.ndarray
    multipliers: tuple = ()
    normalization: str = NORMALIZATION

    @property
    def n(self):
        return len(self.freq_axes)

    def mesh(self):
        return np.meshgrid(*[ax.nodes for ax in self.freq_axes], indexing="ij")

    def symbol_values(self, shift=None):
        xi = self.mesh()
        if shift is not None:
            xi = [c + s * _ONE_SIDED_SHIFT * (c == 0) for c, s in zip(xi, shift)]
        out = np.ones(self.base.shape, dtype=complex)
        for m in self.multipliers:
            out = out * m(xi)
        return out

    @property
    def values(self):
        if not self.multipliers:
            return self.base
        return self.base * self.symbol_values()

    def with_multiplier(self, m):
        return SpectralField(self.space_axes, self.freq_axes, self.base,
                             self.multipliers + (m,), self.normalization)

    def l2_norm(self):
        v = np.abs(self.values) ** 2
        for ax in self.freq_axes:
            v = np.tensordot(ax.weights, v, axes=(0, 0))
        return float(np.sqrt(v))


def _apply_axes(mats, values):
    out = values
    for j, m in enumerate(mats):
        out = np.moveaxis(np.tensordot(m, out, axes=(1, j)), 0, j)
    return out


def dunkl_transform(setup, f, freq=None, envelope_tol=1e-8):
    """Dunkl transform ``c_mm^{-1} int f(x) E(x, -i xi) dmu(x)``.

    Parameters
    ----------
    setup : MultiplicitySetup
    f : SampledField
    freq : tuple of Axis, optional
        Frequency grid; :func:`frequency_axes` defaults otherwise.
    envelope_tol : float
        Largest allowed boundary magnitude of ``f`` relative to its
        maximum; a larger value means the truncation is not negligible.

    Returns
    -------
    SpectralField
    """
    if tuple(ax.k for ax in f.axes) != tuple(setup.k):
        raise GridError("grid multiplicities differ from the setup")
    if f.edge_ratio() > envelope_tol:
        raise DomainError(f"field does not decay at the grid boundary (edge ratio {f.edge_ratio():.3g})")
    freq = freq or frequency_axes(f.axes)
    mats = []
    for ax, fx in zip(f.axes, freq):
        even, odd = _parts_cached(ax.k, fx.nodes, ax.nodes)
        mats.append((even - 1j * odd) * (ax.weights / _axis_const(ax.k))[None, :])
    return SpectralField(tuple(f.axes), tuple(freq), _apply_axes(mats, f.values))


def _inverse_mats(space_axes, freq_axes, signs=None):
    mats = []
    for j, (ax, fx) in enumerate(zip(space_axes, freq_axes)):
        even, odd = _parts_cached(ax.k, ax.nodes, fx.nodes)
        w = fx.weights if signs is None else fx.one_sided_weights(signs[j])
        mats.append((even + 1j * odd) * (w / _axis_const(ax.k))[None, :])
    return mats


def inverse_transform(F, real=True):
    """Inverse transform back onto the spatial grid of ``F``.

    Returns
    -------
    SampledField
        Real part when ``real`` is true; the largest imaginary magnitude
        is recorded in ``meta["imag_residual"]``.
    """
    if all(m.smooth for m in F.multipliers):
        vals = _apply_axes(_inverse_mats(F.space_axes, F.freq_axes), F.values)
    else:
        vals = 0
        for signs in itertools.product((1, -1), repeat=F.n):
            part = F.base * F.symbol_values(signs)
            vals = vals + _apply_axes(_inverse_mats(F.space_axes, F.freq_axes, signs), part)
    imag = float(np.max(np.abs(vals.imag))) if np.iscomplexobj(vals) else 0.0
    meta = {"imag_residual": imag, "normalization": F.normalization}
    return SampledField(F.space_axes, vals.real if real else vals, meta)


def inverse_batch(space_axes, freq_axes, bases, chains):
    """Inverse transforms of ``bases[b] * prod(chain)`` for many fields and chains.

    Parameters
    ----------
    space_axes, freq_axes : tuple of Axis
    bases : ndarray
        Transforms stacked on a leading axis, shape ``(B, *freq_grid)``.
    chains : sequence of tuples of MultiplierSpec

    Returns
    -------
    values : ndarray
        Real parts, shape ``(len(chains), B, *space_grid)``.
    imag : float
        Largest discarded imaginary magnitude.
    """
    bases = np.asarray(bases)
    n = len(freq_axes)
    out = np.zeros((len(chains), bases.shape[0]) + tuple(ax.size for ax in space_axes), complex)
    for signs in itertools.product((1, -1), repeat=n):
        mats = _inverse_mats(space_axes, freq_axes, signs)
        for c, chain in enumerate(chains):
            sym = SpectralField(tuple(space_axes), tuple(freq_axes), bases[0], tuple(chain)).symbol_values(signs)
            vals = bases * sym[None]
            for j, m in enumerate(mats):
                vals = np.moveaxis(np.tensordot(m, vals, axes=(1, j + 1)), 0, j + 1)
            out[c] += vals
    return out.real, float(np.max(np.abs(out.imag), initial=0.0))


def apply_multiplier(F, m):
    """Multiply by the symbol ``m`` (pointwise; kept lazily for the inverse)."""
    return F.with_multiplier(m)


def riesz_transform(setup, f, j, freq=None):
    """Riesz transform ``R_j f`` with symbol ``i xi_j / |xi|``."""
    if not 0 <= j < setup.n:
        raise DomainError(f"axis {j} out of range")
    F = dunkl_transform(setup, f, freq)
    return inverse_transform(apply_multiplier(F, riesz_symbol(j)))


def poisson_semigroup(setup, f, t, freq=None):
    """``P_t f`` by the multiplier ``exp(-t|xi|)``."""
    F = dunkl_transform(setup, f, freq)
    return inverse_transform(apply_multiplier(F, poisson_symbol(t)))


def plancherel_ratio(setup, f, freq=None):
    """``||F f||_2 / ||f||_2``."""
    return dunkl_transform(setup, f, freq).l2_norm() / f.lp_norm(2)


def _smooth_step(s):
    s = np.clip(s, 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        a = np.where(s > 0, np.exp(-1.0 / np.where(s > 0, s, 1.0)), 0.0)
        b = np.where(s < 1, np.exp(-1.0 / np.where(s < 1, 1 - s, 1.0)), 0.0)
    return a / (a + b)


def smooth_annulus(r):
    """Radial cutoff: 1 on ``[1/2, 2]``, 0 outside ``(1/4, 4)``, smooth."""
    r = np.asarray(r, float)
    return _smooth_step((r - 0.25) / 0.25) * (1.0 - _smooth_step((r - 2.0) / 2.0))


def hoermander_norm(m, setup, eps, t_grid, points=256, half_width=4.5):
    """Largest Sobolev norm of ``chi(xi) m(t xi)`` over ``t`` in ``t_grid``.

    The Sobolev order is ``N/2 + eps``; the norm is computed with the
    Euclidean Fourier transform on an FFT grid covering the support of the
    cutoff ``chi`` (see :func:`smooth_annulus`).
    """
    if eps <= 0:
        raise DomainError("eps must be positive")
    n = setup.n
    order = setup.N / 2 + eps
    d = 2 * half_width / points
    line = -half_width + d * np.arange(points)
    xi = np.meshgrid(*([line] * n), indexing="ij")
    chi = smooth_annulus(_norm(xi))
    freq = 2 * np.pi * np.fft.fftfreq(points, d)
    zeta = np.meshgrid(*([freq] * n), indexing="ij")
    weight = (1 + sum(z ** 2 for z in zeta)) ** order
    dz = (2 * np.pi / (points * d)) ** n
    best = 0.0
    for t in np.atleast_1d(t_grid):
        g = chi * m([t * c for c in xi])
        ghat = np.fft.fftn(g) * d ** n
        val = math.sqrt(float(np.sum(weight * np.abs(ghat) ** 2)) * dz / (2 * np.pi) ** n)
        best = max(best, val)
    return best


def spectral_to_dict(F):
    """Container for the pointwise values of ``F`` (domain ``frequency``)."""
    extra = {"normalization": F.normalization, "multipliers": [m.name for m in F.multipliers],
             "space_axes": [{"k": a.k, "step": a.step, "stagger": a.stagger, "extent": a.extent}
                            for a in F.space_axes]}
    return field_to_dict(F.freq_axes, F.values, "frequency", extra)


def spectral_from_dict(d):
    """Rebuild the frequency axes and values; multipliers are already applied."""
    axes, values, domain, extra = field_from_dict(d)
    if domain != "frequency":
        raise GridError(f"expected a frequency-domain field, got {domain!r}")
    space = tuple(make_axis(a["k"], a["extent"] + 1e-9 * a["step"], a["step"], a["stagger"])
                  for a in extra.get("space_axes", []))
    return SpectralField(space, axes, values, (), extra.get("normalization", NORMALIZATION))
