"""Dunkl kernel, Dunkl operators on tensor grids and the sign group Z_2^n.

Sampled functions live on tensor products of uniform axes that are
symmetric about the origin, so every reflection ``x_j -> -x_j`` maps grid
nodes onto grid nodes and reflection terms need no interpolation.
"""

import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import roots_jacobi

from ._backend import core
from .errors import DomainError, GridError
from .quadrature import Axis, make_axis

__all__ = [
    "MultiplicitySetup",
    "SignVector",
    "SampledField",
    "FIELD_FORMAT",
    "make_grid",
    "sample_field",
    "dunkl_kernel_1d",
    "dunkl_kernel_1d_integral",
    "dunkl_kernel",
    "apply_dunkl_operator",
    "apply_dunkl_laplacian",
    "derivative",
    "second_derivative",
    "sign_vectors",
    "orbit",
    "reflect_field",
    "field_to_dict",
    "field_from_dict",
    "save_field",
    "load_field",
]

FIELD_FORMAT = "dunkl-field-v1"


@dataclass(frozen=True)
class MultiplicitySetup:
    """Dimension and multiplicities of the reflection group Z_2^n.

    Attributes
    ----------
    k : tuple of float
        Nonnegative multiplicity per axis; ``n = len(k)``.
    """

    k: tuple

    def __post_init__(self):
        ks = tuple(float(v) for v in np.atleast_1d(self.k))
        if not ks:
            raise DomainError("need at least one axis")
        if any(not math.isfinite(v) or v < 0 for v in ks):
            raise DomainError(f"multiplicities must be finite and >= 0, got {ks}")
        object.__setattr__(self, "k", ks)

    @classmethod
    def uniform(cls, n, k):
        return cls((float(k),) * int(n))

    @property
    def n(self):
        return len(self.k)

    @property
    def k_sum(self):
        return float(sum(self.k))

    @property
    def N(self):
        """Homogeneous dimension ``n + 2 sum(k)``."""
        return self.n + 2.0 * self.k_sum

    @property
    def log_c_mm(self):
        return sum((kj + 0.5) * math.log(2.0) + math.lgamma(kj + 0.5) for kj in self.k)

    @property
    def c_mm(self):
        """Gaussian integral ``int exp(-|x|^2/2) dmu``."""
        return math.exp(self.log_c_mm)

    @property
    def c_heat(self):
        """Heat-kernel constant ``2^N prod Gamma(k_j + 1/2)``."""
        return math.exp(self.N * math.log(2.0) + sum(math.lgamma(kj + 0.5) for kj in self.k))

    def to_dict(self):
        return {"n": self.n, "k": list(self.k)}


@dataclass(frozen=True)
class SignVector:
    """An element of Z_2^n acting by coordinate sign flips."""

    signs: tuple

    def __post_init__(self):
        s = tuple(int(v) for v in self.signs)
        if any(v not in (1, -1) for v in s):
            raise DomainError("sign entries must be +1 or -1")
        object.__setattr__(self, "signs", s)

    @classmethod
    def identity(cls, n):
        return cls((1,) * n)

    @classmethod
    def reflection(cls, n, j):
        """The reflection ``sigma_j`` flipping coordinate ``j``."""
        s = [1] * n
        s[j] = -1
        return cls(tuple(s))

    @property
    def n(self):
        return len(self.signs)

    def __mul__(self, other):
        return SignVector(tuple(a * b for a, b in zip(self.signs, other.signs)))

    def is_identity(self):
        return all(v == 1 for v in self.signs)

    def apply(self, x):
        return np.asarray(x, float) * np.asarray(self.signs, float)


def sign_vectors(n):
    """All ``2^n`` sign vectors, identity first."""
    return [SignVector(tuple(1 - 2 * b for b in bits)) for bits in itertools.product((0, 1), repeat=n)]


@dataclass(frozen=True, eq=False)
class SampledField:
    """Values of a function on a tensor grid with ``dmu`` quadrature.

    Attributes
    ----------
    axes : tuple of Axis
    values : ndarray
        Shape ``tuple(ax.size for ax in axes)``; real or complex.
    meta : dict
        Free-form provenance of the samples (source description etc.).
    """

    axes: tuple
    values: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        axes = tuple(self.axes)
        vals = np.asarray(self.values)
        if vals.shape != tuple(ax.size for ax in axes):
            raise GridError(f"values of shape {vals.shape} do not match the grid")
        object.__setattr__(self, "axes", axes)
        object.__setattr__(self, "values", vals)

    @property
    def n(self):
        return len(self.axes)

    @property
    def setup(self):
        return MultiplicitySetup(tuple(ax.k for ax in self.axes))

    @property
    def shape(self):
        return self.values.shape

    @property
    def nodes(self):
        return [ax.nodes for ax in self.axes]

    def mesh(self):
        return np.meshgrid(*self.nodes, indexing="ij")

    def with_values(self, values, **meta):
        return SampledField(self.axes, values, {**self.meta, **meta})

    def integrate(self, values=None):
        """``int g dmu`` for ``g`` given on the grid (defaults to the field)."""
        out = self.values if values is None else np.asarray(values)
        for ax in self.axes:
            out = np.tensordot(ax.weights, out, axes=(0, 0))
        return out

    def lp_norm(self, p=1):
        return float(self.integrate(np.abs(self.values) ** p)) ** (1.0 / p)

    def edge_ratio(self, width=2):
        """Largest boundary magnitude relative to the interior maximum."""
        vals = np.abs(self.values)
        top = vals.max()
        if top == 0:
            return 0.0
        edge = 0.0
        for j in range(self.n):
            lo = np.take(vals, range(width), axis=j)
            hi = np.take(vals, range(vals.shape[j] - width, vals.shape[j]), axis=j)
            edge = max(edge, lo.max(), hi.max())
        return float(edge / top)

    def same_grid(self, other):
        return len(self.axes) == len(other.axes) and all(
            a.size == b.size and a.k == b.k and np.array_equal(a.nodes, b.nodes)
            for a, b in zip(self.axes, other.axes))


def _per_axis(value, n, name):
    arr = np.atleast_1d(np.asarray(value, float))
    if arr.size == 1:
        return [float(arr[0])] * n
    if arr.size != n:
        raise GridError(f"{name} needs 1 or {n} entries")
    return [float(v) for v in arr]


def make_grid(setup, extent, step, stagger=False):
    """Tuple of symmetric axes for ``setup`` (scalars apply to every axis)."""
    ext = _per_axis(extent, setup.n, "extent")
    stp = _per_axis(step, setup.n, "step")
    return tuple(make_axis(kj, e, h, stagger=stagger) for kj, e, h in zip(setup.k, ext, stp))


def sample_field(setup, func, extent, step, stagger=False, **meta):
    """Sample ``func(*coords)`` on a fresh grid; ``coords`` are ij meshes."""
    axes = make_grid(setup, extent, step, stagger)
    coords = np.meshgrid(*[ax.nodes for ax in axes], indexing="ij")
    return SampledField(axes, np.asarray(func(*coords)), dict(meta))


def dunkl_kernel_1d(k, x, y):
    """One-dimensional Dunkl kernel ``E_k(x, y)`` for real arguments.

    Evaluated through the exponentially scaled Bessel bracket, so it does
    not overflow before ``exp(|xy|)`` itself does.  ``E_k(x, 0) = 1``
    exactly and ``k = 0`` gives ``exp(xy)``.
    """
    if k < 0:
        raise DomainError("multiplicity must be nonnegative")
    out = core.dunkl_kernel_1d(float(k), x, y)
    return float(out) if np.ndim(out) == 0 else out


def dunkl_kernel_1d_integral(k, x, y, order=None):
    """Dunkl kernel from its Beta-type integral, by Gauss-Jacobi quadrature.

    Independent of the Bessel route; used as a cross-check.
    """
    if k == 0:
        return math.exp(x * y)
    if k < 0:
        raise DomainError("multiplicity must be nonnegative")
    a = x * y
    m = order or max(40, int(abs(a)) + 40)
    u, w = roots_jacobi(m, k - 1.0, k)
    log_c = math.lgamma(k + 0.5) - math.lgamma(k) - 0.5 * math.log(math.pi)
    # factor out the largest exponential so large |xy| stays representable
    shift = abs(a)
    return math.exp(log_c + shift) * float(np.sum(w * np.exp(a * u - shift)))


def dunkl_kernel(setup, x, y):
    """Product kernel ``E(x, y) = prod_j E_{k_j}(x_j, y_j)``.

    ``x`` and ``y`` broadcast against each other with the coordinate index
    on the last axis.
    """
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    if x.shape[-1] != setup.n or y.shape[-1] != setup.n:
        raise DomainError("points must have n coordinates")
    out = 1.0
    for j, kj in enumerate(setup.k):
        out = out * core.dunkl_kernel_1d(kj, x[..., j], y[..., j])
    return float(out) if np.ndim(out) == 0 else out


def _check_symmetric(ax):
    if not ax.is_symmetric():
        raise GridError("axis is not symmetric about 0")


def derivative(values, h, axis):
    """Central first difference; second-order one-sided at both ends."""
    v = np.moveaxis(np.asarray(values), axis, 0)
    out = np.empty_like(v)
    out[1:-1] = (v[2:] - v[:-2]) / (2 * h)
    out[0] = (-3 * v[0] + 4 * v[1] - v[2]) / (2 * h)
    out[-1] = (3 * v[-1] - 4 * v[-2] + v[-3]) / (2 * h)
    return np.moveaxis(out, 0, axis)


def second_derivative(values, h, axis):
    """Central second difference; second-order one-sided at both ends."""
    v = np.moveaxis(np.asarray(values), axis, 0)
    out = np.empty_like(v)
    out[1:-1] = (v[2:] - 2 * v[1:-1] + v[:-2]) / h ** 2
    out[0] = (2 * v[0] - 5 * v[1] + 4 * v[2] - v[3]) / h ** 2
    out[-1] = (2 * v[-1] - 5 * v[-2] + 4 * v[-3] - v[-4]) / h ** 2
    return np.moveaxis(out, 0, axis)


def _coord(ax, ndim, j):
    shape = [1] * ndim
    shape[j] = ax.size
    return ax.nodes.reshape(shape)


def dunkl_derivative(values, ax, j):
    """``D_j`` along axis ``j`` of an array sampled on ``ax``."""
    _check_symmetric(ax)
    v = np.asarray(values)
    d = derivative(v, ax.step, j)
    if ax.k == 0:
        return d
    odd = 0.5 * (v - np.flip(v, axis=j))
    x = _coord(ax, v.ndim, j)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = d + 2 * ax.k * odd / x
    z = ax.zero_index
    if z is not None:
        # removable singularity: (f - f o sigma)/x -> 2 f'(0)
        idx = [slice(None)] * v.ndim
        idx[j] = z
        out[tuple(idx)] = (1 + 2 * ax.k) * d[tuple(idx)]
    return out


def dunkl_second(values, ax, j):
    """``D_j^2`` along axis ``j``.

    Written as ``f'' + (2k/x) f_e' + 2k (f_o/x)'`` with ``f_e, f_o`` the
    even and odd parts, which keeps every quotient smooth near 0.
    """
    _check_symmetric(ax)
    v = np.asarray(values)
    h = ax.step
    d2 = second_derivative(v, h, j)
    if ax.k == 0:
        return d2
    k = ax.k
    x = _coord(ax, v.ndim, j)
    flip = np.flip(v, axis=j)
    even = 0.5 * (v + flip)
    odd = 0.5 * (v - flip)
    z = ax.zero_index
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = odd / x
        if z is not None:
            # f_o/x is even, so extrapolate to 0 from the nodes h and 2h
            idx = [slice(None)] * v.ndim
            at = lambda i: tuple(idx[:j] + [i] + idx[j + 1:])
            ratio[at(z)] = (4 * ratio[at(z + 1)] - ratio[at(z + 2)]) / 3
        out = d2 + 2 * k * derivative(even, h, j) / x + 2 * k * derivative(ratio, h, j)
    if z is not None:
        out[at(z)] = (1 + 2 * k) * d2[at(z)]
    return out


def apply_dunkl_operator(setup, j, f):
    """Apply ``D_j`` to a sampled field by finite differences.

    Parameters
    ----------
    setup : MultiplicitySetup
        Must agree with the multiplicities attached to the grid.
    j : int
        Axis index.
    f : SampledField

    Returns
    -------
    SampledField
        Second-order accurate in the grid step.
    """
    _match(setup, f)
    if not 0 <= j < f.n:
        raise DomainError(f"axis {j} out of range")
    return f.with_values(dunkl_derivative(f.values, f.axes[j], j))


def apply_dunkl_laplacian(setup, f):
    """Apply ``L = sum_j D_j^2`` to a sampled field."""
    _match(setup, f)
    out = np.zeros_like(f.values, dtype=np.result_type(f.values, float))
    for j, ax in enumerate(f.axes):
        out = out + dunkl_second(f.values, ax, j)
    return f.with_values(out)


def _match(setup, f):
    if tuple(ax.k for ax in f.axes) != tuple(setup.k):
        raise GridError("grid multiplicities differ from the setup")


def orbit(setup, x):
    """The ``2^n`` images ``sigma x`` (with repeats if some ``x_j = 0``)."""
    x = np.asarray(x, float)
    if x.shape != (setup.n,):
        raise DomainError("point must have n coordinates")
    return [s.apply(x) for s in sign_vectors(setup.n)]


def reflect_field(f, sigma):
    """Field ``x -> f(sigma x)``, an exact permutation of the samples."""
    if sigma.n != f.n:
        raise DomainError("sign vector dimension differs from the field")
    flip = [j for j, s in enumerate(sigma.signs) if s < 0]
    for j in flip:
        _check_symmetric(f.axes[j])
    vals = np.flip(f.values, axis=flip) if flip else f.values.copy()
    return f.with_values(vals)


def _axis_to_dict(ax):
    return {"k": ax.k, "step": ax.step, "stagger": ax.stagger,
            "nodes": ax.nodes.tolist(), "weights": ax.weights.tolist()}


def _axis_from_dict(d):
    return Axis(nodes=np.asarray(d["nodes"], float), weights=np.asarray(d["weights"], float),
                k=float(d["k"]), step=float(d["step"]), stagger=bool(d["stagger"]))


def field_to_dict(axes, values, domain="space", extra=None):
    """Self-describing container for a sampled field (row-major values)."""
    values = np.asarray(values)
    out = {
        "format": FIELD_FORMAT,
        "domain": domain,
        "shape": list(values.shape),
        "axes": [_axis_to_dict(ax) for ax in axes],
        "real": values.real.ravel().tolist(),
    }
    if np.iscomplexobj(values):
        out["imag"] = values.imag.ravel().tolist()
    if extra:
        out["extra"] = extra
    return out


def field_from_dict(d):
    """Return ``(axes, values, domain, extra)`` from :func:`field_to_dict`."""
    if d.get("format") != FIELD_FORMAT:
        raise GridError(f"not a {FIELD_FORMAT} container")
    axes = tuple(_axis_from_dict(a) for a in d["axes"])
    shape = tuple(d["shape"])
    values = np.asarray(d["real"], float).reshape(shape)
    if "imag" in d:
        values = values + 1j * np.asarray(d["imag"], float).reshape(shape)
    return axes, values, d.get("domain", "space"), d.get("extra", {})


def save_field(path, f):
    with open(path, "w") as fh:
        json.dump(field_to_dict(f.axes, f.values, "space", f.meta or None), fh)


def load_field(path):
    with open(path) as fh:
        axes, values, domain, extra = field_from_dict(json.load(fh))
    if domain != "space":
        raise GridError(f"expected a space-domain field, got {domain!r}")
    return SampledField(axes, values, extra)
