"""Conjugate harmonic systems, their reflection orbit and subharmonicity.

For a real ``f`` the system ``u_0 = P_t f``, ``u_j = -P_t(R_j f)`` is built
on the transform side with the symbols ``exp(-t|xi|)`` and
``-i xi_j/|xi| exp(-t|xi|)``.  It satisfies

    D_j u_0 = d_t u_j,   D_j u_l = D_l u_j,   d_t u_0 + sum_j D_j u_j = 0.

The orbit field stacks the reflected systems ``u^sigma`` for every sign
vector ``sigma``.  With ``u^sigma_0(x) = u_0(sigma x)`` and
``u^sigma_j(x) = sigma_j u_j(sigma x)`` each ``u^sigma`` is the conjugate
system of ``f o sigma`` and so satisfies the same equations; the signs do
not change ``|F|``.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .dunkl import SampledField, derivative, dunkl_derivative, dunkl_second, second_derivative, sign_vectors
from .errors import DomainError, GridError
from .matlemma import SearchBudget, delta_search
from .quadrature import make_axis
from .transform import apply_multiplier, dunkl_transform, inverse_transform, poisson_symbol, riesz_symbol

__all__ = [
    "ConjugateField",
    "CRReport",
    "OrbitField",
    "GradientMatrix",
    "ScanReport",
    "QBound",
    "uniform_t_grid",
    "build_conjugate_system",
    "cr_residuals",
    "build_orbit_field",
    "subharmonicity_scan",
    "gradient_matrices",
    "admissible_q_bound",
    "paper_q_bound",
    "smallest_violation_free_q",
]

CR_FAMILIES = ("gradient", "curl", "divergence")
DEFAULT_T_MIN = 0.1


def uniform_t_grid(t_min, t_max, step):
    """Uniform grid ``t_min, t_min + step, ...`` not exceeding ``t_max``."""
    if not 0 < t_min < t_max or step <= 0:
        raise DomainError("need 0 < t_min < t_max and a positive step")
    count = int(math.floor((t_max - t_min) / step + 1e-9)) + 1
    return t_min + step * np.arange(count)


@dataclass(frozen=True, eq=False)
class ConjugateField:
    """The system ``(u_0, ..., u_n)`` sampled on ``t_grid`` times a spatial grid.

    Attributes
    ----------
    t_grid : ndarray
        Increasing positive times.
    axes : tuple of Axis
    u : ndarray
        Shape ``(n + 1, len(t_grid), *grid)``.
    source : dict
        Description of the generating function.
    meta : dict
        ``imag_residual`` of the inverse transforms among others.
    """

    t_grid: np.ndarray
    axes: tuple
    u: np.ndarray
    source: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        t = np.asarray(self.t_grid, float)
        if t.ndim != 1 or t.size == 0 or t[0] <= 0 or np.any(np.diff(t) <= 0):
            raise DomainError("t_grid must be increasing and positive")
        object.__setattr__(self, "t_grid", t)
        shape = (len(self.axes) + 1, t.size) + tuple(ax.size for ax in self.axes)
        if self.u.shape != shape:
            raise GridError(f"components of shape {self.u.shape}, expected {shape}")

    @property
    def n(self):
        return len(self.axes)

    @property
    def t_step(self):
        """Common spacing of ``t_grid``; raises when it is not uniform."""
        d = np.diff(self.t_grid)
        if d.size == 0 or np.ptp(d) > 1e-9 * d.mean():
            raise GridError("t_grid is not uniform")
        return float(d.mean())

    def component(self, ell, it):
        return SampledField(self.axes, self.u[ell, it], {"component": ell, "t": float(self.t_grid[it])})


def build_conjugate_system(setup, f, t_grid, freq=None):
    """Poisson extension of ``f`` together with its conjugate components.

    Parameters
    ----------
    setup : MultiplicitySetup
    f : SampledField
        Real samples decaying at the grid boundary.
    t_grid : array_like
        Increasing positive times.
    freq : tuple of Axis, optional
        Frequency grid of the transform.

    Returns
    -------
    ConjugateField
    """
    if np.iscomplexobj(f.values) and np.any(f.values.imag != 0):
        raise DomainError("the source must be real-valued")
    t_grid = np.asarray(t_grid, float)
    F = dunkl_transform(setup, f.with_values(np.real(f.values)), freq)
    n = setup.n
    u = np.empty((n + 1, t_grid.size) + f.shape)
    imag = 0.0
    for it, t in enumerate(t_grid):
        Pt = apply_multiplier(F, poisson_symbol(float(t)))
        g = inverse_transform(Pt)
        u[0, it] = g.values
        imag = max(imag, g.meta["imag_residual"])
        for j in range(n):
            g = inverse_transform(apply_multiplier(Pt, riesz_symbol(j)))
            u[j + 1, it] = -g.values
            imag = max(imag, g.meta["imag_residual"])
    source = dict(f.meta.get("source", f.meta)) if isinstance(f.meta.get("source", f.meta), dict) else {}
    return ConjugateField(t_grid, tuple(f.axes), u, source,
                          {"imag_residual": imag, "freq_sizes": [ax.size for ax in F.freq_axes]})


@dataclass
class CRReport:
    """Max-norm residuals of the three families on the checked nodes."""

    residuals: dict
    scale: float
    nodes: int
    h: tuple
    t_step: float

    def to_dict(self):
        return {"residuals": self.residuals, "scale": self.scale, "nodes": self.nodes,
                "h": list(self.h), "t_step": self.t_step}


def _interior_mask(C, window, t_range):
    """Boolean mask over ``(T, *grid)`` of interior nodes inside the window."""
    T = C.t_grid.size
    shape = (T,) + tuple(ax.size for ax in C.axes)
    mask = np.zeros(shape, bool)
    mask[(slice(1, -1),) * len(shape)] = True
    t = C.t_grid.reshape((-1,) + (1,) * C.n)
    if t_range is not None:
        mask &= (t >= t_range[0] - 1e-12) & (t <= t_range[1] + 1e-12)
    if window is not None:
        for j, ax in enumerate(C.axes):
            sh = [1] * (C.n + 1)
            sh[j + 1] = ax.size
            mask &= np.abs(ax.nodes.reshape(sh)) <= window + 1e-12
    return mask


def cr_residuals(setup, C, window=None, t_range=None):
    """Residuals of the Cauchy-Riemann type equations by finite differences.

    Only nodes whose stencils are central in every direction are used.

    Parameters
    ----------
    setup : MultiplicitySetup
    C : ConjugateField
        ``t_grid`` must be uniform.
    window : float, optional
        Restrict to ``max_j |x_j| <= window``.
    t_range : (float, float), optional
        Restrict to times in this closed interval.

    Returns
    -------
    CRReport
        ``residuals`` maps ``gradient`` (``D_j u_0 - d_t u_j``), ``curl``
        (``D_j u_l - D_l u_j``) and ``divergence``
        (``d_t u_0 + sum D_j u_j``) to max-norm values; ``curl`` is
        ``0.0`` when ``n = 1`` since the family is empty.
    """
    if tuple(ax.k for ax in C.axes) != tuple(setup.k):
        raise GridError("grid multiplicities differ from the setup")
    if C.t_grid.size < 5 or any(ax.size < 5 for ax in C.axes):
        raise GridError("need at least 5 nodes along every direction")
    ht = C.t_step
    n = C.n
    mask = _interior_mask(C, window, t_range)
    if not mask.any():
        raise GridError("no interior nodes in the requested window")
    D = [[dunkl_derivative(C.u[ell], ax, j + 1) for j, ax in enumerate(C.axes)] for ell in range(n + 1)]
    dt = [derivative(C.u[ell], ht, 0) for ell in range(n + 1)]
    grad = max(float(np.max(np.abs(D[0][j] - dt[j + 1])[mask])) for j in range(n))
    curl = 0.0
    for j in range(n):
        for ell in range(j + 1, n):
            curl = max(curl, float(np.max(np.abs(D[ell + 1][j] - D[j + 1][ell])[mask])))
    div = dt[0] + sum(D[j + 1][j] for j in range(n))
    div = float(np.max(np.abs(div)[mask]))
    return CRReport({"gradient": grad, "curl": curl, "divergence": div},
                    float(np.max(np.abs(C.u))), int(mask.sum()),
                    tuple(ax.step for ax in C.axes), ht)


@dataclass(frozen=True, eq=False)
class OrbitField:
    """Reflected systems ``u^sigma`` for every sign vector.

    Attributes
    ----------
    signs : tuple of SignVector
        Identity first.
    components : ndarray
        Shape ``(2^n, n + 1, T, *grid)``.
    magnitude : ndarray
        ``|F|`` of shape ``(T, *grid)``.
    """

    conjugate: ConjugateField
    signs: tuple
    components: np.ndarray
    magnitude: np.ndarray

    @property
    def n(self):
        return self.conjugate.n

    @property
    def axes(self):
        return self.conjugate.axes

    @property
    def t_grid(self):
        return self.conjugate.t_grid

    def index_of(self, sigma):
        return self.signs.index(sigma)

    def __len__(self):
        return self.components.shape[0] * self.components.shape[1]


def _flip_axes(sigma):
    # array axis 0 is t
    return [j + 1 for j, s in enumerate(sigma.signs) if s < 0]


def build_orbit_field(setup, C):
    """Stack ``u^sigma`` over the reflection group.

    ``u^sigma_0(x) = u_0(sigma x)`` and ``u^sigma_j(x) = sigma_j u_j(sigma x)``,
    both obtained by permuting nodes.
    """
    if tuple(ax.k for ax in C.axes) != tuple(setup.k):
        raise GridError("grid multiplicities differ from the setup")
    for ax in C.axes:
        if not ax.is_symmetric():
            raise GridError("orbit fields need grids symmetric about 0")
    signs = tuple(sign_vectors(C.n))
    comps = np.empty((len(signs),) + C.u.shape)
    for i, sigma in enumerate(signs):
        flip = _flip_axes(sigma)
        for ell in range(C.n + 1):
            v = np.flip(C.u[ell], axis=flip) if flip else C.u[ell]
            comps[i, ell] = v if ell == 0 else sigma.signs[ell - 1] * v
    mag = np.sqrt(np.sum(comps ** 2, axis=(0, 1)))
    return OrbitField(C, signs, comps, mag)


@dataclass
class ScanReport:
    q: float
    min_value: float
    argmin: tuple
    violation_count: int
    tol_fd: float
    checked: int
    grid_meta: dict

    def to_dict(self):
        return {"q": self.q, "min_value": self.min_value, "argmin": list(self.argmin),
                "violation_count": self.violation_count, "tol_fd": self.tol_fd,
                "checked": self.checked, "grid_meta": self.grid_meta}


def _coarse_axis(ax):
    """Every other node of ``ax`` keeping 0; ``None`` when impossible."""
    if ax.stagger:
        return None, None
    z = ax.zero_index
    idx = np.arange(z % 2, ax.size, 2)
    sub = make_axis(ax.k, float(ax.nodes[idx[-1]]) * (1 + 1e-12), 2 * ax.step)
    if sub.size != idx.size:
        return None, None
    return sub, idx


def _generator(G, ht, axes):
    """``(d_t^2 + sum_j D_j^2) G`` with t on array axis 0."""
    out = second_derivative(G, ht, 0)
    for j, ax in enumerate(axes):
        out = out + dunkl_second(G, ax, j + 1)
    return out


def subharmonicity_scan(setup, F, q, tau=None):
    """Discrete ``(d_t^2 + L)(|F|^q)`` and its negative excursions.

    The scan covers the nodes of the every-other-node sublattice that are
    interior for both resolutions, have all ``x_j != 0`` and ``|F| > tau``.
    At each such node the discretization error of the fine-grid value is
    estimated by Richardson extrapolation, ``|L_h - L_2h| / 3``; a node is a
    violation when its value is below minus this estimate.

    Parameters
    ----------
    setup : MultiplicitySetup
    F : OrbitField
    q : float
        Exponent in ``(0, 1]``.
    tau : float, optional
        Magnitude threshold; defaults to ``1e-6 max |F|``.

    Returns
    -------
    ScanReport
        ``tol_fd`` is the largest per-node error estimate; ``argmin`` is
        ``(t, x_1, ..., x_n)`` of the smallest value.
    """
    if not 0 < q <= 1:
        raise DomainError("q must lie in (0, 1]")
    top = float(F.magnitude.max())
    if tau is None:
        tau = 1e-6 * top
    elif tau <= 0:
        raise DomainError("tau must be positive")
    C = F.conjugate
    ht = C.t_step
    meta = {"n": C.n, "k": list(setup.k), "t_range": [float(C.t_grid[0]), float(C.t_grid[-1])],
            "t_step": ht, "h": [ax.step for ax in C.axes], "sizes": [ax.size for ax in C.axes],
            "tau": tau}
    if top <= tau:
        return ScanReport(float(q), 0.0, (), 0, 0.0, 0, meta)
    mag = F.magnitude
    with np.errstate(divide="ignore"):
        G = np.where(mag > 0, mag, 0.0) ** q
    fine = _generator(G, ht, C.axes)
    coarse_axes, picks = [], []
    for ax in C.axes:
        sub, idx = _coarse_axis(ax)
        if sub is None:
            raise GridError("the scan needs unstaggered axes with an odd node count")
        coarse_axes.append(sub)
        picks.append(idx)
    tidx = np.arange(0, C.t_grid.size, 2)
    sel = np.ix_(tidx, *picks)
    coarse = _generator(G[sel], 2 * ht, coarse_axes)
    ok = np.zeros(coarse.shape, bool)
    ok[(slice(1, -1),) * coarse.ndim] = True
    ok &= mag[sel] > tau
    for j, ax in enumerate(coarse_axes):
        sh = [1] * coarse.ndim
        sh[j + 1] = ax.size
        ok &= ax.nodes.reshape(sh) != 0
    value = fine[sel]
    err = np.abs(value - coarse) / 3.0
    if not ok.any():
        return ScanReport(float(q), 0.0, (), 0, 0.0, 0, meta)
    vals = np.where(ok, value, np.inf)
    i = np.unravel_index(int(np.argmin(vals)), vals.shape)
    grids = [C.t_grid[tidx]] + [ax.nodes for ax in coarse_axes]
    argmin = tuple(float(g[ii]) for g, ii in zip(grids, i))
    bad = ok & (value < -err)
    return ScanReport(float(q), float(vals[i]), argmin, int(bad.sum()), float(err[ok].max()),
                      int(ok.sum()), meta)


def smallest_violation_free_q(setup, F, q_lo=0.01, q_hi=1.0, tol=0.01, tau=None):
    """Bisect for the smallest exponent whose scan shows no violations.

    Assumes violations only occur below some threshold, which is what the
    scans show in practice.  The result is an empirical statement about one
    field on one grid, not a sharp constant.

    Returns
    -------
    dict
        ``q`` (``None`` when ``q_hi`` already has violations), the bracket
        ``[lo, hi]`` and the scanned ``(q, violation_count)`` pairs.
    """
    if not 0 < q_lo < q_hi <= 1:
        raise DomainError("need 0 < q_lo < q_hi <= 1")
    scanned = []

    def count(q):
        c = subharmonicity_scan(setup, F, q, tau).violation_count
        scanned.append([float(q), c])
        return c

    if count(q_hi):
        return {"q": None, "bracket": [q_lo, q_hi], "scanned": scanned}
    if not count(q_lo):
        return {"q": q_lo, "bracket": [q_lo, q_lo], "scanned": scanned}
    lo, hi = q_lo, q_hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if count(mid):
            lo = mid
        else:
            hi = mid
    return {"q": hi, "bracket": [lo, hi], "scanned": scanned}


@dataclass
class GradientMatrix:
    """Finite-difference Jacobian of one reflected system at one node.

    ``B[i, l] = d u^sigma_l / d x_i`` with ``x_0 = t``.  ``reflection[l, j]``
    is ``u^sigma_l(x) - u^sigma_l(sigma_j x)``.
    """

    sigma: tuple
    B: np.ndarray
    reflection: np.ndarray
    checks: dict


def _partials(comps, idx, steps):
    """Central partials of every component at node ``idx`` with step multiplier."""
    d = len(steps)
    out = np.empty((d, comps.shape[0]))
    for i in range(d):
        hi = list(idx)
        lo = list(idx)
        hi[i] += steps[i][1]
        lo[i] -= steps[i][1]
        out[i] = (comps[(slice(None),) + tuple(hi)] - comps[(slice(None),) + tuple(lo)]) / (2 * steps[i][0] * steps[i][1])
    return out


def _inequality_terms(B, refl, k, x):
    """``(tr^2, rhs368, asym, rhs369, trace identity residual)``."""
    n = len(k)
    ksum = float(sum(k))
    w = np.array([kj / xj ** 2 for kj, xj in zip(k, x)])
    tr = float(np.trace(B))
    rhs368 = ksum * float(sum(w[j] * refl[j + 1, j] ** 2 for j in range(n)))
    asym = float(sum((B[i, j] - B[j, i]) ** 2 for i in range(n + 1) for j in range(i + 1, n + 1)))
    rhs369 = 2 * ksum * float(np.sum(w[None, :] * refl ** 2))
    trace_pred = -sum(k[j] / x[j] * refl[j + 1, j] for j in range(n))
    return tr ** 2, rhs368, asym, rhs369, tr - trace_pred


def gradient_matrices(setup, F, point):
    """Jacobians ``B_sigma`` at a node and the two reflection inequalities.

    For every ``sigma`` the checks are

    * ``(tr B)^2 <= (sum k) sum_j (k_j / x_j^2) (u_j^sigma - u_j^sigma o sigma_j)^2``
    * ``sum_{i<l} (B_il - B_li)^2 <= 2 (sum k) sum_{l, j} (k_j / x_j^2) (u_l^sigma - u_l^sigma o sigma_j)^2``

    together with the identity ``tr B = -sum_j (k_j/x_j)(u_j^sigma - u_j^sigma o sigma_j)``.
    The tolerance of each check is twice the change of its left side
    between the step-``h`` Jacobian and its Richardson extrapolation with
    the step-``2h`` one.

    Parameters
    ----------
    setup : MultiplicitySetup
    F : OrbitField
    point : tuple of int
        Node index ``(it, i_1, ..., i_n)``; needs two nodes on every side
        and all ``x_j != 0``.

    Returns
    -------
    list of GradientMatrix
    """
    C = F.conjugate
    n = C.n
    point = tuple(int(p) for p in point)
    sizes = (C.t_grid.size,) + tuple(ax.size for ax in C.axes)
    if len(point) != n + 1 or any(p < 2 or p > s - 3 for p, s in zip(point, sizes)):
        raise GridError("gradient matrices need an interior node two steps from the boundary")
    x = [float(ax.nodes[p]) for ax, p in zip(C.axes, point[1:])]
    if any(v == 0 for v in x):
        raise DomainError("all spatial coordinates must be nonzero")
    steps = [C.t_step] + [ax.step for ax in C.axes]
    out = []
    k = tuple(setup.k)
    for s_idx, sigma in enumerate(F.signs):
        comps = F.components[s_idx]
        B1 = _partials(comps, point, [(h, 1) for h in steps])
        B2 = _partials(comps, point, [(h, 2) for h in steps])
        BR = (4 * B1 - B2) / 3
        refl = np.empty((n + 1, n))
        for j, ax in enumerate(C.axes):
            mirrored = list(point)
            mirrored[j + 1] = ax.size - 1 - point[j + 1]
            refl[:, j] = comps[(slice(None),) + point] - comps[(slice(None),) + tuple(mirrored)]
        a = _inequality_terms(B1, refl, k, x)
        b = _inequality_terms(BR, refl, k, x)
        tol = [2 * abs(p - r) + 1e-13 * max(abs(p), 1e-300) for p, r in zip(a, b)]
        checks = {
            "trace_sq": a[0], "trace_bound": a[1], "trace_ok": a[0] <= a[1] + tol[0],
            "asym": a[2], "asym_bound": a[3], "asym_ok": a[2] <= a[3] + tol[2],
            "trace_identity_residual": a[4], "trace_identity_ok": abs(a[4]) <= tol[4] + 1e-12,
            "tol_trace": tol[0], "tol_asym": tol[2],
        }
        out.append(GradientMatrix(sigma.signs, B1, refl, checks))
    return out


@dataclass
class QBound:
    """Exponent admitted by the subharmonicity argument for one setup."""

    q: float
    eps: float
    delta: float
    k_sum: float
    admissible: bool
    classical: bool
    details: dict = field(default_factory=dict)

    def to_dict(self):
        return {"q": self.q, "eps": self.eps, "delta": self.delta, "k_sum": self.k_sum,
                "admissible": self.admissible, "classical": self.classical, **self.details}


def admissible_q_bound(setup, budget=None, seed=0):
    """Exponent ``q = 2 - 1/(1 - delta)`` with ``delta = delta(eps)`` at ``eps = 1/(12 sum k)``.

    The reflection terms are absorbed once ``3 eps sum k <= 1/4``, and the
    remaining inequality holds for ``1 - delta <= 1/(2 - q)``.  With all
    multiplicities zero there are no reflection terms; the classical
    exponent ``(n - 1)/n`` for conjugate gradient systems in ``n + 1``
    variables is returned instead, flagged ``classical``.

    Returns
    -------
    QBound
        ``admissible`` is ``0 < q < 1``, which needs ``delta < 1/2``.
    """
    n = setup.n
    ksum = float(setup.k_sum)
    if ksum == 0:
        q = (n - 1) / n
        return QBound(q, math.inf, math.nan, 0.0, 0 < q < 1, True,
                      {"note": "no reflection terms; any q >= (n-1)/n works"})
    eps = 1.0 / (12.0 * ksum)
    res = delta_search(n, eps, budget or SearchBudget(), seed)
    delta = res.delta
    if not 0 < delta < 1:
        raise DomainError(f"delta search returned {delta}")
    q = 2.0 - 1.0 / (1.0 - delta)
    return QBound(q, eps, delta, ksum, 0 < q < 1, False,
                  {"worst_phi": res.worst_phi, "checked": res.checked})


# name used by external callers
paper_q_bound = admissible_q_bound
