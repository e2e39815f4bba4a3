"""Operator norm against Hilbert-Schmidt norm with trace and antisymmetry terms.

For a real square matrix ``B`` of size ``d = n + 1`` the margin

    (1 - delta) ||B||_HS^2 + eps ((tr B)^2 + sum_{i<j} (b_ij - b_ji)^2) - ||B||^2

is nonnegative for every ``B`` exactly when ``delta <= phi(B)`` for all
``B``, where

    phi(B) = (||B||_HS^2 + eps (tr^2 + asym) - ||B||^2) / ||B||_HS^2

is invariant under scaling.  The search below estimates ``inf phi``.
Two families bound it from above: a rank-one ``u v^T`` with ``u`` orthogonal
to ``v`` gives ``phi = eps`` and a symmetric trace-free matrix with
eigenvalues ``(n, -1, ..., -1)`` gives ``phi = 1/(n+1)``.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .errors import DomainError

__all__ = [
    "MatrixSample",
    "SearchBudget",
    "DeltaResult",
    "matrix_functionals",
    "lemma_margin",
    "margin_batch",
    "phi_batch",
    "family_caps",
    "antisymmetric_family",
    "symmetric_tracefree_family",
    "rank_one_family",
    "delta_search",
    "verify_delta",
    "homogeneity_check",
]


@dataclass(frozen=True)
class MatrixSample:
    """A square matrix with the four functionals entering the margin."""

    entries: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.entries, float)
        if b.ndim != 2 or b.shape[0] != b.shape[1] or b.shape[0] < 2:
            raise DomainError("need a square matrix of size >= 2")
        object.__setattr__(self, "entries", b)

    @property
    def op_norm(self):
        return float(np.linalg.svd(self.entries, compute_uv=False)[0])

    @property
    def hs_norm(self):
        return _scaled_norm(self.entries)

    @property
    def trace(self):
        return float(np.trace(self.entries))

    @property
    def antisym_defect(self):
        d = self.entries - self.entries.T
        return float(0.5 * np.sum(d ** 2))

    @property
    def sym_hs(self):
        return _scaled_norm(0.5 * (self.entries + self.entries.T))

    @property
    def antisym_hs(self):
        return _scaled_norm(0.5 * (self.entries - self.entries.T))


def _scaled_norm(a):
    """Frobenius norm without underflow for tiny entries."""
    top = float(np.max(np.abs(a)))
    if top == 0:
        return 0.0
    return top * float(np.sqrt(np.sum((a / top) ** 2)))


def matrix_functionals(B):
    """``(op_norm, hs_norm, trace, antisym_defect)`` of a square matrix."""
    s = MatrixSample(B)
    return s.op_norm, s.hs_norm, s.trace, s.antisym_defect


def _check_params(eps, delta=None):
    if not eps > 0:
        raise DomainError("eps must be positive")
    if delta is not None and not 0 <= delta < 1:
        raise DomainError("delta must lie in [0, 1)")


def lemma_margin(B, eps, delta):
    """The margin for one matrix; nonnegative when the inequality holds."""
    _check_params(eps, delta)
    op, hs, tr, asym = matrix_functionals(B)
    return (1 - delta) * hs ** 2 + eps * (tr ** 2 + asym) - op ** 2


def _parts(B):
    B = np.asarray(B, float)
    op = np.linalg.svd(B, compute_uv=False)[..., 0]
    hs2 = np.sum(B ** 2, axis=(-2, -1))
    tr = np.trace(B, axis1=-2, axis2=-1)
    asym = 0.5 * np.sum((B - np.swapaxes(B, -1, -2)) ** 2, axis=(-2, -1))
    return op, hs2, tr, asym


def margin_batch(B, eps, delta):
    """Margins for a stack of matrices of shape ``(M, d, d)``."""
    op, hs2, tr, asym = _parts(B)
    return (1 - delta) * hs2 + eps * (tr ** 2 + asym) - op ** 2


def phi_batch(B, eps):
    """Scale-free ratio ``phi``; the margin is ``(phi - delta) ||B||_HS^2``."""
    op, hs2, tr, asym = _parts(B)
    return (hs2 + eps * (tr ** 2 + asym) - op ** 2) / hs2


def antisymmetric_family(d, count, rng):
    a = rng.standard_normal((count, d, d))
    return a - np.swapaxes(a, -1, -2)


def symmetric_tracefree_family(d, count, rng):
    s = rng.standard_normal((count, d, d))
    s = s + np.swapaxes(s, -1, -2)
    return s - np.trace(s, axis1=-2, axis2=-1)[:, None, None] * np.eye(d) / d


def rank_one_family(d, count, rng):
    """``u v^T`` with ``u`` orthogonal to ``v``."""
    u = rng.standard_normal((count, d))
    v = rng.standard_normal((count, d))
    v -= (np.sum(u * v, axis=1) / np.sum(u * u, axis=1))[:, None] * u
    return u[:, :, None] * v[:, None, :]


def family_caps(n, eps):
    """Upper bounds on ``inf phi`` from the two extremal families."""
    return {"rank_one": eps, "symmetric_tracefree": 1.0 / (n + 1)}


@dataclass(frozen=True)
class SearchBudget:
    """Work allotted to :func:`delta_search`."""

    samples: int = 100_000
    ascent_starts: int = 8
    bisection_steps: int = 40
    chunk: int = 100_000

    def __post_init__(self):
        if self.samples <= 0 or self.ascent_starts < 0 or self.bisection_steps <= 0:
            raise DomainError("search budget must be positive")


@dataclass
class DeltaResult:
    n: int
    eps: float
    delta: float
    worst_phi: float
    worst_matrix: np.ndarray
    caps: dict
    checked: int
    details: dict = field(default_factory=dict)

    def to_dict(self):
        return {"n": self.n, "eps": self.eps, "delta": self.delta, "worst_phi": self.worst_phi,
                "worst_margin": float(lemma_margin(self.worst_matrix, self.eps, self.delta)),
                "worst_matrix": self.worst_matrix.tolist(), "caps": self.caps,
                "checked": self.checked, **self.details}


def _random_batch(d, count, rng):
    """Mixture of generic, A + S split, rank-one and extremal samples."""
    parts = []
    q = count // 5
    parts.append(rng.standard_normal((q, d, d)))
    # B = A + lambda S with ||S||_HS = 1 and a spread of relative sizes
    S = symmetric_tracefree_family(d, q, rng) + rng.standard_normal((q, 1, 1)) * np.eye(d) / d
    S /= np.linalg.norm(S, axis=(1, 2))[:, None, None]
    A = antisymmetric_family(d, q, rng)
    A /= np.linalg.norm(A, axis=(1, 2))[:, None, None]
    lam = np.exp(rng.uniform(-4, 4, q))[:, None, None]
    parts.append(A + lam * S)
    parts.append(rank_one_family(d, q, rng) + 0.05 * rng.standard_normal((q, d, d)))
    parts.append(symmetric_tracefree_family(d, q, rng))
    parts.append(antisymmetric_family(d, count - 4 * q, rng) + rank_one_family(d, count - 4 * q, rng))
    return np.concatenate(parts)


def _local_minimum(B0, eps):
    d = B0.shape[0]
    fun = lambda v: float(phi_batch(v.reshape(1, d, d), eps)[0])
    res = minimize(fun, B0.ravel() / np.linalg.norm(B0), method="BFGS", jac="3-point",
                   options={"gtol": 1e-12, "maxiter": 500})
    return res.x.reshape(d, d), float(res.fun)


def delta_search(n, eps, budget=None, seed=0):
    """Largest ``delta`` for which no counterexample is found.

    Candidates are random matrices (several structured families), local
    minimizers of ``phi`` started from the worst random samples, and the
    two extremal families.  ``delta`` is then bisected against the
    candidate set.  The result is an empirical upper estimate of the true
    optimum and, by construction, admissible for every candidate tried.

    Parameters
    ----------
    n : int
        Matrices are ``(n+1) x (n+1)``.
    eps : float
    budget : SearchBudget, optional
    seed : int

    Returns
    -------
    DeltaResult
    """
    if n < 1:
        raise DomainError("n must be a positive integer")
    _check_params(eps)
    budget = budget or SearchBudget()
    rng = np.random.default_rng(seed)
    d = n + 1
    pool_phi = []
    pool_mat = []
    done = 0
    while done < budget.samples:
        m = min(budget.chunk, budget.samples - done)
        B = _random_batch(d, m, rng)
        ph = phi_batch(B, eps)
        keep = np.argsort(ph)[: max(budget.ascent_starts, 1)]
        pool_phi.append(ph[keep])
        pool_mat.append(B[keep])
        done += m
    fam = np.concatenate([rank_one_family(d, 64, rng), symmetric_tracefree_family(d, 64, rng),
                          antisymmetric_family(d, 64, rng)])
    pool_phi.append(phi_batch(fam, eps))
    pool_mat.append(fam)
    phis = np.concatenate(pool_phi)
    mats = np.concatenate(pool_mat)
    order = np.argsort(phis)
    for i in order[: budget.ascent_starts]:
        Bm, ph = _local_minimum(mats[i], eps)
        mats = np.concatenate([mats, Bm[None]])
        phis = np.append(phis, ph)
    # bisection for the largest delta with every candidate margin >= 0
    lo, hi = 0.0, 1.0
    for _ in range(budget.bisection_steps):
        mid = 0.5 * (lo + hi)
        if np.all(margin_batch(mats, eps, mid) / np.sum(mats ** 2, axis=(1, 2)) >= 0):
            lo = mid
        else:
            hi = mid
    worst = int(np.argmin(phis))
    W = mats[worst] / np.linalg.norm(mats[worst])
    return DeltaResult(n, float(eps), lo, float(phis[worst]), W, family_caps(n, eps),
                       int(done + fam.shape[0] + budget.ascent_starts),
                       {"seed": seed, "samples": budget.samples, "ascent_starts": budget.ascent_starts})


def verify_delta(n, eps, delta, samples, seed=1, chunk=200_000):
    """Fresh random check; returns ``(min normalized margin, counterexamples)``.

    Margins are normalized by ``||B||_HS^2`` so the tolerance is scale free.
    """
    rng = np.random.default_rng(seed)
    d = n + 1
    worst = np.inf
    bad = 0
    done = 0
    while done < samples:
        m = min(chunk, samples - done)
        B = _random_batch(d, m, rng)
        mg = margin_batch(B, eps, delta) / np.sum(B ** 2, axis=(1, 2))
        worst = min(worst, float(mg.min()))
        bad += int(np.sum(mg < -1e-12))
        done += m
    return worst, bad


def homogeneity_check(B, t, eps, delta, rtol=1e-12):
    """``margin(tB) == t^2 margin(B)`` up to rounding."""
    if t == 0:
        raise DomainError("t must be nonzero")
    B = np.asarray(B, float)
    a = lemma_margin(t * B, eps, delta)
    b = t ** 2 * lemma_margin(B, eps, delta)
    scale = t ** 2 * np.sum(B ** 2)
    return bool(abs(a - b) <= rtol * max(scale, abs(b), 1e-300))
