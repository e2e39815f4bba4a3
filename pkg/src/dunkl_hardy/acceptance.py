"""The acceptance suite: twelve property and closed-form checks.

Every check is deterministic for a given seed.  Results carry only
numbers that are reproducible bit for bit (no timings), so two runs with
the same seed serialize to identical bytes.
"""

import hashlib
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.special import dawsn

from . import conjugate, geometry, hardy, kernels, matlemma, transform
from .dunkl import MultiplicitySetup, SampledField, dunkl_kernel_1d, dunkl_kernel_1d_integral, make_grid, sample_field

__all__ = ["CriterionResult", "CRITERIA", "run_criterion", "run_suite", "suite_report", "canonical_json",
           "delta_closed_form", "cr_refinement", "atom_orbit_field", "scan_case"]

REPORT_FORMAT = "acceptance-report-v1"


@dataclass
class CriterionResult:
    id: int
    name: str
    passed: bool
    metrics: dict = field(default_factory=dict)

    def to_dict(self):
        return {"id": self.id, "name": self.name, "passed": bool(self.passed), "metrics": _plain(self.metrics)}

    def line(self):
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.id:2d} {self.name}"


def _plain(obj):
    """Convert numpy scalars and containers to plain JSON types."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else repr(v)
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    return obj


def canonical_json(obj):
    return json.dumps(_plain(obj), sort_keys=True, indent=2) + "\n"


def delta_closed_form(n, eps):
    """Smallest root of ``d^2 - (1 + (n+1) eps) d + eps = 0``.

    Matches ``inf phi`` found by :func:`matlemma.delta_search` in every
    tested case; used as a cross-check only.
    """
    b = 1 + (n + 1) * eps
    return (b - math.sqrt(b * b - 4 * eps)) / 2


# 1 ---------------------------------------------------------------------------

def kernel_identities(seed):
    rng = np.random.default_rng(seed)
    ks = rng.uniform(0, 3, 30)
    xs = rng.uniform(-10, 10, 30)
    unit = max(abs(dunkl_kernel_1d(float(k), float(x), 0.0) - 1.0) for k, x in zip(ks, xs))
    grid = np.linspace(-5, 5, 11)
    rel = {}
    for k in (0.3, 1.0, 2.5):
        worst = 0.0
        for x in grid:
            for y in grid:
                a = dunkl_kernel_1d(k, float(x), float(y))
                b = dunkl_kernel_1d_integral(k, float(x), float(y))
                worst = max(worst, abs(a - b) / abs(b))
        rel[str(k)] = worst
    ok = unit < 1e-10 and max(rel.values()) < 1e-8
    return ok, {"max_abs_E_at_zero_minus_1": unit, "max_rel_two_representations": rel}


# 2 ---------------------------------------------------------------------------

def classical_reductions(seed):
    rng = np.random.default_rng(seed)
    s0 = MultiplicitySetup((0.0,))
    t = np.exp(rng.uniform(np.log(0.05), np.log(20), 200))
    x = rng.uniform(-5, 5, 200)
    y = rng.uniform(-5, 5, 200)
    gw = np.exp(-(x - y) ** 2 / (4 * t)) / np.sqrt(4 * np.pi * t)
    heat = np.array([kernels.heat_kernel(s0, float(a), float(b), float(c)) for a, b, c in zip(t, x, y)])
    heat_err = float(np.max(np.abs(heat - gw) / gw))
    cauchy = t / (np.pi * (t ** 2 + (x - y) ** 2))
    pois = np.array([kernels.poisson_kernel(s0, float(a), float(b), float(c)) for a, b, c in zip(t, x, y)])
    pois_err = float(np.max(np.abs(pois - cauchy) / cauchy))
    f = sample_field(s0, lambda u: np.exp(-u ** 2), 12.0, 0.05)
    r = transform.riesz_transform(s0, f, 0)
    oracle = -2 / math.sqrt(math.pi) * dawsn(f.axes[0].nodes)
    riesz_err = float(np.max(np.abs(r.values - oracle)) / np.max(np.abs(oracle)))
    ok = max(heat_err, pois_err, riesz_err) <= 1e-4
    return ok, {"heat_rel": heat_err, "poisson_rel": pois_err, "riesz_rel": riesz_err}


# 3 ---------------------------------------------------------------------------

def mass_and_semigroup(seed):
    heat_dev = 0.0
    pois_dev = 0.0
    ck = 0.0
    for k in (0.5, 1.0):
        s = MultiplicitySetup((k,))
        axes = make_grid(s, 40.0, 0.05)
        for t in (0.1, 1.0, 5.0):
            for x in (0.0, 0.7, -2.0):
                heat_dev = max(heat_dev, abs(kernels.heat_mass(s, t, [x], axes) - 1))
        for t in (0.5, 2.0):
            for x in (0.0, 1.3, -3.0):
                pois_dev = max(pois_dev, abs(kernels.poisson_mass(s, t, x) - 1))
        ax = axes[0]
        for x, y in ((0.3, 0.9), (-1.2, 0.4), (2.0, -2.5), (0.0, 1.0)):
            ck = max(ck, kernels.chapman_kolmogorov(k, 0.5, 0.5, x, y, ax))
    ok = heat_dev <= 1e-6 and pois_dev <= 1e-4 and ck <= 1e-4
    return ok, {"heat_mass_dev": heat_dev, "poisson_mass_dev": pois_dev, "chapman_kolmogorov_rel": ck}


# 4 ---------------------------------------------------------------------------

def transform_checks(seed):
    out = {}
    ok = True
    for k, ext, h in (((1.0,), 10.0, 0.05), ((0.5, 1.0), 8.0, 0.1)):
        s = MultiplicitySetup(k)
        f = sample_field(s, lambda *x: (1 + x[0] + sum(c ** 2 for c in x)) * np.exp(-sum(c ** 2 for c in x)), ext, h)
        pl = abs(transform.plancherel_ratio(s, f) - 1)
        back = transform.inverse_transform(transform.dunkl_transform(s, f))
        rt = float(np.max(np.abs(back.values - f.values)) / np.max(np.abs(f.values)))
        g = sample_field(s, lambda *x: np.exp(-0.5 * sum(c ** 2 for c in x)), ext, h)
        G = transform.dunkl_transform(s, g)
        xi = G.mesh()
        fp = float(np.max(np.abs(G.values - np.exp(-0.5 * sum(c ** 2 for c in xi)))))
        key = "n%d" % s.n
        out[key] = {"k": list(k), "plancherel_dev": pl, "roundtrip_rel": rt, "gaussian_fixed_point": fp}
        ok = ok and pl <= 1e-4 and rt <= 1e-4 and fp <= 1e-6
    return ok, out


# 5 ---------------------------------------------------------------------------

def cr_refinement(setup, extent, steps, center, window, t_range):
    atom_axes = make_grid(setup, extent, steps[0])
    freq = transform.frequency_axes(atom_axes)
    res = []
    for h in steps:
        axes = make_grid(setup, extent, h)
        a = hardy.make_atom(setup, center, 1.0, "odd", axes=axes)
        C = conjugate.build_conjugate_system(setup, a.field, conjugate.uniform_t_grid(0.1, 1.5, h), freq)
        res.append(conjugate.cr_residuals(setup, C, window, t_range).residuals)
    factors = {}
    for fam in conjugate.CR_FAMILIES:
        if res[0][fam] == 0:
            continue
        factors[fam] = [res[i][fam] / res[i + 1][fam] for i in range(len(res) - 1)]
    return res, factors


def cr_convergence(seed):
    steps = (0.1, 0.05, 0.025)
    s1 = MultiplicitySetup((1.0,))
    r1, f1 = cr_refinement(s1, 8.0, steps, (0.3,), 2.0, (0.3, 1.0))
    s2 = MultiplicitySetup((1.0, 1.0))
    r2, f2 = cr_refinement(s2, 5.0, steps, (0.3, -0.2), 2.0, (0.3, 1.0))
    inside = lambda fs: all(3.5 <= v <= 4.5 for vals in fs.values() for v in vals)
    ok = inside(f1) and inside(f2) and set(f1) == {"gradient", "divergence"} and "curl" in f2
    return ok, {"n1_k1": {"residuals": r1, "factors": f1},
                "n2_k1_1": {"residuals": r2, "factors": f2}, "steps": list(steps)}


# 6 ---------------------------------------------------------------------------

def lemma_checks(seed, samples=1_000_000):
    rows = []
    ok = True
    for n in (1, 2, 3):
        d = n + 1
        for eps in (0.05, 0.1, 0.2):
            res = matlemma.delta_search(n, eps, seed=seed)
            worst, bad = matlemma.verify_delta(n, eps, res.delta, samples, seed=seed + 1)
            rng = np.random.default_rng(seed + 2)
            A = matlemma.antisymmetric_family(d, 1000, rng)
            anti = float(np.min(matlemma.margin_batch(A, eps, 2 * eps) / np.sum(A ** 2, axis=(1, 2))))
            D = np.zeros((d, d))
            D[0, 0], D[1, 1] = 1.0, -1.0
            tight = float(matlemma.lemma_margin(D, eps, 0.5))
            cap = min(res.caps.values())
            R = matlemma.rank_one_family(d, 1000, rng)
            past = int(np.sum(matlemma.margin_batch(R, eps, cap + 0.05) < 0))
            closed = delta_closed_form(n, eps)
            row_ok = res.delta > 0 and bad == 0 and anti >= -1e-12 and abs(tight) <= 1e-12 and past > 0
            ok = ok and row_ok
            rows.append({"n": n, "eps": eps, "delta": res.delta, "closed_form": closed,
                         "min_normalized_margin": worst, "counterexamples": bad, "samples": samples,
                         "antisym_margin_at_2eps": anti, "diag_margin_at_half": tight,
                         "cap": cap, "counterexamples_past_cap": past, "passed": row_ok})
    return ok, {"cases": rows}


# 7 ---------------------------------------------------------------------------

def atom_orbit_field(setup, extent, step, center, t_max=2.1):
    """Orbit field of the conjugate system of an odd unit-radius atom."""
    axes = make_grid(setup, extent, step)
    a = hardy.make_atom(setup, center, 1.0, "odd", axes=axes)
    C = conjugate.build_conjugate_system(setup, a.field, conjugate.uniform_t_grid(0.1, t_max, step))
    return conjugate.build_orbit_field(setup, C)


def scan_case(n, k, seed):
    setup = MultiplicitySetup((k,) * n)
    qb = conjugate.admissible_q_bound(setup, seed=seed)
    if n == 1:
        F = atom_orbit_field(setup, 8.0, 0.05, (0.3,))
    else:
        F = atom_orbit_field(setup, 5.0, 0.05, (0.3, -0.2))
    at_bound = conjugate.subharmonicity_scan(setup, F, qb.q)
    small = conjugate.subharmonicity_scan(setup, F, 0.05)
    return {"n": n, "k": k, "q_bound": qb.q, "delta": qb.delta, "eps": qb.eps,
            "at_bound": at_bound.to_dict(), "at_0.05": small.to_dict()}


def subharmonicity(seed):
    cases = [scan_case(n, k, seed) for n in (1, 2) for k in (0.5, 1.0)]
    ok = all(c["at_bound"]["violation_count"] == 0 and c["at_bound"]["checked"] > 0
             and c["at_0.05"]["violation_count"] > 0 for c in cases)
    return ok, {"cases": cases}


# 8 ---------------------------------------------------------------------------

def heat_regimes(seed):
    out = {}
    ok = True
    for k in (0.5, 1.0):
        rng = np.random.default_rng(seed)
        reps = kernels.check_heat_regimes(k, kernels.heat_regime_samples(10_000, rng))
        out[str(k)] = [r.to_dict() | {"spread": r.spread} for r in reps]
        ok = ok and all(r.min_ratio > 0 and math.isfinite(r.max_ratio) and math.isfinite(r.spread) for r in reps)
    return ok, out


# 9 ---------------------------------------------------------------------------

def geometry_checks(seed):
    rng = np.random.default_rng(seed)
    s2 = MultiplicitySetup((0.5, 1.0))
    m = 10_000
    X = rng.uniform(-5, 5, (m, 2))
    r = np.exp(rng.uniform(np.log(0.01), np.log(5), m))
    R = r * np.exp(rng.uniform(0, np.log(50), m))
    ratio = geometry.mu_ball_batch(s2.k, X, R) / geometry.mu_ball_batch(s2.k, X, r)
    c1 = float(np.min(ratio / (R / r) ** s2.n))
    c2 = float(np.max(ratio / (R / r) ** s2.N))
    s0 = MultiplicitySetup((0.0,))
    xs = rng.uniform(-5, 5, 50)
    ys = rng.uniform(-5, 5, 50)
    k0 = float(np.max(np.abs(geometry.quasi_distance_batch(s0, xs[:, None], ys[:, None]) - np.abs(xs - ys))))
    s1 = MultiplicitySetup((1.0,))
    two_thirds = abs(geometry.quasi_distance(s1, -1.0, 1.0) - 2.0 / 3.0)
    tri = {}
    for setup, count in ((s1, 10_000), (s2, 10_000)):
        P = rng.uniform(-3, 3, (3, count, setup.n))
        dxz = geometry.quasi_distance_batch(setup, P[0], P[2])
        dxy = geometry.quasi_distance_batch(setup, P[0], P[1])
        dyz = geometry.quasi_distance_batch(setup, P[1], P[2])
        tri["n%d" % setup.n] = float(np.max(dxz / (dxy + dyz)))
    ok = c1 > 0 and math.isfinite(c2) and c2 > 0 and k0 <= 1e-8 and two_thirds <= 1e-8 and all(
        math.isfinite(v) for v in tri.values())
    return ok, {"doubling_c1_min": c1, "doubling_c2_max": c2, "samples": m, "k0_closed_form_dev": k0,
                "n1_k1_two_thirds_dev": two_thirds, "quasi_triangle_A": tri}


# 10 --------------------------------------------------------------------------

def hardy_characterization(seed):
    setup = MultiplicitySetup((1.0,))
    axes = make_grid(setup, 30.0, 0.05)
    rng = np.random.default_rng(seed)
    atoms = hardy.random_atoms(setup, 50, rng, axes)
    control = SampledField(axes, np.where(np.abs(axes[0].nodes) < 1, (1 - axes[0].nodes ** 2) ** 8, 0.0))
    reps = hardy.h1_family(setup, [a.field for a in atoms] + [control])
    ratios = np.array([r.characterization_ratio for r in reps[:-1]])
    good = bool(np.all(np.isfinite(ratios)) and np.all(ratios > 0))
    spread = float(ratios.max() / ratios.min())
    ctrl = reps[-1]
    ok = good and spread < 100 and ctrl.flagged and not any(r.flagged for r in reps[:-1])
    return ok, {"atoms": len(atoms), "ratio_min": float(ratios.min()), "ratio_max": float(ratios.max()),
                "spread": spread, "max_t_refinement_delta": max(r.t_refinement_delta for r in reps[:-1]),
                "max_box_growth": max(r.box_growth for r in reps[:-1]),
                "max_sup_bound": max(a.sup_bound for a in atoms),
                "max_abs_mean": max(abs(a.mean) for a in atoms), "control": ctrl.to_dict()}


# 11 --------------------------------------------------------------------------

def bessel_bridge(seed):
    out = {}
    ok = True
    for k, ext, h in (((1.0,), 8.0, 0.05), ((1.0, 0.5), 6.0, 0.1)):
        setup = MultiplicitySetup(k)
        axes = make_grid(setup, ext, h, stagger=True)
        pos = [ax.nodes[ax.nodes > 0] for ax in axes]
        X = np.meshgrid(*pos, indexing="ij")
        vals = np.exp(-sum(c ** 2 for c in X)) * (1 + X[0] ** 2)
        rep = hardy.fold_identities(setup, axes, vals, t=0.5, nodes=100, rng=np.random.default_rng(seed))
        out["n%d" % setup.n] = rep.to_dict()
        ok = ok and rep.semigroup_deviation <= 1e-8 and rep.riesz_deviation <= 1e-6
    return ok, out


CRITERIA = (
    (1, "kernel identities", kernel_identities),
    (2, "classical reductions (k = 0)", classical_reductions),
    (3, "mass and semigroup", mass_and_semigroup),
    (4, "transform: Plancherel, inversion, Gaussian fixed point", transform_checks),
    (5, "Cauchy-Riemann residuals decay O(h^2)", cr_convergence),
    (6, "operator-norm lemma", lemma_checks),
    (7, "subharmonicity of |F|^q", subharmonicity),
    (8, "heat-kernel regime comparability", heat_regimes),
    (9, "geometry: doubling, quasi-distance, quasi-triangle", geometry_checks),
    (10, "Hardy characterization ratio", hardy_characterization),
    (11, "Bessel folding identities", bessel_bridge),
)


def run_criterion(cid, seed=0):
    for i, name, fn in CRITERIA:
        if i == cid:
            ok, metrics = fn(seed)
            return CriterionResult(i, name, bool(ok), metrics)
    raise KeyError(f"no criterion {cid}")


def run_suite(seed=0, only=None, workers=1):
    """Run criteria 1-11 (or the ids in ``only``); order of results is fixed."""
    ids = [i for i, _, _ in CRITERIA if only is None or i in only]
    if workers <= 1:
        return [run_criterion(i, seed) for i in ids]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda i: run_criterion(i, seed), ids))


def suite_report(results, seed, fingerprint=None):
    """Canonical report dictionary for a list of results."""
    body = {"format": REPORT_FORMAT, "seed": seed, "criteria": [r.to_dict() for r in results],
            "all_passed": all(r.passed for r in results)}
    if fingerprint:
        body["config_fingerprint"] = fingerprint
    body["digest"] = hashlib.sha256(canonical_json(body["criteria"]).encode()).hexdigest()
    return body
