"""Command-line entry point: kernels, transforms and the verification suites.

Every subcommand reads an optional ``runconfig-v1`` JSON file and applies
flag overrides on top.  Structured reports are JSON, tabular output is
CSV; both carry a SHA-256 fingerprint of the resolved configuration.

Exit codes: 0 when every assertion of the subcommand holds, 1 when one
fails (a JSON failure report goes to stderr), 2 on a configuration error.
"""

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, field

import numpy as np

from . import acceptance, conjugate, hardy, kernels, matlemma, transform
from .dunkl import MultiplicitySetup, SampledField, dunkl_kernel, load_field, make_grid, save_field
from .errors import ConvergenceError, DomainError, GridError

__all__ = ["RunConfig", "ConfigError", "build_parser", "main", "worker_count"]

CONFIG_FORMAT = "runconfig-v1"
EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


class ConfigError(ValueError):
    """The run configuration is malformed or outside its domain."""


class AssertionFailure(Exception):
    def __init__(self, failures, report):
        super().__init__("; ".join(failures))
        self.failures = failures
        self.report = report


@dataclass
class RunConfig:
    """Resolved configuration of one CLI run (schema ``runconfig-v1``).

    Grid fields left as ``None`` take subcommand-specific defaults.  The
    output path is not part of the fingerprint, so the same run written to
    two places yields identical bytes.
    """

    k: list = field(default_factory=lambda: [1.0])
    n: int | None = None
    extent: float | None = None
    step: float | None = None
    nodes: int | None = None
    stagger: bool = False
    t_min: float | None = None
    t_max: float | None = None
    t_step: float | None = None
    seed: int = 0
    out: str | None = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        ks = self.k if isinstance(self.k, (list, tuple)) else [self.k]
        try:
            ks = [float(v) for v in ks]
        except (TypeError, ValueError):
            raise ConfigError(f"multiplicities must be numbers, got {self.k!r}")
        if not ks:
            raise ConfigError("need at least one multiplicity")
        if any(not math.isfinite(v) or v < 0 for v in ks):
            raise ConfigError(f"multiplicities must be finite and >= 0, got {ks}")
        if self.n is not None:
            if int(self.n) < 1:
                raise ConfigError("n must be positive")
            if len(ks) == 1:
                ks = ks * int(self.n)
            elif len(ks) != int(self.n):
                raise ConfigError(f"n = {self.n} but {len(ks)} multiplicities given")
            self.n = int(self.n)
        self.k = ks
        for name in ("extent", "step", "t_min", "t_max", "t_step"):
            v = getattr(self, name)
            if v is not None and not (math.isfinite(float(v)) and float(v) > 0):
                raise ConfigError(f"{name} must be positive")
        if self.nodes is not None and int(self.nodes) < 3:
            raise ConfigError("nodes must be >= 3")

    @classmethod
    def from_sources(cls, path=None, overrides=None):
        data = {}
        if path:
            try:
                with open(path) as fh:
                    data = json.load(fh)
            except (OSError, json.JSONDecodeError) as exc:
                raise ConfigError(f"cannot read config {path}: {exc}")
            if not isinstance(data, dict):
                raise ConfigError("config must be a JSON object")
            fmt = data.pop("format", CONFIG_FORMAT)
            if fmt != CONFIG_FORMAT:
                raise ConfigError(f"unknown config format {fmt!r}")
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        for key, v in (overrides or {}).items():
            if v is None:
                continue
            if key == "params":
                data["params"] = {**data.get("params", {}), **v}
            else:
                data[key] = v
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc))

    @property
    def setup(self):
        return MultiplicitySetup(tuple(self.k))

    def grid(self, extent, step, stagger=None):
        """Axes with config values taking precedence over the defaults."""
        ext = float(self.extent or extent)
        h = float(self.step or step)
        if self.nodes is not None:
            h = 2 * ext / (int(self.nodes) - 1)
        return make_grid(self.setup, ext, h, self.stagger if stagger is None else stagger)

    def to_dict(self):
        d = asdict(self)
        d.pop("out")
        return {"format": CONFIG_FORMAT, **d}

    def fingerprint(self, command):
        blob = json.dumps({"command": command, **self.to_dict()}, sort_keys=True)
        return hashlib.sha256(blob.encode()).hexdigest()


def worker_count():
    """Worker threads: the CPU count, capped by ``DUNKL_THREADS`` when set."""
    n = os.cpu_count() or 1
    cap = os.environ.get("DUNKL_THREADS")
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError:
            raise ConfigError(f"DUNKL_THREADS must be an integer, got {cap!r}")
    return n


def _floats(text, what):
    try:
        return [float(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"cannot parse {what}: {text!r}")


def _emit(text, path):
    if path:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _finish(cfg, command, report, failures):
    report = {"command": command, "config_fingerprint": cfg.fingerprint(command), **report,
              "passed": not failures, "failures": failures}
    _emit(acceptance.canonical_json(report), cfg.out)
    if failures:
        raise AssertionFailure(failures, report)
    return EXIT_OK


# kernel ----------------------------------------------------------------------

def _classical_heat(t, x, y):
    n = x.shape[-1]
    return (4 * np.pi * t) ** (-n / 2) * np.exp(-np.sum((x - y) ** 2, axis=-1) / (4 * t))


def _classical_poisson(t, x, y):
    n = x.shape[-1]
    c = math.gamma((n + 1) / 2) / math.pi ** ((n + 1) / 2)
    return c * t / (t ** 2 + np.sum((x - y) ** 2, axis=-1)) ** ((n + 1) / 2)


def _kernel_rows(cfg, kind, ts, xs, ys):
    setup = cfg.setup
    vals, comp = [], []
    for t, x, y in zip(ts, xs, ys):
        if kind == "heat":
            v = kernels.heat_kernel(setup, t, x, y)
            c = _classical_heat(t, x, y)
        elif kind == "poisson":
            v = kernels.poisson_kernel(setup, t, x, y)
            c = _classical_poisson(t, x, y)
        elif kind == "dunkl":
            v = dunkl_kernel(setup, x, y)
            c = math.exp(float(np.dot(x, y)))
        else:
            v = kernels.bessel_heat_kernel(setup, t, x, y)
            # the Bessel kernel is the Dunkl kernel summed over the orbit of y
            c = sum(kernels.heat_kernel(setup, t, x, y * np.asarray(s)) for s in _signs(setup.n))
        vals.append(float(v))
        comp.append(float(c))
    return vals, comp


def _signs(n):
    return [tuple(1 - 2 * ((i >> j) & 1) for j in range(n)) for i in range(2 ** n)]


def cmd_kernel(cfg, args):
    n = len(cfg.k)
    ts = [float(v) for v in (args.t or [1.0])]
    xs = [np.array(_floats(v, "--x")) for v in (args.x or ["0" + ",0" * (n - 1)])]
    ys = [np.array(_floats(v, "--y")) for v in (args.y or ["0" + ",0" * (n - 1)])]
    m = max(len(ts), len(xs), len(ys))
    for name, seq in (("--t", ts), ("--x", xs), ("--y", ys)):
        if len(seq) not in (1, m):
            raise ConfigError(f"{name} given {len(seq)} times; expected 1 or {m}")
    ts, xs, ys = (seq * m if len(seq) == 1 else seq for seq in (ts, xs, ys))
    if any(v.size != n for v in xs + ys):
        raise ConfigError(f"points need {n} comma-separated coordinates")
    if args.type != "dunkl" and any(t <= 0 for t in ts):
        raise ConfigError("t must be positive")
    vals, comp = _kernel_rows(cfg, args.type, ts, xs, ys)
    if args.value_only:
        _emit("".join(f"{v!r}\n" for v in vals), cfg.out)
    else:
        buf = io.StringIO()
        buf.write(f"# config_fingerprint={cfg.fingerprint('kernel')} type={args.type}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t"] + [f"x{j + 1}" for j in range(n)] + [f"y{j + 1}" for j in range(n)]
                   + ["kernel", "comparand", "ratio"])
        for t, x, y, v, c in zip(ts, xs, ys, vals, comp):
            ratio = v / c if c != 0 else math.nan
            w.writerow([repr(t)] + [repr(float(a)) for a in x] + [repr(float(b)) for b in y]
                       + [repr(v), repr(c), repr(ratio)])
        _emit(buf.getvalue(), cfg.out)
    bad = [i for i, v in enumerate(vals) if not math.isfinite(v) or (args.type != "dunkl" and v < 0)]
    if bad:
        raise AssertionFailure([f"kernel value not finite and nonnegative at rows {bad}"],
                               {"command": "kernel", "rows": bad})
    return EXIT_OK


# transform / riesz -----------------------------------------------------------

def _test_field(axes):
    coords = np.meshgrid(*[ax.nodes for ax in axes], indexing="ij")
    r2 = sum(c ** 2 for c in coords)
    return (1 + coords[0] + r2) * np.exp(-r2)


def cmd_transform(cfg, args):
    if args.field:
        f = load_field(args.field)
        setup = MultiplicitySetup(tuple(ax.k for ax in f.axes))
    else:
        setup = cfg.setup
        axes = cfg.grid(10.0 if setup.n == 1 else 8.0, 0.05 if setup.n == 1 else 0.1)
        f = SampledField(axes, _test_field(axes))
    F = transform.dunkl_transform(setup, f)
    pl = transform.plancherel_ratio(setup, f)
    back = transform.inverse_transform(F)
    rt = float(np.max(np.abs(back.values - f.values)) / np.max(np.abs(f.values)))
    g = f.with_values(np.exp(-0.5 * sum(c ** 2 for c in f.mesh())))
    G = transform.dunkl_transform(setup, g)
    fp = float(np.max(np.abs(G.values - np.exp(-0.5 * sum(c ** 2 for c in G.mesh())))))
    failures = []
    if abs(pl - 1) > args.tol:
        failures.append(f"Plancherel ratio {pl!r} off by more than {args.tol}")
    if rt > args.tol:
        failures.append(f"round-trip error {rt!r} above {args.tol}")
    if fp > args.fixed_tol:
        failures.append(f"Gaussian fixed-point error {fp!r} above {args.fixed_tol}")
    return _finish(cfg, "transform", {"k": list(setup.k), "plancherel_ratio": pl, "roundtrip_rel": rt,
                                      "gaussian_fixed_point": fp, "grid": [ax.to_dict() for ax in f.axes]
                                      if args.full else [ax.size for ax in f.axes]}, failures)


def cmd_riesz(cfg, args):
    f = load_field(args.field)
    setup = MultiplicitySetup(tuple(ax.k for ax in f.axes))
    j = args.j - 1
    if not 0 <= j < setup.n:
        raise ConfigError(f"--j must lie in 1..{setup.n}")
    r = transform.riesz_transform(setup, f, j)
    failures = []
    if not np.all(np.isfinite(r.values)):
        failures.append("non-finite Riesz transform values")
    if args.result:
        save_field(args.result, r)
    return _finish(cfg, "riesz", {"j": args.j, "k": list(setup.k), "l2_input": float(f.lp_norm(2)),
                                  "l2_output": float(r.lp_norm(2)), "sup_output": float(np.max(np.abs(r.values))),
                                  "result": args.result}, failures)


# verification suites ---------------------------------------------------------

def _default_center(n):
    return tuple(0.3 if j % 2 == 0 else -0.2 for j in range(n))


def cmd_verify_cr(cfg, args):
    setup = cfg.setup
    h = float(cfg.step or 0.1)
    steps = (h, h / 2, h / 4)
    extent = float(cfg.extent or (8.0 if setup.n == 1 else 5.0))
    res, factors = acceptance.cr_refinement(setup, extent, steps, _default_center(setup.n), args.window,
                                            (args.t_lo, args.t_hi))
    lo, hi = args.band
    failures = [f"{fam} refinement factor {v!r} outside [{lo}, {hi}]"
                for fam, vals in factors.items() for v in vals if not lo <= v <= hi]
    if not factors:
        failures.append("no residual family is active")
    return _finish(cfg, "verify-cr", {"k": list(setup.k), "steps": list(steps), "residuals": res,
                                      "factors": factors}, failures)


def cmd_verify_lemma(cfg, args):
    n = args.dim if args.dim is not None else len(cfg.k)
    if n < 1 or not args.eps > 0 or args.samples < 1:
        raise ConfigError("need n >= 1, eps > 0 and samples >= 1")
    res = matlemma.delta_search(n, args.eps, seed=cfg.seed)
    worst, bad = matlemma.verify_delta(n, args.eps, res.delta, args.samples, seed=cfg.seed + 1)
    failures = []
    if not res.delta > 0:
        failures.append("delta search returned a nonpositive value")
    if bad:
        failures.append(f"{bad} counterexamples among {args.samples} fresh samples")
    return _finish(cfg, "verify-lemma", {
        "n": n, "eps": args.eps, "delta": res.delta, "closed_form": acceptance.delta_closed_form(n, args.eps),
        "worst_margin": float(matlemma.lemma_margin(res.worst_matrix, args.eps, res.delta)),
        "worst_matrix": res.worst_matrix.tolist(), "caps": res.caps, "samples": args.samples,
        "min_normalized_margin": worst, "counterexamples": bad}, failures)


def cmd_subharmonic_scan(cfg, args):
    setup = cfg.setup
    qb = conjugate.admissible_q_bound(setup, seed=cfg.seed)
    q = qb.q if args.q is None else args.q
    if not 0 < q <= 1:
        raise ConfigError("q must lie in (0, 1]")
    F = acceptance.atom_orbit_field(setup, float(cfg.extent or (8.0 if setup.n == 1 else 5.0)),
                                    float(cfg.step or 0.05), _default_center(setup.n), float(cfg.t_max or 2.1))
    rep = conjugate.subharmonicity_scan(setup, F, q)
    failures = []
    if args.expect == "none" and rep.violation_count:
        failures.append(f"{rep.violation_count} violations at q = {q!r}")
    if args.expect == "violations" and not rep.violation_count:
        failures.append(f"no violations at q = {q!r}")
    if rep.checked == 0:
        failures.append("no nodes were checked")
    report = {"q_bound": qb.to_dict(), "scan": rep.to_dict()}
    if args.threshold:
        report["threshold"] = conjugate.smallest_violation_free_q(setup, F)
    return _finish(cfg, "subharmonic-scan", report, failures)


def cmd_hardy_ratio(cfg, args):
    setup = cfg.setup
    axes = cfg.grid(30.0, 0.05, stagger=False)
    rng = np.random.default_rng(cfg.seed)
    atoms = hardy.random_atoms(setup, args.atoms, rng, axes)
    reps = hardy.h1_family(setup, [a.field for a in atoms])
    buf = io.StringIO()
    buf.write(f"# config_fingerprint={cfg.fingerprint('hardy-ratio')}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["atom_id", "center", "radius", "l1", "riesz_l1_sum", "maximal_l1", "ratio"])
    for i, (a, r) in enumerate(zip(atoms, reps)):
        w.writerow([i, ";".join(repr(float(c)) for c in a.center), repr(float(a.radius)), repr(r.l1_norm),
                    repr(float(sum(r.riesz_l1))), repr(r.maximal_heat_l1), repr(r.characterization_ratio)])
    _emit(buf.getvalue(), cfg.out)
    ratios = np.array([r.characterization_ratio for r in reps])
    failures = []
    if not np.all(np.isfinite(ratios) & (ratios > 0)):
        failures.append("a ratio is not finite and positive")
    elif ratios.max() / ratios.min() >= args.max_spread:
        failures.append(f"spread {ratios.max() / ratios.min()!r} not below {args.max_spread}")
    if failures:
        raise AssertionFailure(failures, {"command": "hardy-ratio", "ratios": ratios.tolist()})
    return EXIT_OK


def cmd_bessel_fold(cfg, args):
    setup = cfg.setup
    axes = cfg.grid(8.0 if setup.n == 1 else 6.0, 0.05 if setup.n == 1 else 0.1, stagger=True)
    pos = [ax.nodes[ax.nodes > 0] for ax in axes]
    X = np.meshgrid(*pos, indexing="ij")
    vals = np.exp(-sum(c ** 2 for c in X)) * (1 + X[0] ** 2)
    rep = hardy.fold_identities(setup, axes, vals, t=args.t, nodes=args.check_nodes,
                                rng=np.random.default_rng(cfg.seed))
    failures = []
    if rep.semigroup_deviation > args.semigroup_tol:
        failures.append(f"semigroup deviation {rep.semigroup_deviation!r} above {args.semigroup_tol}")
    if rep.riesz_deviation > args.riesz_tol:
        failures.append(f"Riesz deviation {rep.riesz_deviation!r} above {args.riesz_tol}")
    return _finish(cfg, "bessel-fold", {"k": list(setup.k), **rep.to_dict()}, failures)


def determinism_check(seed, ids=(1, 2, 3, 8, 11)):
    """Run the fast criteria twice and compare their canonical bytes."""
    a = acceptance.canonical_json([r.to_dict() for r in acceptance.run_suite(seed, ids)])
    b = acceptance.canonical_json([r.to_dict() for r in acceptance.run_suite(seed, ids)])
    digest = hashlib.sha256(a.encode()).hexdigest()
    return acceptance.CriterionResult(12, "determinism of repeated runs", a == b,
                                      {"repeated_criteria": list(ids), "digest": digest, "identical": a == b})


def cmd_verify_all(cfg, args):
    only = set(args.only) if args.only else None
    results = acceptance.run_suite(cfg.seed, only, worker_count())
    if only is None or 12 in only:
        results.append(determinism_check(cfg.seed))
    for r in results:
        print(r.line(), file=sys.stderr)
    report = acceptance.suite_report(results, cfg.seed, cfg.fingerprint("verify-all"))
    _emit(acceptance.canonical_json(report), cfg.out)
    failed = [r.line() for r in results if not r.passed]
    if failed:
        raise AssertionFailure(failed, {"command": "verify-all", "failed": [r.id for r in results if not r.passed]})
    return EXIT_OK


# parser ----------------------------------------------------------------------

def _k_arg(text):
    return _floats(text, "--k")


def _common(p):
    p.add_argument("--config", help="runconfig-v1 JSON file; flags override its values")
    p.add_argument("--k", type=_k_arg, help="multiplicities, comma-separated (one value broadcasts over --n)")
    p.add_argument("--n", dest="dim", type=int, help="dimension")
    p.add_argument("--extent", type=float, help="half-width of the spatial grid")
    p.add_argument("--step", type=float, help="grid step")
    p.add_argument("--nodes", type=int, help="nodes per axis (overrides --step)")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="output file (default stdout)")


def build_parser():
    parser = argparse.ArgumentParser(prog="dunkl-hardy", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("kernel", help="evaluate heat, Poisson, Dunkl or Bessel heat kernels")
    _common(p)
    p.add_argument("--type", required=True, choices=("heat", "poisson", "dunkl", "bessel-heat"))
    p.add_argument("--t", action="append", type=float, help="time (repeatable)")
    p.add_argument("--x", action="append", help="point, comma-separated (repeatable)")
    p.add_argument("--y", action="append", help="point, comma-separated (repeatable)")
    p.add_argument("--value-only", action="store_true", help="print only kernel values, one per line")
    p.set_defaults(func=cmd_kernel)

    p = sub.add_parser("transform", help="Plancherel, round-trip and Gaussian fixed-point report")
    _common(p)
    p.add_argument("--field", help="dunkl-field-v1 JSON input (default: built-in test function)")
    p.add_argument("--tol", type=float, default=1e-4)
    p.add_argument("--fixed-tol", type=float, default=1e-6)
    p.add_argument("--full", action="store_true", help="include full axis data in the report")
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("riesz", help="apply a Riesz transform to a field file")
    _common(p)
    p.add_argument("--field", required=True, help="dunkl-field-v1 JSON input")
    p.add_argument("--j", type=int, default=1, help="coordinate index, 1-based")
    p.add_argument("--result", help="write the transformed field here")
    p.set_defaults(func=cmd_riesz)

    p = sub.add_parser("verify-cr", help="second-order decay of Cauchy-Riemann residuals")
    _common(p)
    p.add_argument("--window", type=float, default=2.0, help="half-width of the spatial check window")
    p.add_argument("--t-lo", type=float, default=0.3)
    p.add_argument("--t-hi", type=float, default=1.0)
    p.add_argument("--band", type=float, nargs=2, default=(3.5, 4.5))
    p.set_defaults(func=cmd_verify_cr)

    p = sub.add_parser("verify-lemma", help="search for the operator-norm lemma constant")
    _common(p)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--samples", type=int, default=100_000)
    p.set_defaults(func=cmd_verify_lemma)

    p = sub.add_parser("subharmonic-scan", help="scan the generator of |F|^q for negative values")
    _common(p)
    p.add_argument("--q", type=float, help="exponent (default: the admissible bound)")
    p.add_argument("--t-max", type=float)
    p.add_argument("--expect", choices=("none", "violations", "any"), default="none")
    p.add_argument("--threshold", action="store_true",
                   help="also bisect for the smallest exponent without violations")
    p.set_defaults(func=cmd_subharmonic_scan)

    p = sub.add_parser("hardy-ratio", help="characterization ratios over random atoms (CSV)")
    _common(p)
    p.add_argument("--atoms", type=int, default=50)
    p.add_argument("--max-spread", type=float, default=100.0)
    p.set_defaults(func=cmd_hardy_ratio)

    p = sub.add_parser("bessel-fold", help="Bessel against Dunkl operators on even extensions")
    _common(p)
    p.add_argument("--t", type=float, default=0.5)
    p.add_argument("--check-nodes", type=int, default=100, help="number of checked nodes")
    p.add_argument("--semigroup-tol", type=float, default=1e-8)
    p.add_argument("--riesz-tol", type=float, default=1e-6)
    p.set_defaults(func=cmd_bessel_fold)

    p = sub.add_parser("verify-all", help="run the full acceptance suite")
    _common(p)
    p.add_argument("--only", type=int, nargs="+", help="criterion ids to run")
    p.set_defaults(func=cmd_verify_all)
    parser.commands = sub.choices
    return parser


_GRID_KEYS = {"config", "k", "dim", "extent", "step", "nodes", "seed", "out", "func", "command", "t_max"}


def _given(action, argv):
    return any(tok == opt or tok.startswith(opt + "=") for tok in argv for opt in action.option_strings)


def _config(args, argv=(), subparser=None):
    """Merge flags and the config file; explicit flags beat the file, which beats defaults.

    The merged command options are written back onto ``args``.
    """
    overrides = {"k": args.k, "n": args.dim, "extent": args.extent, "step": args.step, "nodes": args.nodes,
                 "seed": args.seed, "out": args.out}
    if args.command == "subharmonic-scan":
        overrides["t_max"] = args.t_max
    actions = [a for a in (subparser._actions if subparser else []) if a.dest not in _GRID_KEYS | {"help"}]
    defaults = {a.dest: getattr(args, a.dest) for a in actions if not _given(a, argv)}
    overrides["params"] = {a.dest: getattr(args, a.dest) for a in actions if _given(a, argv)}
    cfg = RunConfig.from_sources(args.config, overrides)
    cfg.params = {**defaults, **cfg.params}
    for key, value in cfg.params.items():
        setattr(args, key, value)
    return cfg


def main(argv=None):
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(argv)
    try:
        cfg = _config(args, argv, parser.commands[args.command])
        return args.func(cfg, args)
    except AssertionFailure as exc:
        sys.stderr.write(acceptance.canonical_json({"status": "failed", "failures": exc.failures,
                                                    "report": exc.report}))
        return EXIT_FAIL
    except (ConfigError, DomainError, GridError, OSError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ConvergenceError as exc:
        sys.stderr.write(acceptance.canonical_json({"status": "failed", "failures": [str(exc)]}))
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
