"""Command-line front end: ``juliatwin <subcommand> ...``.

Every report is JSON with sorted keys and embeds the resolved run
configuration, so re-running with the same configuration gives identical
bytes. Exit codes: 0 on a completed analysis (``unresolved`` included),
2 bad usage, 3 malformed map or input file, 4 degree budget exceeded,
5 root-finder failure, 6 other invalid input.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from .errors import DegreeBudgetError, MapFormatError, RootFinderError
from .ratmap import SpherePoint, parse_map

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_MAP = 3
EXIT_BUDGET = 4
EXIT_ROOTS = 5
EXIT_INPUT = 6


@dataclass
class RunConfig:
    seed: int = 0
    n_points: int = 20_000
    burn_in: int = 50
    tolerances: dict = field(default_factory=lambda: {
        "equality": 1e-9, "hausdorff": 1e-3, "residual": 1e-8, "circle": 1e-6, "lamination": 1e-3})
    budgets: dict = field(default_factory=lambda: {
        "degree": 4096, "max_m": 8, "max_k": 3, "n_max": 1, "root": 4097})
    outputs: dict = field(default_factory=dict)

    def validate(self):
        for k, v in self.tolerances.items():
            if not v > 0:
                raise ValueError(f"tolerance {k} must be positive")
        for k, v in self.budgets.items():
            if not (isinstance(v, int) and v >= 1):
                raise ValueError(f"budget {k} must be an integer >= 1")
        if self.n_points < 1 or self.burn_in < 0:
            raise ValueError("n_points must be >= 1 and burn_in >= 0")
        return self


def _merge_file(cfg: RunConfig, path: str) -> None:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise MapFormatError(f"cannot read config {path}: {exc}") from None
    for key, val in data.items():
        if key in ("tolerances", "budgets", "outputs"):
            getattr(cfg, key).update(val)
        elif key in ("seed", "n_points", "burn_in"):
            setattr(cfg, key, int(val))
        else:
            raise ValueError(f"unknown config key {key!r}")


_TOL_FLAGS = {"tol_equality": "equality", "tol_hausdorff": "hausdorff", "tol_residual": "residual",
              "tol_circle": "circle", "tol_lamination": "lamination", "tol": "hausdorff"}
_BUDGET_FLAGS = {"max_degree": "degree", "max_m": "max_m", "max_k": "max_k", "max_period": "n_max",
                 "periods": "n_max", "max_roots": "root"}


def resolve_config(args) -> RunConfig:
    """Defaults, then the ``--config`` file, then explicit flags."""
    cfg = RunConfig()
    if getattr(args, "config", None):
        _merge_file(cfg, args.config)
    for name in ("seed", "n_points", "burn_in"):
        v = getattr(args, name, None)
        if v is not None:
            setattr(cfg, name, v)
    for flag, key in _TOL_FLAGS.items():
        v = getattr(args, flag, None)
        if v is not None:
            cfg.tolerances[key] = v
    for flag, key in _BUDGET_FLAGS.items():
        v = getattr(args, flag, None)
        if v is not None:
            cfg.budgets[key] = v
    for name in ("out", "ppm", "output"):
        v = getattr(args, name, None)
        if v is not None:
            cfg.outputs[name] = v if not isinstance(v, list) else [str(x) for x in v]
    return cfg.validate()


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, complex):
        return [x.real, x.imag]
    if isinstance(x, np.generic):
        return _jsonable(x.item())
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, float) and not np.isfinite(x):
        return "inf" if x > 0 else "-inf" if x < 0 else "nan"
    return x


def _emit(report: dict, cfg: RunConfig, out: str | None) -> None:
    report = dict(report)
    report["config"] = asdict(cfg)
    text = json.dumps(_jsonable(report), sort_keys=True, indent=2) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load(path):
    from .io import load_map

    return load_map(path)


def _point(text: str, exact: bool):
    t = text.strip().lower()
    if t in ("inf", "infinity", "oo"):
        return SpherePoint.infinity(exact)
    c = parse_map(t, exact=exact)
    if c.degree != 0:
        raise MapFormatError(f"point {text!r} is not a constant")
    return SpherePoint.of(c.num.coeff(0) / c.den.coeff(0), exact)


# subcommands

def cmd_analyze(args, cfg):
    from .spectrum import critical_orbit_report, nonrepelling_census, periodic_points

    f = _load(args.map)
    n = cfg.budgets["n_max"]
    orbits = periodic_points(f, n, budget=cfg.budgets["root"], seed=cfg.seed)
    report = {"map": args.map, "period": n, "orbits": [o.to_dict() for o in orbits]}
    if args.census:
        report["census"] = nonrepelling_census(f, n, budget=cfg.budgets["root"], seed=cfg.seed)
    if args.critical:
        from .julia import inverse_iteration_sample

        cloud = inverse_iteration_sample(f, cfg.n_points, cfg.burn_in, cfg.seed)
        report["critical_orbits"] = critical_orbit_report(f, cloud)
    return report


def cmd_julia_sample(args, cfg):
    from .io import write_cloud_csv, write_ppm
    from .julia import forward_invariance, inverse_iteration_sample

    f = _load(args.map)
    cloud = inverse_iteration_sample(f, cfg.n_points, cfg.burn_in, cfg.seed)
    if args.output:
        write_cloud_csv(cloud, args.output)
    if args.ppm:
        write_ppm(cloud, args.ppm[0], int(args.ppm[1]) if len(args.ppm) > 1 else 512)
    return {"map": args.map, "meta": cloud.meta, "forward_invariance": forward_invariance(f, cloud),
            "csv": args.output}


def cmd_compare(args, cfg):
    from .julia import same_julia_test

    f, g = _load(args.f), _load(args.g)
    res = same_julia_test(f, g, cfg.n_points, cfg.seed, cfg.tolerances["hausdorff"])
    return {"f": args.f, "g": args.g, **res}


def cmd_funceq(args, cfg):
    from .funceq import commute_check, search_functional_equation

    f, g = _load(args.f), _load(args.g)
    rep = search_functional_equation(f, g, cfg.budgets["max_m"], cfg.budgets["max_k"], cfg.budgets["degree"])
    out = {"f": args.f, "g": args.g, **rep.to_dict(), "commute": commute_check(f, g)}
    return out


def cmd_localdyn(args, cfg):
    from . import localdyn as ld

    f = _load(args.map)
    pt = _point(args.fixed_point, f.exact)
    if args.mode == "koenigs":
        phi = ld.koenigs_series(f, pt, args.order)
        r0 = min(0.25 * phi.radius(), 1.0)
        return {"map": args.map, "mode": "koenigs", "fixed_point": str(pt), "order": args.order,
                "coefficients": [complex(c) for c in phi.coeffs],
                "exact_coefficients": [str(c) for c in phi.coeffs] if phi.exact else None,
                "radius_estimate": phi.radius(), "r0": r0,
                "conjugacy_residual": ld.koenigs_residual(f, phi, r0)}
    data = ld.parabolic_data(f, pt)
    g, norm = ld.normalize_alpha(f, data)
    report = {"map": args.map, "mode": "parabolic", "fixed_point": str(pt),
              "parabolic": data.to_dict(), "normalized": norm.to_dict(), "normalized_map": str(g)}
    if args.fatou_samples:
        a = ld.auto_petal_a(g, data.p, seed=cfg.seed)
        rng = np.random.default_rng(cfg.seed)
        w = 1 / a + 100 + rng.uniform(0, 100, args.fatou_samples) + 1j * rng.uniform(-100, 100, args.fatou_samples)
        u = ld.fatou_coordinate(g, 0, w, args.fatou_iter, data.p)
        report["petal_a"] = a
        report["fatou"] = {"n_iter": args.fatou_iter, "w": list(w), "u": list(u.value),
                           "error": list(u.error)}
    return report


def cmd_tangent_cone(args, cfg):
    from .geometry import tangent_cone_directions
    from .julia import PointCloud, inverse_iteration_sample, merge_clouds

    f = _load(args.map)
    pt = _point(args.point, False)
    cloud = inverse_iteration_sample(f, cfg.n_points, cfg.burn_in, cfg.seed)
    # the base point is supplied by the user as a point of J; add it so the
    # annuli are centred on an actual cloud point
    base = PointCloud(np.array([pt.z0]), np.array([pt.z1]))
    cloud = merge_clouds(cloud, base)
    radii = [float(r) for r in args.radii.split(",")] if args.radii else None
    rep = tangent_cone_directions(cloud, complex(pt.value), radii)
    return {"map": args.map, "point": str(pt), **rep}


def cmd_classify_pair(args, cfg):
    from .geometry import classify_pair

    f, g = _load(args.f), _load(args.g)
    rep = classify_pair(f, g, cfg.n_points, cfg.seed, cfg.tolerances["hausdorff"], cfg.tolerances["circle"],
                        cfg.budgets["max_m"], cfg.budgets["max_k"], cfg.budgets["degree"])
    return {"f": args.f, "g": args.g, **rep}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int)
    common.add_argument("--config", help="JSON run configuration; flags override it")
    common.add_argument("--out", help="write the JSON report here instead of stdout")
    common.add_argument("-n", "--n-points", type=int, dest="n_points")
    common.add_argument("--burn-in", type=int)
    common.add_argument("--tol-equality", type=float)
    common.add_argument("--tol-hausdorff", type=float)
    common.add_argument("--tol-residual", type=float)
    common.add_argument("--tol-circle", type=float)
    common.add_argument("--max-degree", type=int)
    common.add_argument("--max-m", type=int)
    common.add_argument("--max-k", type=int)
    common.add_argument("--max-roots", type=int)

    p = argparse.ArgumentParser(prog="juliatwin", description="Rational maps sharing a Julia set.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", parents=[common], help="periodic orbits and multipliers")
    a.add_argument("map")
    a.add_argument("--periods", type=int, help="find orbits with period dividing this")
    a.add_argument("--census", action="store_true", help="non-repelling census for n <= periods")
    a.add_argument("--critical", action="store_true", help="critical orbit report on a sampled cloud")
    a.set_defaults(func=cmd_analyze)

    s = sub.add_parser("julia-sample", parents=[common], help="sample J_f by inverse iteration")
    s.add_argument("map")
    s.add_argument("-o", "--output", help="CSV file (re, im, is_infinite)")
    s.add_argument("--ppm", nargs="+", metavar=("FILE", "WIDTH"), help="binary PPM raster")
    s.set_defaults(func=cmd_julia_sample)

    c = sub.add_parser("compare", parents=[common], help="same-Julia-set test")
    c.add_argument("f")
    c.add_argument("g")
    c.add_argument("--tol", type=float, help="Hausdorff tolerance (same as --tol-hausdorff)")
    c.set_defaults(func=cmd_compare)

    fq = sub.add_parser("funceq-search", parents=[common], help="search f^m1 g ... f^mk g = f^m")
    fq.add_argument("f")
    fq.add_argument("g")
    fq.set_defaults(func=cmd_funceq)

    ld = sub.add_parser("localdyn", parents=[common], help="Koenigs series or parabolic data")
    ld.add_argument("map")
    ld.add_argument("--fixed-point", default="0")
    ld.add_argument("--mode", choices=["koenigs", "parabolic"], default="koenigs")
    ld.add_argument("--order", type=int, default=24)
    ld.add_argument("--fatou-samples", type=int, default=0)
    ld.add_argument("--fatou-iter", type=int, default=1000)
    ld.set_defaults(func=cmd_localdyn)

    t = sub.add_parser("tangent-cone", parents=[common], help="tangent-cone directions of J_f at a point")
    t.add_argument("map")
    t.add_argument("--point", required=True)
    t.add_argument("--radii", help="comma-separated decreasing radii")
    t.set_defaults(func=cmd_tangent_cone)

    cp = sub.add_parser("classify-pair", parents=[common], help="which alternative holds for (f, g)")
    cp.add_argument("f")
    cp.add_argument("g")
    cp.set_defaults(func=cmd_classify_pair)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        report = args.func(args, cfg)
        _emit({"command": args.command, **report}, cfg, args.out)
    except MapFormatError as exc:
        print(f"juliatwin: malformed input: {exc}", file=sys.stderr)
        return EXIT_MAP
    except DegreeBudgetError as exc:
        print(f"juliatwin: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except RootFinderError as exc:
        print(f"juliatwin: root finder failed: {exc}", file=sys.stderr)
        return EXIT_ROOTS
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        print(f"juliatwin: invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
