"""``richtangent`` command line.

Exit status: 0 pass, 1 invalid input, 2 a certified bound failed, 3 a budget ran out.
"""

from __future__ import annotations

import argparse
import itertools
import json
import math
import sys
from fractions import Fraction
from pathlib import Path

from . import euclid_sets, fractal_zoo, gromov_hausdorff, pisigma, sigma_space
from .constructions import KINDS, load_construction
from .euclid_sets import PointCloudSet, box_dimension, hausdorff_distance, porosity_profile, tangent_photograph_scan, zoom
from .gromov_hausdorff import gh_exact
from .io import (
    dumps,
    ensure_dir,
    load_json,
    parse_point,
    parse_range,
    parse_values,
    read_points_csv,
    write_json,
    write_points_csv,
    write_rows_csv,
)
from .metric_core import RationalSpaceEnumerator, read_matrix_csv, validate_metric
from .rational import format_fraction, to_fraction

EXIT_OK, EXIT_INVALID, EXIT_FAILED, EXIT_BUDGET = 0, 1, 2, 3

BUDGET_ERRORS = (
    gromov_hausdorff.BudgetExceeded,
    sigma_space.BudgetExceeded,
    euclid_sets.BudgetExceeded,
    pisigma.BudgetExceeded,
    fractal_zoo.DecompositionBudget,
    fractal_zoo.NoConvergence,
)


class Failed(Exception):
    """A certification did not hold; the message says which."""


# ---------------------------------------------------------------- helpers


def _out(args) -> Path | None:
    return ensure_dir(args.out) if args.out else None


def _construction(args):
    if not args.construction:
        raise ValueError("--construction <json> is required")
    path = Path(args.construction)
    return load_construction(load_json(path), path.parent, args.budget_points)


def _scales(args) -> list[Fraction]:
    if args.scales:
        return parse_values(args.scales)
    if args.geometric:
        start, ratio, count = args.geometric.split(",")
        s, q = to_fraction(start), to_fraction(ratio)
        return [s * q**k for k in range(int(count))]
    raise ValueError("give --scales or --geometric")


def _target(text: str | None, dim: int) -> PointCloudSet:
    if not text:
        return PointCloudSet.from_points([(0,) * dim], dim)
    if Path(text).is_file():
        return read_points_csv(text, dim)
    return PointCloudSet.from_points([parse_point(p) for p in text.split(";")], dim)


def _svg(kind: str, *a, **kw) -> None:
    from . import plotting

    getattr(plotting, kind)(*a, **kw)


def _report(rows, out: Path | None, name: str, columns=None) -> None:
    if out is not None:
        write_rows_csv(rows, out / f"{name}.csv", columns)


def _print_rows(rows, columns) -> None:
    print(",".join(columns))
    for r in rows:
        print(",".join(_fmt(r.get(c, "")) for c in columns))


def _fmt(v) -> str:
    if isinstance(v, Fraction):
        return format_fraction(v)
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


# ---------------------------------------------------------------- commands


def cmd_gh(args) -> int:
    X, Y = read_matrix_csv(args.a), read_matrix_csv(args.b)
    kw = {} if args.budget_gh is None else {"budget": args.budget_gh}
    res = gh_exact(X, Y, **kw)
    print(format_fraction(res.value))
    out = _out(args)
    if out is not None:
        write_json(
            {"value": res.value, "lower": res.lower_bound, "exact": res.exact, "nodes": res.nodes, "pairs": res.certificate.sorted_pairs()},
            out / "gh.json",
        )
    if not res.exact:
        print(f"search budget exhausted; value is an upper bound, lower bound {format_fraction(res.lower_bound)}", file=sys.stderr)
        return EXIT_BUDGET
    return EXIT_OK


def cmd_hausdorff(args) -> int:
    A, B = read_points_csv(args.a), read_points_csv(args.b)
    h = hausdorff_distance(A, B)
    print(format_fraction(h.exact) if h.exact is not None else repr(h.value))
    return EXIT_OK


def cmd_zoom(args) -> int:
    E = _construction(args)
    Z = zoom(E, parse_point(args.x), to_fraction(args.t), depth=args.depth)
    print(f"{len(Z)} points, resolution {format_fraction(Z.resolution)}")
    out = _out(args)
    if out is not None:
        write_points_csv(Z, out / "zoom.csv", exact=args.exact)
        if Z.dim <= 2:
            _svg("scatter_svg", Z, out / "zoom.svg")
    return EXIT_OK


def cmd_scan(args) -> int:
    E = _construction(args)
    F = _target(args.target, E.dim)
    res = tangent_photograph_scan(E, parse_point(args.x), F, _scales(args), depth=args.depth)
    cols = ["t", "dH", "slack", "size"]
    _print_rows(res.profile, cols)
    out = _out(args)
    if out is not None:
        _report(res.profile, out, "scan", cols)
        write_json({"mode": res.mode, "best_index": res.best_index, "best_t": res.best_t, "best_dH": res.best_dh}, out / "scan.json")
        _svg("profile_svg", res.profile, "t", ["dH"], out / "scan.svg", logx=True)
    return EXIT_OK


def cmd_porosity(args) -> int:
    E = _construction(args)
    radii = parse_values(args.radii) if args.radii else _scales(args)
    prof = porosity_profile(E, parse_point(args.x), radii, depth=args.depth)
    cols = ["r", "por"]
    rows = [{"r": r, "por": v} for r, v in prof.rows]
    _print_rows(rows, cols)
    print(f"upper {prof.upper_est:.6g} lower {prof.lower_est:.6g}")
    out = _out(args)
    if out is not None:
        _report(rows, out, "porosity", cols)
        write_json({"upper": prof.upper_est, "lower": prof.lower_est}, out / "porosity.json")
        _svg("profile_svg", rows, "r", ["por"], out / "porosity.svg", logx=True)
    return EXIT_OK


def cmd_boxdim(args) -> int:
    E = _construction(args)
    depths = parse_range(args.depths)
    kw = {} if args.budget_points is None else {"budget": args.budget_points}
    bd = box_dimension(E, min(depths), max(depths), depth=args.depth, **kw)
    rows = [{"k": k, "side": s, "count": c} for k, s, c in zip(bd.depths, bd.sides, bd.counts)]
    cols = ["k", "side", "count"]
    _print_rows(rows, cols)
    print(f"lower {bd.lower_slope:.6g} upper {bd.upper_slope:.6g} fit {bd.fit_slope:.6g}")
    out = _out(args)
    if out is not None:
        _report(rows, out, "boxdim", cols)
        write_json({"lower": bd.lower_slope, "upper": bd.upper_slope, "fit": bd.fit_slope}, out / "boxdim.json")
        logrows = [{"log2_inv_side": -math.log2(float(s)), "log2_count": math.log2(c)} for s, c in zip(bd.sides, bd.counts)]
        _svg("profile_svg", logrows, "log2_inv_side", ["log2_count"], out / "boxdim.svg")
    return EXIT_OK


def cmd_moran(args) -> int:
    ratios = [float(r) for r in parse_values(args.ratios)] if args.ratios else []
    tail = None
    if args.geometric_tail:
        first, ratio, start = args.geometric_tail.split(",")
        tail = fractal_zoo.geometric_tail(float(to_fraction(first)), float(to_fraction(ratio)), int(start))
    kw = {} if args.tol is None else {"tol": args.tol}
    res = fractal_zoo.moran_dimension(ratios, tail, **kw)
    print(repr(res.s))
    out = _out(args)
    if out is not None:
        write_json({"s": res.s, "low": res.low, "high": res.high, "residual": res.residual}, out / "moran.json")
    return EXIT_OK


def cmd_export_svg(args) -> int:
    out = ensure_dir(args.out or ".")
    if args.points:
        P = read_points_csv(args.points)
        _svg("scatter_svg", P, out / (Path(args.points).stem + ".svg"))
    elif args.profile:
        import csv

        with open(args.profile, newline="") as fh:
            rows = list(csv.DictReader(fh))
        ys = args.y.split(",")
        _svg("profile_svg", rows, args.x_col, ys, out / (Path(args.profile).stem + ".svg"), logx=args.logx)
    else:
        raise ValueError("give --points or --profile")
    return EXIT_OK


# ---------------------------------------------------------------- build


def cmd_build(args) -> int:
    cfg = load_json(args.config) if args.config else {}
    cfg.setdefault("kind", args.which)
    if cfg["kind"] != args.which:
        raise ValueError(f"config kind {cfg['kind']!r} does not match {args.which!r}")
    if args.depth is not None:
        cfg["depth" if args.which not in ("c0", "cinf", "kinf") else "levels"] = args.depth
    base = Path(args.config).parent if args.config else Path(".")
    gen = load_construction(cfg, base, args.budget_points)
    P = gen.points()
    summary = {
        "kind": args.which,
        "config": cfg,
        "dim": gen.dim,
        "points": len(P),
        "resolution": gen.resolution(gen.default_depth),
    }
    print(dumps(summary), end="")
    out = _out(args)
    if out is not None:
        write_points_csv(P, out / f"{args.which}.csv", exact=args.exact)
        write_json(summary, out / f"{args.which}.json")
        if gen.dim <= 2 and len(P) <= 200_000:
            Q = P if all(abs(v) <= 1 for p in P.points for v in p) else _normalise(P)
            _svg("scatter_svg", Q, out / f"{args.which}.svg", title=args.which)
    return EXIT_OK


def _normalise(P: PointCloudSet) -> PointCloudSet:
    m = max(abs(v) for p in P.points for v in p)
    return PointCloudSet(P.dim, tuple(tuple(v / m for v in p) for p in P.points), P.resolution / m)


# ---------------------------------------------------------------- verify


def _sigma_schedule(args):
    cfg = load_json(args.config) if args.config else {}
    if "gammas" in cfg:
        gammas = [validate_metric(g) for g in cfg["gammas"]]
        return sigma_space.make_schedule(gammas, cfg.get("rs", cfg.get("rule", "default")))
    e = RationalSpaceEnumerator(int(cfg.get("max_points", 3)), int(cfg.get("max_denominator", 2)))
    return sigma_space.default_schedule(max(args.depth, int(cfg.get("depth", 0))), e, cfg.get("rule", "default"))


def verify_sigma_tangent(args) -> tuple[list[dict], bool, bool]:
    sch = _sigma_schedule(args)
    N = args.depth
    kw = {} if args.budget_points is None else {"budget": args.budget_points}
    S = sigma_space.build_sigma(sch, N, **kw)
    levels = [args.level] if args.level else list(range(1, N))
    words = [tuple(json.loads(args.omega))] if args.omega else list(S.labels)
    rows, ok, exact = [], True, True
    for n in levels:
        for w in words:
            rep = sigma_space.verify_sigma_tangent(sch, N, w, n, sigma=S, gh_budget=args.budget_gh)
            rows.append({"omega": "".join(map(str, w)), "level": n, "gh": rep.gh_value, "bound": rep.bound, "exact": rep.exact, "pass": rep.passed})
            ok &= rep.passed
            exact &= rep.exact
    return rows, ok, exact


def verify_pisigma_structure(args) -> tuple[list[dict], bool, bool]:
    cfg = load_json(args.config) if args.config else {"dim": 1, "depth": args.depth or 4}
    if args.depth:
        cfg["depth"] = args.depth
    if args.budget_points is not None:
        cfg["budget_points"] = args.budget_points
    seq, sch, gen = pisigma.build_from_config(cfg)
    pisigma.check_nested(sch)
    N = sch.depth
    margin = pisigma.injectivity_margin(gen, N)
    items = list(gen.codings((0,) * gen.dim, 1, N))
    worst = min(pisigma.continuity_gap(sch, a, b) for (a, _), (b, _) in itertools.combinations(items, 2)) if len(items) > 1 else Fraction(0)
    rows = [
        {"check": "nested", "value": 0, "pass": True},
        {"check": "separation_margin", "value": margin, "pass": margin >= 0},
        {"check": "continuity_gap", "value": worst, "pass": worst >= 0},
        {"check": "points", "value": len(items), "pass": True},
    ]
    return rows, margin >= 0 and worst >= 0, True


def verify_pisigma_tangent(args) -> tuple[list[dict], bool, bool]:
    cfg = load_json(args.config) if args.config else {"dim": 1, "depth": args.depth or 6}
    if args.depth:
        cfg["depth"] = args.depth
    seq, sch, gen = pisigma.build_from_config(cfg)
    pattern = tuple(parse_point(p) for p in (args.pattern or "0;1/2").split(";"))
    N = sch.depth
    coding = pisigma.special_point_coding(seq, pattern, N)
    occ = [k for k in seq.occurrences(pattern, N) if k <= N]
    if not occ:
        raise pisigma.PatternUnknown("pattern does not occur within the depth")
    rows, ok = [], True
    modes = ["dense", "allpoints"] if args.mode == "both" else [args.mode]
    for mode in modes:
        for k in occ:
            rep = pisigma.verify_pisigma_tangent(gen, coding, k, mode)
            rows.append(rep.as_row())
            ok &= rep.passed
    return rows, ok, True


def verify_c0(args) -> tuple[list[dict], bool, bool]:
    levels = args.depth or 6
    gen, _ = fractal_zoo.build_c0(fractal_zoo.default_c0_params(levels + 1, args.dim))
    rows = fractal_zoo.c0_tangent_profile(gen, range(1, levels + 1))
    ok = all(r["pass"] for r in rows) and all(a["bound"] > b["bound"] for a, b in zip(rows, rows[1:]))
    return rows, ok, True


def verify_photograph(args) -> tuple[list[dict], bool, bool]:
    levels = args.depth or 4
    gen = fractal_zoo.global_rich_build("A", levels + 1, args.dim)
    rows = fractal_zoo.photograph_profile(gen, levels=range(1, levels + 1))
    comp = fractal_zoo.global_rich_build("composite", levels + 1, args.dim)
    comp.check_disjoint()
    rows.append({"n": "composite", "pass": True})
    return rows, all(r["pass"] for r in rows), True


def verify_kinf(args) -> tuple[list[dict], bool, bool]:
    t = float(to_fraction(args.t or "1/2"))
    eps = args.tol if args.tol is not None else 1e-6
    sys_ = fractal_zoo.make_ifs(fractal_zoo.default_c0_params(4, args.dim), "kinf")
    k_star = fractal_zoo.predicted_k(t, sys_, eps)
    rows = []
    for k in range(1, max(k_star, args.depth or 6) + 1):
        cs = fractal_zoo.kinf_cover_sum(k, t, sys_)
        rows.append({"k": k, "value": cs.value, "closed_form": cs.closed_form, "log2_value": cs.log2_value})
    dec = all(a["value"] > b["value"] for a, b in zip(rows, rows[1:]))
    hit = rows[k_star - 1]["value"] < eps
    rows.append({"k": f"predicted={k_star}", "value": "", "closed_form": "", "log2_value": ""})
    return rows, dec and hit, True


def verify_zero_tangent(args) -> tuple[list[dict], bool, bool]:
    s = to_fraction(args.s or "1/2")
    gen = fractal_zoo.zero_tangent_construction(s, args.dim, args.depth or 7)
    levels = list(range(2, (args.depth or 7)))
    res = fractal_zoo.zero_tangent_scan(gen, (0,) * args.dim, levels if s > 0 else range(3))
    rows = res.profile
    ok = all(a["dH"] >= b["dH"] for a, b in zip(rows, rows[1:]))
    return rows, ok, True


def verify_whitney(args) -> tuple[list[dict], bool, bool]:
    F = _target(args.target, args.dim)
    cubes = fractal_zoo.whitney_cubes(F, args.depth or 6)
    rows = [{"lo": ";".join(map(format_fraction, c.lo)), "side": c.side, "dist_sq": c.dist_sq, "diam_sq": c.diam_sq()} for c in cubes]
    fractal_zoo.check_sandwich(cubes)
    return rows, True, True


VERIFIERS = {
    "sigma-tangent": verify_sigma_tangent,
    "pisigma-structure": verify_pisigma_structure,
    "pisigma-tangent": verify_pisigma_tangent,
    "c0": verify_c0,
    "photograph": verify_photograph,
    "kinf": verify_kinf,
    "zero-tangent": verify_zero_tangent,
    "whitney": verify_whitney,
}


def cmd_verify(args) -> int:
    rows, ok, exact = VERIFIERS[args.which](args)
    cols = list(dict.fromkeys(k for r in rows for k in r))
    _print_rows(rows, cols)
    out = _out(args)
    if out is not None:
        name = args.which.replace("-", "_")
        _report(rows, out, name, cols)
        write_json({"check": args.which, "pass": ok, "exact": exact}, out / f"{name}.json")
    if ok:
        print("PASS")
        return EXIT_OK
    if not exact:
        print("FAIL (search budget exhausted)", file=sys.stderr)
        return EXIT_BUDGET
    raise Failed(f"verify {args.which}: bound violated")


# ---------------------------------------------------------------- parser


def _positive_int(text: str) -> int:
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _unit_float(text: str) -> float:
    v = float(text)
    if not 0 < v < 1:
        raise argparse.ArgumentTypeError("must lie in (0, 1)")
    return v


class _Parser(argparse.ArgumentParser):
    """Usage errors are validation errors: exit 1, not argparse's 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="JSON config")
    common.add_argument("--out", help="output directory")
    common.add_argument("--budget-points", type=_positive_int)
    common.add_argument("--budget-gh", type=_positive_int)
    common.add_argument("--tol", type=_unit_float)
    common.add_argument("--seed", type=int, default=0, help="only used for random corpora")
    common.add_argument("--depth", type=_positive_int)

    p = _Parser(prog="richtangent", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("gh", parents=[common], help="exact Gromov-Hausdorff distance of two matrix CSVs")
    s.add_argument("--a", required=True)
    s.add_argument("--b", required=True)
    s.set_defaults(func=cmd_gh)

    s = sub.add_parser("hausdorff", parents=[common], help="Hausdorff distance of two point CSVs")
    s.add_argument("--a", required=True)
    s.add_argument("--b", required=True)
    s.set_defaults(func=cmd_hausdorff)

    s = sub.add_parser("zoom", parents=[common], help="T_{x,t}(E) of a construction")
    s.add_argument("--construction", required=True)
    s.add_argument("--x", required=True, help="comma separated point")
    s.add_argument("--t", required=True)
    s.add_argument("--exact", action="store_true")
    s.set_defaults(func=cmd_zoom)

    for name, func in (("scan", cmd_scan), ("porosity", cmd_porosity)):
        s = sub.add_parser(name, parents=[common])
        s.add_argument("--construction", required=True)
        s.add_argument("--x", required=True)
        s.add_argument("--scales")
        s.add_argument("--geometric", help="start,ratio,count")
        if name == "scan":
            s.add_argument("--target", help="point CSV or 'p;q;...' points (default: the origin)")
        else:
            s.add_argument("--radii")
        s.set_defaults(func=func)

    s = sub.add_parser("boxdim", parents=[common], help="dyadic box counts and slopes")
    s.add_argument("--construction", required=True)
    s.add_argument("--depths", default="4:9")
    s.set_defaults(func=cmd_boxdim)

    s = sub.add_parser("moran", parents=[common], help="root of sum r_i^s = 1")
    s.add_argument("--ratios")
    s.add_argument("--geometric-tail", help="first,ratio,start for r_i = first*ratio^(i-1), i >= start")
    s.set_defaults(func=cmd_moran)

    s = sub.add_parser("export-svg", parents=[common], help="SVG of a point CSV or a profile CSV")
    s.add_argument("--points")
    s.add_argument("--profile")
    s.add_argument("--x-col", default="t")
    s.add_argument("--y", default="dH")
    s.add_argument("--logx", action="store_true")
    s.set_defaults(func=cmd_export_svg)

    s = sub.add_parser("build", parents=[common], help="emit a construction as points")
    s.add_argument("which", choices=KINDS)
    s.add_argument("--exact", action="store_true")
    s.set_defaults(func=cmd_build)

    s = sub.add_parser("verify", parents=[common], help="run a certification")
    s.add_argument("which", choices=sorted(VERIFIERS))
    s.add_argument("--level", type=_positive_int)
    s.add_argument("--omega", help="JSON list of labels")
    s.add_argument("--pattern", help="'p;q;...' points")
    s.add_argument("--mode", choices=["dense", "allpoints", "both"], default="both")
    s.add_argument("--dim", type=_positive_int, default=1)
    s.add_argument("--s")
    s.add_argument("--t")
    s.add_argument("--target")
    s.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BUDGET_ERRORS as exc:
        print(f"budget exhausted: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except Failed as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_FAILED
    except (ValueError, LookupError, OSError, ArithmeticError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
