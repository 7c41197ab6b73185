"""Build a window generator from a JSON-style construction config.

Every config has a ``"kind"``; the remaining keys depend on it::

    {"kind": "points", "path": "cloud.csv"}             or "points": [[0], [1/2]]
    {"kind": "cantor", "family": "ternary", "depth": 9}  or "power" with "s", or "m"/"lam"
    {"kind": "pisigma", "dim": 1, "gamma_denominator": 2, "max_points": 2, "rule_margin": 2, "depth": 4}
    {"kind": "c0", "levels": 6, "dim": 1}
    {"kind": "cinf" | "kinf", "levels": 3, "depth": 2, "dim": 1}
    {"kind": "zero-tangent", "s": "1/2", "dim": 1, "depth": 6, "pieces": 4}
    {"kind": "global", "mode": "A" | "composite", "depth": 5, "dim": 1}
    {"kind": "whitney", "F": [[0]], "depth": 5}
"""

from __future__ import annotations

from pathlib import Path

from .euclid_sets import FiniteSetGenerator, PointCloudSet, WindowGenerator
from .fractal_zoo import (
    CantorGenerator,
    build_c0,
    build_cinf,
    build_kinf,
    cantor_params,
    default_c0_params,
    global_rich_build,
    make_ifs,
    power_family,
    ternary,
    whitney_glue,
    zero_tangent_construction,
)
from .io import read_points_csv
from .pisigma import build_from_config
from .rational import to_fraction

KINDS = ("points", "cantor", "pisigma", "c0", "cinf", "kinf", "zero-tangent", "global", "whitney")


def cantor_from_config(cfg: dict):
    family = cfg.get("family", "explicit" if "m" in cfg else "ternary")
    if family == "ternary":
        return ternary(int(cfg.get("depth", 9)))
    if family == "power":
        return power_family(to_fraction(cfg["s"]), int(cfg.get("depth", 8)))
    return cantor_params(cfg["m"], cfg["lam"])


def load_construction(cfg: dict, base_dir=".", budget_points: int | None = None) -> WindowGenerator:
    kind = cfg.get("kind")
    dim = int(cfg.get("dim", 1))
    if kind == "points":
        if "path" in cfg:
            return FiniteSetGenerator(read_points_csv(Path(base_dir) / cfg["path"]))
        pts = [tuple(to_fraction(v) for v in p) for p in cfg["points"]]
        frame = max([1] + [abs(v) for p in pts for v in p])
        return FiniteSetGenerator(PointCloudSet.from_points(pts, frame=frame))
    if kind == "cantor":
        return CantorGenerator(cantor_from_config(cfg), dim)
    if kind == "pisigma":
        c = dict(cfg)
        if budget_points is not None:
            c["budget_points"] = budget_points
        return build_from_config(c)[2]
    if kind == "c0":
        return build_c0(default_c0_params(int(cfg.get("levels", 6)), dim))[0]
    if kind in ("cinf", "kinf"):
        sys = make_ifs(default_c0_params(int(cfg.get("levels", 3)), dim), "kinf" if kind == "kinf" else "default")
        kw = {} if budget_points is None else {"budget": budget_points}
        build = build_kinf if kind == "kinf" else build_cinf
        return build(sys, int(cfg.get("depth", 2)), **kw)
    if kind == "zero-tangent":
        return zero_tangent_construction(to_fraction(cfg.get("s", "1/2")), dim, int(cfg.get("depth", 6)), int(cfg.get("pieces", 4)))
    if kind == "global":
        return global_rich_build(cfg.get("mode", "A"), int(cfg.get("depth", 5)), dim)
    if kind == "whitney":
        F = PointCloudSet.from_points([tuple(to_fraction(v) for v in p) for p in cfg.get("F", [[0] * dim])])
        return whitney_glue(F, depth=int(cfg.get("depth", 5)))
    raise ValueError(f"unknown construction kind {kind!r}; choose from {', '.join(KINDS)}")
