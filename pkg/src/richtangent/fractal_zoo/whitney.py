"""Dyadic Whitney cubes of ``[-1, 1]^d ∖ F`` and gluing of small copies of a set K into them."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ..euclid_sets import PointCloudSet, WindowGenerator
from ..rational import as_point, sqrt_upper, to_fraction


class DecompositionBudget(RuntimeError):
    pass


@dataclass(frozen=True)
class WhitneyCube:
    lo: tuple[Fraction, ...]
    side: Fraction
    dist_sq: Fraction

    @property
    def center(self) -> tuple[Fraction, ...]:
        return tuple(v + self.side / 2 for v in self.lo)

    def diam_sq(self) -> Fraction:
        return len(self.lo) * self.side**2


def _box_dist_sq(lo, side, pts) -> Fraction:
    best = None
    for p in pts:
        s = Fraction(0)
        for a, v in zip(lo, p):
            if v < a:
                s += (a - v) ** 2
            elif v > a + side:
                s += (v - a - side) ** 2
        if best is None or s < best:
            best = s
    return best


def whitney_cubes(F: PointCloudSet, depth: int, budget: int = 200_000) -> list[WhitneyCube]:
    """Top-down dyadic decomposition of ``[-1, 1]^d`` down to side ``2^{-depth}``.

    A cube is accepted when ``diam <= dist(Q, F)``; otherwise it is split.
    Every accepted cube whose parent was split satisfies
    ``dist(Q, F) <= 4 diam(Q)``; accepted root cubes that miss this (far from
    F) are dropped.  Cubes still unresolved at the last level are left out.
    """
    if not F.points:
        raise ValueError("F is empty")
    d = F.dim
    if d > 2:
        raise ValueError("Whitney decomposition is restricted to d <= 2")
    pts = F.points
    side = Fraction(1)
    stack = []
    for idx in range(2**d):
        lo = tuple(Fraction(-1) + side * ((idx >> i) & 1) for i in range(d))
        stack.append((lo, side, 0))
    out = []
    visited = 0
    while stack:
        lo, side, k = stack.pop()
        visited += 1
        if visited > budget:
            raise DecompositionBudget(f"more than {budget} cubes visited")
        dist_sq = _box_dist_sq(lo, side, pts)
        diam_sq = d * side**2
        if diam_sq <= dist_sq:
            if dist_sq <= 16 * diam_sq:
                out.append(WhitneyCube(lo, side, dist_sq))
            elif k > 0:
                raise AssertionError("accepted child violates dist <= 4 diam")
            continue
        if k == depth:
            continue
        half = side / 2
        for idx in range(2**d):
            child = tuple(v + half * ((idx >> i) & 1) for i, v in enumerate(lo))
            stack.append((child, half, k + 1))
    out.sort(key=lambda c: (c.lo, c.side))
    return out


def check_sandwich(cubes) -> None:
    for c in cubes:
        if not c.diam_sq() <= c.dist_sq <= 16 * c.diam_sq():
            raise AssertionError(f"cube at {c.lo} fails diam <= dist <= 4 diam")


class WhitneyGlue(WindowGenerator):
    """``F ∪ ⋃ (x_Q + diam(Q)/5 · K)`` over the Whitney cubes, ``K ⊂ [-1, 1]^d``.

    ``diam(Q)/5`` is carried as a rational upper bound of ``√d·side/5``.
    """

    def __init__(self, F: PointCloudSet, K: WindowGenerator, depth: int, budget: int = 200_000):
        if K.dim != F.dim:
            raise ValueError("K and F differ in dimension")
        self.F, self.K = F, K
        self.dim = F.dim
        self.frame = Fraction(1)
        self.cubes = whitney_cubes(F, depth, budget)
        check_sandwich(self.cubes)
        root_d = sqrt_upper(Fraction(self.dim))
        self.copies = [(c.center, root_d * c.side / 5) for c in self.cubes]
        self.max_depth = K.max_depth
        self.default_depth = K.default_depth
        self.whitney_depth = depth
        self._root_d = root_d

    def resolution(self, depth: int) -> Fraction:
        # unresolved cubes at the last level have side 2^{-depth} and touch F's neighbourhood
        gap = self._root_d * Fraction(2, 2**self.whitney_depth)
        scale = max((s for _, s in self.copies), default=Fraction(0))
        return max(gap, scale * self.K.resolution(depth))

    def window(self, center, halfwidth, depth=None):
        depth = self.default_depth if depth is None else depth
        c = as_point(center, self.dim)
        h = to_fraction(halfwidth)
        pts = {p for p in self.F.points if all(abs(a - b) <= h for a, b in zip(p, c))}
        for x, s in self.copies:
            if any(abs(a - b) > h + s for a, b in zip(x, c)):
                continue
            local = self.K.window(tuple((a - b) / s for a, b in zip(c, x)), h / s, depth)
            if local is not None:
                pts.update(tuple(b + s * v for b, v in zip(x, q)) for q in local.points)
        if not pts:
            return None
        return PointCloudSet(self.dim, tuple(sorted(pts)), self.resolution(depth))


def default_k(dim: int = 1, depth: int = 1) -> WindowGenerator:
    """A short prefix of K_∞ on the default C₀ data."""
    from .c0 import default_c0_params
    from .ifs import build_kinf, make_ifs

    return build_kinf(make_ifs(default_c0_params(3, dim), "kinf"), depth)


def whitney_glue(F: PointCloudSet, K: WindowGenerator | None = None, depth: int = 6, budget: int = 200_000) -> WhitneyGlue:
    return WhitneyGlue(F, default_k(F.dim) if K is None else K, depth, budget)
