"""Compact sets of any dimension ``s ∈ [0, d]`` at whose every point ``{0}`` is a tangent.

``s = 0``: a finite set.  ``0 < s < d``: the ``d``-fold product of the
power-law Cantor set with per-axis parameter ``s/d``.  ``s = d``: the union
``{0} ∪ ⋃ (2^{-n²} e₁ + n 2^{-n²} E_n)`` with ``dim E_n = s_n = d·n/(n+1)``.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from ..euclid_sets import FiniteSetGenerator, PointCloudSet, WindowGenerator, tangent_photograph_scan
from ..rational import as_point, sqrt_upper, to_fraction
from .cantor import CantorGenerator, CantorParams, cantor_build, power_family


class UnionGenerator(WindowGenerator):
    """``{0} ∪ ⋃_{n<=N} (a_n e₁ + λ_n E_n)`` for scaled Cantor pieces."""

    def __init__(self, pieces: Sequence[CantorGenerator], tail_reach: Fraction, dim: int):
        self.pieces = list(pieces)
        self.a = [p.offset[0] for p in self.pieces]
        self.dim = dim
        self.frame = Fraction(1)
        self.tail_reach = tail_reach
        self.default_depth = min(p.default_depth for p in self.pieces)
        self.max_depth = self.default_depth

    def resolution(self, depth: int) -> Fraction:
        res = max(p.resolution(min(depth, p.max_depth)) for p in self.pieces)
        tail = self.tail_reach if self.dim == 1 else sqrt_upper(Fraction(self.dim)) * self.tail_reach
        return max(res, tail)

    def window(self, center, halfwidth, depth=None):
        depth = self.default_depth if depth is None else depth
        c = as_point(center, self.dim)
        h = to_fraction(halfwidth)
        pts = set()
        if all(abs(v) <= h for v in c):
            pts.add((Fraction(0),) * self.dim)
        for p in self.pieces:
            w = p.window(c, h, min(depth, p.max_depth))
            if w is not None:
                pts.update(w.points)
        if not pts:
            return None
        return PointCloudSet(self.dim, tuple(sorted(pts)), self.resolution(depth))


def zero_tangent_construction(s, d: int = 1, depth: int = 5, pieces: int = 4) -> WindowGenerator:
    """Generator for the dimension-``s`` set; ``depth`` is the Cantor depth,
    ``pieces`` the number of union pieces when ``s = d``."""
    s = to_fraction(s)
    if not 0 <= s <= d:
        raise ValueError("need 0 <= s <= d")
    if s == 0:
        pts = [(Fraction(0),) * d, (Fraction(1, 2),) + (Fraction(0),) * (d - 1)]
        return FiniteSetGenerator(PointCloudSet.from_points(pts, d))
    if s < d:
        return CantorGenerator(power_family(s / d, depth), d)
    gens = []
    for n in range(1, pieces + 1):
        a = Fraction(1, 2 ** (n * n))
        sn = Fraction(n, n + 1)  # per-axis dimension of E_n, so dim E_n = d·n/(n+1)
        off = (a,) + (Fraction(0),) * (d - 1)
        gens.append(CantorGenerator(power_family(sn, depth), d, scale=n * a, offset=off))
    n = pieces + 1
    tail = Fraction(1, 2 ** (n * n)) * (n + 1)
    return UnionGenerator(gens, tail, d)


def cantor_scan_scales(p: CantorParams, levels: Sequence[int]) -> list[Fraction]:
    """Scales between a level-``k`` interval length ``ℓ_k`` and the smallest
    level-``k`` gap ``g_k``: ``t_k = (ℓ_k + g_k)/2``.

    The cube ``Q(x, t_k)`` then meets only the interval holding ``x``, so the
    zoom lies within ``ℓ_k/t_k`` of the origin on every axis.
    """
    out = []
    for k in levels:
        lefts, ell = cantor_build(p, k)
        gaps = [b - (a + ell) for a, b in zip(lefts, lefts[1:])]
        if not gaps:
            raise ValueError(f"level {k} has a single interval")
        g = min(gaps)
        if g <= ell:
            raise ValueError(f"level {k}: gap {g} does not exceed length {ell}")
        out.append((ell + g) / 2)
    return out


def union_scan_scales(levels: Sequence[int]) -> list[Fraction]:
    """``t_n = 2^{-(n² + n)}`` sits between piece ``n`` (starting at ``2^{-n²}``)
    and everything beyond it (ending near ``(n + 2) 2^{-(n+1)²}``)."""
    return [Fraction(1, 2 ** (n * n + n)) for n in levels]


def zero_tangent_scan(gen: WindowGenerator, x, levels: Sequence[int], depth: int | None = None):
    """``d_H(T_{x,t}(E), {0})`` along the construction scales of ``gen``."""
    F = PointCloudSet.from_points([(0,) * gen.dim], gen.dim)
    x = as_point(x, gen.dim)
    if isinstance(gen, FiniteSetGenerator):
        ts = [Fraction(1, 4 * 2**k) for k in levels]
    elif isinstance(gen, CantorGenerator):
        ts = [gen.scale * t for t in cantor_scan_scales(gen.p, levels)]
    elif isinstance(gen, UnionGenerator):
        if all(v == 0 for v in x):
            ts = union_scan_scales(levels)
        else:
            host = [p for p in gen.pieces if p.window(x, 0) is not None]
            if not host:
                raise ValueError("point lies in no piece")
            ts = [host[0].scale * t for t in cantor_scan_scales(host[0].p, levels)]
    else:
        raise TypeError(f"no construction scales for {type(gen).__name__}")
    return tangent_photograph_scan(gen, x, F, ts, depth=depth)
