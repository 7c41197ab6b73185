"""Homogeneous Cantor sets E({m_k}, {λ_k}) with exact rational endpoints."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from ..euclid_sets import PointCloudSet, WindowGenerator
from ..rational import as_point, sqrt_upper, to_fraction


class InvalidCantor(ValueError):
    pass


@dataclass(frozen=True)
class CantorParams:
    """``m_k`` children of relative length ``λ_k`` at level ``k``.

    A level with ``m_k = 1`` must have ``λ_k = 1`` (an identity level); this
    lets the family ``m_k = k`` start at ``k = 1``.
    """

    m: tuple[int, ...]
    lam: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if len(self.m) != len(self.lam):
            raise InvalidCantor("m and lam differ in length")
        for k, (m, l) in enumerate(zip(self.m, self.lam), start=1):
            if m == 1 and l == 1:
                continue
            if m < 2 or not 0 < l < 1 or m * l >= 1:
                raise InvalidCantor(f"level {k}: need m >= 2, 0 < λ < 1 and mλ < 1")

    @property
    def depth(self) -> int:
        return len(self.m)


def cantor_params(m: Sequence[int], lam: Sequence) -> CantorParams:
    return CantorParams(tuple(int(v) for v in m), tuple(to_fraction(v) for v in lam))


def power_family(s, K: int) -> CantorParams:
    """``m_k = k`` and ``λ_k = k^{-1/s}`` for ``k = 1..K`` (exact when ``1/s`` is an integer)."""
    s = to_fraction(s)
    inv = 1 / s
    lam = []
    for k in range(1, K + 1):
        if inv.denominator == 1:
            lam.append(Fraction(1, k ** int(inv)))
        else:
            lam.append(to_fraction(k ** (-float(inv))))
    return CantorParams(tuple(range(1, K + 1)), tuple(lam))


def ternary(K: int) -> CantorParams:
    return CantorParams((2,) * K, (Fraction(1, 3),) * K)


def _children(left: Fraction, length: Fraction, m: int, lam: Fraction) -> list[Fraction]:
    child = length * lam
    if m == 1:
        return [left]
    step = (length - child) / (m - 1)
    return [left + j * step for j in range(m)]


def cantor_build(p: CantorParams, K: int | None = None) -> tuple[list[Fraction], Fraction]:
    """Left endpoints of the level-``K`` intervals and their common length."""
    K = p.depth if K is None else K
    lefts, length = [Fraction(0)], Fraction(1)
    for k in range(K):
        m, lam = p.m[k], p.lam[k]
        lefts = [c for L in lefts for c in _children(L, length, m, lam)]
        length *= lam
    return lefts, length


def check_alignment(p: CantorParams, K: int | None = None) -> None:
    """Children share the parent's left end and right end and are equally spaced."""
    K = p.depth if K is None else K
    lefts, length = [Fraction(0)], Fraction(1)
    for k in range(K):
        m, lam = p.m[k], p.lam[k]
        child = length * lam
        new = []
        for L in lefts:
            kids = _children(L, length, m, lam)
            if kids[0] != L or kids[-1] + child != L + length:
                raise AssertionError(f"level {k + 1}: children not aligned with parent {L}")
            gaps = {b - a for a, b in zip(kids, kids[1:])}
            if len(gaps) > 1:
                raise AssertionError(f"level {k + 1}: unequal spacing")
            new.extend(kids)
        lefts, length = new, child


@dataclass(frozen=True)
class CantorDimension:
    values: list[float]
    value: float
    gap_ratios: list[Fraction | float]


def cantor_dimension(p: CantorParams, K: int | None = None, s=None) -> CantorDimension:
    """``log ∏ m_i / -log ∏ λ_i`` for ``k = 1..K``; the reported value is the minimum
    over the deepest half (identity levels give no value).

    With ``s`` given, also the gap ratios ``(k - 1)/(k^{1/s} - k)`` for ``k = 2..K``.
    """
    K = p.depth if K is None else K
    if K < 2:
        raise ValueError("need K >= 2")
    vals = []
    lm, ll = 0.0, 0.0
    for k in range(K):
        lm += math.log(p.m[k])
        ll -= math.log(float(p.lam[k]))
        vals.append(lm / ll if ll > 0 else float("nan"))
    finite = [v for v in vals if not math.isnan(v)]
    tail = finite[len(finite) // 2 :]
    gaps: list = []
    if s is not None:
        inv = 1 / to_fraction(s)
        for k in range(2, K + 1):
            if inv.denominator == 1:
                gaps.append(Fraction(k - 1, k ** int(inv) - k))
            else:
                gaps.append((k - 1) / (k ** float(inv) - k))
    return CantorDimension(vals, min(tail), gaps)


def gap_ratio(s, k: int):
    """``(k - 1)/(k^{1/s} - k)``, exact when ``1/s`` is an integer."""
    inv = 1 / to_fraction(s)
    if inv.denominator == 1:
        return Fraction(k - 1, k ** int(inv) - k)
    return (k - 1) / (k ** float(inv) - k)


class CantorGenerator(WindowGenerator):
    """``E_K`` as points.

    In dimension one the points are the interval endpoints (resolution half
    the interval length); in dimension ``d`` the product of the per-axis
    interval midpoints (resolution ``√d`` times half the length).
    """

    def __init__(self, p: CantorParams, dim: int = 1, scale=1, offset=None):
        self.p = p
        self.dim = dim
        self.scale = to_fraction(scale)
        self.offset = (Fraction(0),) * dim if offset is None else as_point(offset, dim)
        self.frame = Fraction(1)
        self.default_depth = p.depth
        self.max_depth = p.depth

    def _length(self, depth: int) -> Fraction:
        return math.prod(self.p.lam[:depth], start=Fraction(1))

    def resolution(self, depth: int) -> Fraction:
        half = self.scale * self._length(depth) / 2
        if self.dim == 1:
            return half
        return sqrt_upper(Fraction(self.dim)) * half

    def _axis_points(self, depth: int, lo: Fraction, hi: Fraction, axis: int) -> list[Fraction]:
        o, sc = self.offset[axis], self.scale
        out = []

        def rec(k: int, L: Fraction, length: Fraction) -> None:
            a, b = o + sc * L, o + sc * (L + length)
            if b < lo or a > hi:
                return
            if k == depth:
                if self.dim == 1:
                    out.extend(v for v in (a, b) if lo <= v <= hi)
                else:
                    mid = (a + b) / 2
                    if lo <= mid <= hi:
                        out.append(mid)
                return
            m, lam = self.p.m[k], self.p.lam[k]
            for c in _children(L, length, m, lam):
                rec(k + 1, c, length * lam)

        rec(0, Fraction(0), Fraction(1))
        return out

    def window(self, center, halfwidth, depth=None):
        depth = self.default_depth if depth is None else depth
        c = as_point(center, self.dim)
        h = to_fraction(halfwidth)
        axes = [self._axis_points(depth, c[i] - h, c[i] + h, i) for i in range(self.dim)]
        if any(not a for a in axes):
            return None
        pts = tuple(sorted(set(itertools.product(*axes))))
        return PointCloudSet(self.dim, pts, self.resolution(depth))
