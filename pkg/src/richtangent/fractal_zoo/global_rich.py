"""Globally rich sets: A = ⋃ (a_n e₁ + λ_n γ_n) with a_n ↗ ∞, and the composite
that replaces every point of A by a small copy of a locally rich set."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from ..euclid_sets import BudgetExceeded, PointCloudSet, WindowGenerator, hausdorff_distance, within, zoom
from ..rational import as_point, sq_norm, sqrt_lower, sqrt_upper, sub, to_fraction
from .common import ConditionViolation, cycle, kplus_patterns

Point = tuple[Fraction, ...]


@dataclass(frozen=True)
class GlobalParams:
    a: tuple[Fraction, ...]
    lam: tuple[Fraction, ...]
    gammas: tuple[tuple[Point, ...], ...]

    @property
    def dim(self) -> int:
        return len(self.gammas[0][0])

    @property
    def levels(self) -> int:
        return len(self.gammas)

    def piece(self, n: int) -> list[Point]:
        a, lam = self.a[n - 1], self.lam[n - 1]
        return [tuple((a if i == 0 else 0) + lam * c for i, c in enumerate(p)) for p in self.gammas[n - 1]]

    def reach(self, n: int) -> Fraction:
        """Right end ``a_n + λ_n`` of piece ``n`` along e₁ (0 for ``n = 0``)."""
        return self.a[n - 1] + self.lam[n - 1] if n >= 1 else Fraction(0)


def default_global_params(levels: int, dim: int = 1, patterns=None) -> GlobalParams:
    """``a_n = 2^{n²}``, ``λ_n = n a_n``; ``a`` and ``lam`` get one extra entry."""
    pats = kplus_patterns(dim) if patterns is None else [tuple(sorted(as_point(p, dim) for p in g)) for g in patterns]
    a = tuple(Fraction(2 ** (n * n)) for n in range(1, levels + 2))
    lam = tuple(n * a[n - 1] for n in range(1, levels + 2))
    return GlobalParams(a, lam, tuple(cycle(pats, levels)))


def check_global(p: GlobalParams) -> dict:
    """``a_n + λ_n + 1 <= a_{n+1}`` and ``a_n/(a_n + λ_n) <= 1/n`` on the prefix."""
    if len(p.a) != p.levels + 1 or len(p.lam) != p.levels + 1:
        raise ConditionViolation("lengths", 0, "a and lam need levels + 1 entries")
    zero = (Fraction(0),) * p.dim
    for n, g in enumerate(p.gammas, start=1):
        if zero not in g or any(x[0] < 0 or any(abs(c) > 1 for c in x) for x in g):
            raise ConditionViolation("γ in K0+", n)
    rows = []
    for n in range(1, len(p.a) + 1):
        if n < len(p.a) and not p.a[n - 1] + p.lam[n - 1] + 1 <= p.a[n]:
            raise ConditionViolation("(1)", n, f"a_{n} + λ_{n} + 1 > a_{n + 1}")
        q = p.a[n - 1] / (p.a[n - 1] + p.lam[n - 1])
        if not q <= Fraction(1, n):
            raise ConditionViolation("(2)", n, f"a_n/(a_n + λ_n) = {q}")
        rows.append((str(p.a[n - 1] + p.lam[n - 1] + 1), str(p.a[n]) if n < len(p.a) else None, str(q)))
    return {"rows": rows}


class GlobalGenerator(WindowGenerator):
    """``⋃_{n<=N} (a_n e₁ + λ_n γ_n)``, exact.

    Points of piece ``N + 1`` and later start at ``a_{N+1}``; a window reaching
    that far would miss them, so it raises :class:`BudgetExceeded`.
    """

    def __init__(self, params: GlobalParams):
        check_global(params)
        self.params = params
        self.dim = params.dim
        self.max_depth = params.levels
        self.default_depth = params.levels
        self.frame = params.a[params.levels]
        self._pieces = [params.piece(n) for n in range(1, params.levels + 1)]

    def resolution(self, depth: int) -> Fraction:
        return Fraction(0)

    def window(self, center, halfwidth, depth=None):
        depth = self.default_depth if depth is None else depth
        c = as_point(center, self.dim)
        h = to_fraction(halfwidth)
        if c[0] + h >= self.params.a[depth]:
            raise BudgetExceeded(f"window reaches a_{depth + 1}; build more levels")
        pts = [p for piece in self._pieces[:depth] for p in piece if all(abs(x - y) <= h for x, y in zip(p, c))]
        if not pts:
            return None
        return PointCloudSet(self.dim, tuple(sorted(set(pts))), Fraction(0), self.frame)

    def points(self, depth: int | None = None) -> PointCloudSet:
        depth = self.default_depth if depth is None else depth
        pts = {p for piece in self._pieces[:depth] for p in piece}
        return PointCloudSet(self.dim, tuple(sorted(pts)), Fraction(0), self.frame)


def photograph_profile(gen: GlobalGenerator, x=None, levels: Sequence[int] | None = None) -> list[dict]:
    """``d_H(T_{x, t_n}(A), γ_n)`` at ``t_n = a_n + λ_n`` for a point ``x`` of A.

    The bound is ``d·a_n/t_n`` plus ``(√d (a_{n-1} + λ_{n-1}) + |x - a_1 e₁|)/t_n``,
    which accounts for the earlier pieces and for the offset of ``x``.
    """
    p = gen.params
    d = gen.dim
    base = (p.a[0],) + (Fraction(0),) * (d - 1)
    x = base if x is None else as_point(x, d)
    root_d = sqrt_upper(Fraction(d))
    off = sqrt_upper(sq_norm(sub(x, base)))
    rows = []
    for n in levels or range(1, gen.max_depth):
        t = p.reach(n)
        Z = zoom(gen, x, t, depth=gen.max_depth)
        h = hausdorff_distance(Z, PointCloudSet.from_points(p.gammas[n - 1], d))
        bound = d * p.a[n - 1] / t
        slack = (root_d * p.reach(n - 1) + off) / t
        rows.append(
            {"n": n, "t": t, "dH": h.value, "bound": float(bound), "slack": float(slack), "pass": within(h, bound + slack)}
        )
    return rows


def _gamma_sep(g: Sequence[Point]) -> Fraction:
    if len(g) < 2:
        return Fraction(1)
    return min(sq_norm(sub(x, y)) for i, x in enumerate(g) for y in g[i + 1 :])


class CompositeGenerator(WindowGenerator):
    """``⋃_n ⋃_{x ∈ piece n} (x + s_n R)`` with ``s_n = 2^{-n} δ_n / (4d)``.

    ``δ_n`` is a lower bound for the minimal distance inside piece ``n``
    (``λ_n`` for a singleton pattern) and ``R`` a generator living in ``[-1, 1]^d``, so each copy sits
    in the cube of half-width ``s_n`` about its point.
    """

    def __init__(self, base: GlobalGenerator, R: WindowGenerator):
        if R.dim != base.dim:
            raise ValueError("R and A differ in dimension")
        self.base, self.R = base, R
        self.dim = base.dim
        self.frame = base.frame + 1
        self.max_depth = R.max_depth
        self.default_depth = R.default_depth
        p = base.params
        d = self.dim
        self.scales = []
        for n in range(1, p.levels + 1):
            delta = p.lam[n - 1] * _delta_lower(p.gammas[n - 1])
            self.scales.append(delta / (2**n * 4 * d))
        self.copies = [(x, self.scales[n - 1], n) for n in range(1, p.levels + 1) for x in p.piece(n)]

    def resolution(self, depth: int) -> Fraction:
        return max(self.scales) * self.R.resolution(depth)

    def window(self, center, halfwidth, depth=None):
        depth = self.default_depth if depth is None else depth
        c = as_point(center, self.dim)
        h = to_fraction(halfwidth)
        if c[0] + h >= self.base.params.a[self.base.max_depth]:
            raise BudgetExceeded("window reaches past the built levels")
        pts = set()
        for x, s, _ in self.copies:
            if any(abs(a - b) > h + s for a, b in zip(x, c)):
                continue
            local = self.R.window(tuple((a - b) / s for a, b in zip(c, x)), h / s, depth)
            if local is None:
                continue
            for q in local.points:
                pts.add(tuple(b + s * v for b, v in zip(x, q)))
        if not pts:
            return None
        return PointCloudSet(self.dim, tuple(sorted(pts)), self.resolution(depth), self.frame)

    def points(self, depth: int | None = None) -> PointCloudSet:
        depth = self.default_depth if depth is None else depth
        pts = set()
        local = self.R.points(depth)
        for x, s, _ in self.copies:
            pts.update(tuple(b + s * v for b, v in zip(x, q)) for q in local.points)
        return PointCloudSet(self.dim, tuple(sorted(pts)), self.resolution(depth), self.frame)

    def check_disjoint(self) -> int:
        """Exact disjointness of the cubes ``x + s_n [-1, 1]^d``.

        Pairs already separated along e₁ by the sweep are skipped; returns the
        number of pairs that needed the full comparison."""
        boxes = sorted(self.copies, key=lambda b: b[0][0] - b[1])
        checked = 0
        for i, (x, s, n) in enumerate(boxes):
            for y, u, m in boxes[i + 1 :]:
                if y[0] - u > x[0] + s:
                    break
                checked += 1
                if all(abs(a - b) <= s + u for a, b in zip(x, y)):
                    raise ConditionViolation("disjoint copies", n, f"{x} (level {n}) meets {y} (level {m})")
        return checked


def _delta_lower(g: Sequence[Point]) -> Fraction:
    """A rational lower bound for the minimal distance in ``g``."""
    sep = _gamma_sep(g)
    return sep if len(g) < 2 else sqrt_lower(sep)


def global_rich_build(mode: str = "A", depth: int = 5, dim: int = 1, R: WindowGenerator | None = None) -> WindowGenerator:
    """``mode`` is ``"A"`` or ``"composite"``; the composite defaults ``R`` to a πΣ prefix."""
    base = GlobalGenerator(default_global_params(depth, dim))
    if mode == "A":
        return base
    if mode != "composite":
        raise ValueError(f"unknown mode {mode!r}")
    if R is None:
        from ..pisigma import EuclidGammaSequence, build_pisigma

        _, R = build_pisigma(EuclidGammaSequence.from_grid(dim, 2, 2, 3))
    return CompositeGenerator(base, R)
