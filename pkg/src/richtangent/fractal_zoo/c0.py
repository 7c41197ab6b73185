"""C₀ = {0} ∪ ⋃ γ̃_n with γ̃_n = a_n e₁ + λ_n γ_n, a countable set clustering only at 0."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from ..euclid_sets import PointCloudSet, WindowGenerator, hausdorff_distance, within, zoom
from ..rational import as_point, sqrt_upper, to_fraction
from .common import ConditionViolation, cycle, kplus_patterns

Point = tuple[Fraction, ...]


@dataclass(frozen=True)
class C0Params:
    """Positions ``a``, sizes ``lam`` and patterns, all indexed from n = 1.

    ``a`` and ``lam`` carry one entry more than ``gammas`` so the size of the
    omitted tail is known.
    """

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


def default_c0_params(levels: int, dim: int = 1, patterns=None) -> C0Params:
    """``a_n = 2^{-n²}``, ``λ_n = n a_n`` with patterns cycling through ``patterns``
    (default: the grid patterns of K₀⁺ with denominator 2)."""
    pats = kplus_patterns(dim) if patterns is None else [tuple(sorted(as_point(p, dim) for p in g)) for g in patterns]
    a = tuple(Fraction(1, 2 ** (n * n)) for n in range(1, levels + 2))
    lam = tuple(n * a[n - 1] for n in range(1, levels + 2))
    return C0Params(a, lam, tuple(cycle(pats, levels)))


def check_c0(p: C0Params) -> dict:
    """Conditions (1)-(3) on the prefix plus the K₀⁺ requirements on the patterns."""
    if len(p.a) != p.levels + 1 or len(p.lam) != p.levels + 1:
        raise ConditionViolation("lengths", 0, "a and lam need levels + 1 entries")
    zero = (Fraction(0),) * p.dim
    for n, g in enumerate(p.gammas, start=1):
        if zero not in g:
            raise ConditionViolation("0 in γ", n)
        if any(x[0] < 0 or any(abs(c) > 1 for c in x) for x in g):
            raise ConditionViolation("γ in K0+", n)
    if p.a[0] + p.lam[0] > 1:
        raise ConditionViolation("(1)", 1, f"a_1 + λ_1 = {p.a[0] + p.lam[0]}")
    for n in range(1, len(p.a)):
        if not p.a[n] + p.lam[n] < p.a[n - 1] / n:
            raise ConditionViolation("(2)", n, f"a_{n + 1} + λ_{n + 1} >= a_{n}/{n}")
    ratios = [a / l for a, l in zip(p.a, p.lam)]
    for n in range(1, len(ratios)):
        if not ratios[n] < ratios[n - 1]:
            raise ConditionViolation("(3)", n + 1, "a_n/λ_n is not decreasing on the prefix")
    return {
        "cond1": str(p.a[0] + p.lam[0]),
        "cond2": [(str(p.a[n] + p.lam[n]), str(p.a[n - 1] / n)) for n in range(1, len(p.a))],
        "ratios": [str(r) for r in ratios],
    }


class C0Generator(WindowGenerator):
    """Depth ``N`` emits ``{0} ∪ γ̃_1 ∪ ... ∪ γ̃_N``."""

    def __init__(self, params: C0Params):
        check_c0(params)
        self.params = params
        self.dim = params.dim
        self.frame = Fraction(1)
        self.max_depth = params.levels
        self.default_depth = params.levels
        self._pieces = [params.piece(n) for n in range(1, params.levels + 1)]
        self._root_d = sqrt_upper(Fraction(self.dim))

    def resolution(self, depth: int) -> Fraction:
        # every later piece lies in the cube of half-width a_{N+1} + λ_{N+1} at 0
        t = self.params.a[depth] + self.params.lam[depth]
        return t if self.dim == 1 else self._root_d * t

    def window(self, center, halfwidth, depth=None):
        depth = self.default_depth if depth is None else depth
        c = as_point(center, self.dim)
        h = to_fraction(halfwidth)
        pts = [(Fraction(0),) * self.dim]
        for piece in self._pieces[:depth]:
            pts.extend(piece)
        pts = [p for p in pts if all(abs(x - y) <= h for x, y in zip(p, c))]
        if not pts:
            return None
        return PointCloudSet(self.dim, tuple(sorted(set(pts))), self.resolution(depth))


def build_c0(params: C0Params) -> tuple[C0Generator, dict]:
    report = check_c0(params)
    return C0Generator(params), report


def c0_tangent_profile(gen: C0Generator, levels: Sequence[int] | None = None) -> list[dict]:
    """``d_H(T_{0, t_n}(C₀), γ_n)`` at ``t_n = a_n + λ_n`` against ``d·a_n/t_n`` plus slack."""
    p = gen.params
    depth = gen.default_depth
    rows = []
    for n in levels or range(1, depth + 1):
        t = p.a[n - 1] + p.lam[n - 1]
        Z = zoom(gen, (0,) * gen.dim, t, depth=depth)
        h = hausdorff_distance(Z, PointCloudSet.from_points(p.gammas[n - 1], gen.dim))
        bound = gen.dim * p.a[n - 1] / t
        slack = gen.resolution(depth) / t
        rows.append(
            {
                "n": n,
                "t": t,
                "dH": h.value,
                "bound": float(bound),
                "slack": float(slack),
                "pass": within(h, bound + slack),
            }
        )
    return rows
