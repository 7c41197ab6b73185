"""The infinitely generated system behind C_∞ and its dimension-zero variant K_∞.

``f_{n,m}(x) = λ_n δ̃_n ε_n x + ξ_{n,m}`` where the ``ξ_{n,m}`` run over
``γ̃_n``, plus the constant map ``f_{0,1} ≡ 0``.  The alphabet is truncated
at a level cap; the omitted levels only contribute points within
``a_{cap+1} + λ_{cap+1}`` of each cylinder's base point, which is folded
into the resolution tag.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from ..euclid_sets import BudgetExceeded, PointCloudSet, WindowGenerator, hausdorff_distance, zoom
from ..rational import as_point, max_norm, sq_norm, sqrt_lower, sqrt_upper, to_fraction
from .c0 import C0Params, check_c0
from .common import ScheduleViolation

Point = tuple[Fraction, ...]
Letter = tuple[int, int]


def _delta_tilde(gamma: Sequence[Point], dim: int) -> Fraction:
    """Rational lower bound for ``(8√d)^{-1} min |x - y|``; ``1/(8√d)`` for a singleton."""
    if len(gamma) == 1:
        dsq = Fraction(1)
    else:
        dsq = min(sq_norm([a - b for a, b in zip(x, y)]) for x, y in itertools.combinations(gamma, 2))
    return sqrt_lower(dsq) / (8 * sqrt_upper(Fraction(dim)))


@dataclass(frozen=True)
class IfsSystem:
    """Maps ``f_{n,m}`` for ``n <= cap``; ``ratios[n-1]`` is the common ratio of level ``n``."""

    params: C0Params
    eps: tuple[Fraction, ...]
    ratios: tuple[Fraction, ...]
    translations: tuple[tuple[Point, ...], ...]

    @property
    def dim(self) -> int:
        return self.params.dim

    @property
    def cap(self) -> int:
        return len(self.ratios)

    @property
    def letters(self) -> list[Letter]:
        return [(n, m) for n in range(1, self.cap + 1) for m in range(1, len(self.translations[n - 1]) + 1)]

    def ratio(self, letter: Letter) -> Fraction:
        return Fraction(0) if letter[0] == 0 else self.ratios[letter[0] - 1]

    def xi(self, letter: Letter) -> Point:
        if letter[0] == 0:
            return (Fraction(0),) * self.dim
        return self.translations[letter[0] - 1][letter[1] - 1]

    def tail_reach(self) -> Fraction:
        """Max-norm reach of the omitted levels ``n > cap`` around 0."""
        return self.params.a[self.cap] + self.params.lam[self.cap]


def make_ifs(params: C0Params, eps: Sequence | str = "default") -> IfsSystem:
    """``eps="default"`` gives ``ε_n = 2^{-n}``; ``eps="kinf"`` additionally caps
    ``ε_n`` so that ``r_n <= (2 #γ_n)^{-n}``."""
    check_c0(params)
    d = params.dim
    dts = [_delta_tilde(g, d) for g in params.gammas]
    base = [params.lam[n - 1] * dts[n - 1] for n in range(1, params.levels + 1)]
    if isinstance(eps, str):
        es = [Fraction(1, 2**n) for n in range(1, params.levels + 1)]
        if eps == "kinf":
            es = [min(e, Fraction(1, (2 * len(g)) ** n) / b) for n, (e, g, b) in enumerate(zip(es, params.gammas, base), 1)]
        elif eps != "default":
            raise ScheduleViolation(f"unknown eps rule {eps!r}")
    else:
        es = [to_fraction(e) for e in eps]
    if es[0] > Fraction(1, 2) or any(b >= a for a, b in zip(es, es[1:])):
        raise ScheduleViolation("need ε_1 <= 1/2 and ε_n strictly decreasing")
    ratios = tuple(b * e for b, e in zip(base, es))
    trans = tuple(tuple(params.piece(n)) for n in range(1, params.levels + 1))
    return IfsSystem(params, tuple(es), ratios, trans)


def check_disjoint_cylinders(sys: IfsSystem) -> None:
    """First-level images ``f_{n,m}(Q)`` lie in ``Q``, miss 0 and are pairwise
    disjoint; by similarity the same then holds at every level."""
    boxes = [(sys.xi(l), sys.ratio(l)) for l in sys.letters]
    for c, r in boxes:
        if max_norm(c) + r > 1:
            raise ScheduleViolation(f"cube at {c} leaves Q")
        if max_norm(c) <= r:
            raise ScheduleViolation(f"cube at {c} contains 0")
    for (c1, r1), (c2, r2) in itertools.combinations(boxes, 2):
        if max_norm([a - b for a, b in zip(c1, c2)]) <= r1 + r2:
            raise ScheduleViolation(f"cubes at {c1} and {c2} meet")


class IfsGenerator(WindowGenerator):
    """Depth ``k``: ``{0} ∪ {f_w(0) : 1 <= |w| <= k + 1}`` over the capped alphabet.

    ``alphas`` rescales the maps used at each composition position (all 1
    for C_∞, ``α_j = 2^{-j}`` for K_∞).
    """

    def __init__(self, sys: IfsSystem, depth: int = 2, alphas: Sequence | None = None, budget: int = 400_000):
        self.sys = sys
        self.dim = sys.dim
        self.frame = Fraction(1)
        self.default_depth = depth
        self.max_depth = 12
        self.budget = budget
        self.alphas = None if alphas is None else [to_fraction(a) for a in alphas]
        self._root_d = sqrt_upper(Fraction(self.dim))

    def alpha(self, position: int) -> Fraction:
        if self.alphas is None:
            return Fraction(1)
        if position > len(self.alphas):
            raise ValueError("not enough α values for this depth")
        return self.alphas[position - 1]

    def _max_ratio(self, length: int) -> Fraction:
        r = Fraction(1)
        for j in range(1, length + 1):
            r *= self.alpha(j) * max(self.sys.ratios)
        return r

    def resolution(self, depth: int) -> Fraction:
        return self._root_d * max(self._max_ratio(depth + 1), 2 * self.sys.tail_reach())

    def capped_resolution(self, depth: int) -> Fraction:
        """Resolution relative to the attractor of the capped alphabet itself."""
        return self._root_d * self._max_ratio(depth + 1)

    def cylinders(self, center, halfwidth, depth: int):
        """Yield ``(word, f_w(0), r_w)`` for all words whose cube ``f_w(Q)`` meets the window."""
        c = as_point(center, self.dim)
        h = to_fraction(halfwidth)
        letters = self.sys.letters
        count = 0
        zero = (Fraction(0),) * self.dim
        # (word, base point, ratio): f_w(x) = base + ratio * x
        stack = [((), zero, Fraction(1))]
        while stack:
            word, base, ratio = stack.pop()
            if word:
                count += 1
                if count > self.budget:
                    raise BudgetExceeded(f"more than {self.budget} cylinders")
                yield word, base, ratio
            if len(word) == depth + 1:
                continue
            pos = len(word) + 1
            kids = []
            for l in letters:
                r = self.alpha(pos) * self.sys.ratio(l)
                nb = tuple(b + ratio * x for b, x in zip(base, self.sys.xi(l)))
                nr = ratio * r
                if all(abs(u - v) <= h + nr for u, v in zip(nb, c)):
                    kids.append((word + (l,), nb, nr))
            stack.extend(reversed(kids))

    def window(self, center, halfwidth, depth=None):
        depth = self.default_depth if depth is None else depth
        c = as_point(center, self.dim)
        h = to_fraction(halfwidth)
        pts = {b for _, b, _ in self.cylinders(c, h, depth) if all(abs(u - v) <= h for u, v in zip(b, c))}
        zero = (Fraction(0),) * self.dim
        if all(abs(v) <= h for v in c):
            pts.add(zero)
        if not pts:
            return None
        return PointCloudSet(self.dim, tuple(sorted(pts)), self.resolution(depth))

    def base_point(self, word: Sequence[Letter]) -> tuple[Point, Fraction]:
        base, ratio = (Fraction(0),) * self.dim, Fraction(1)
        for pos, l in enumerate(word, start=1):
            base = tuple(b + ratio * x for b, x in zip(base, self.sys.xi(l)))
            ratio *= self.alpha(pos) * self.sys.ratio(l)
        return base, ratio


def build_cinf(sys: IfsSystem, depth: int = 2, budget: int = 400_000) -> IfsGenerator:
    check_disjoint_cylinders(sys)
    return IfsGenerator(sys, depth, budget=budget)


def build_kinf(sys: IfsSystem, depth: int = 2, budget: int = 400_000) -> IfsGenerator:
    check_disjoint_cylinders(sys)
    return IfsGenerator(sys, depth, [Fraction(1, 2**k) for k in range(1, depth + 2)], budget)


def self_similar_zoom_check(gen: IfsGenerator, word: Sequence[Letter], t) -> dict:
    """Compare ``T_{f_w(0), r_w t}(C_∞)`` at depth ``k`` with ``T_{0, t}(C_∞)`` at depth ``k - |w|``.

    For ``0 < t < 1`` both views come from the same cylinders, so the
    distance should vanish.  The slack is relative to the capped attractor,
    for which the identity is exact as well.
    """
    t = to_fraction(t)
    k = gen.default_depth
    if len(word) > k:
        raise ValueError("word longer than the depth")
    x, r = gen.base_point(word)
    A = zoom(gen, x, r * t, depth=k)
    B = zoom(gen, (0,) * gen.dim, t, depth=k - len(word))
    h = hausdorff_distance(A, B)
    slack = gen.capped_resolution(k - len(word)) / t
    return {"word": word, "x": x, "r": r, "dH": h.value, "slack": float(slack), "pass": h.value <= float(slack)}


def finitely_generated_zoom(gen: IfsGenerator, word: Sequence[Letter], t, diam=None) -> dict:
    """For ``x = π(word)`` (word over levels <= N, truncated at the depth) find the
    level ``k`` with ``diam(π[w|k]) <= t < diam(π[w|k-1])`` and register the zoom as
    ``α C_∞ + β`` with ``α = r_{w|k-1}/t``.  Reports ``α·diam`` which lies in
    ``[1, 1/c(N)]`` with ``c(N)`` the least ratio used.
    """
    t = to_fraction(t)
    k0 = gen.default_depth
    word = list(word)[: k0 + 1]
    cloud = gen.points(k0)
    if diam is None:
        arr = cloud.array
        ext = arr[np.unique(np.concatenate([np.argmin(arr, axis=0), np.argmax(arr, axis=0)]))]
        # diameter from the extreme points along each axis (exact in d = 1)
        D = float(max(np.linalg.norm(arr - e, axis=1).max() for e in ext))
    else:
        D = float(diam)
    x, _ = gen.base_point(word)
    k = None
    for j in range(1, len(word) + 1):
        _, rj = gen.base_point(word[:j])
        if float(rj) * D <= float(t):
            k = j
            break
    if k is None:
        raise ValueError("t is below the finest cylinder; raise the depth")
    v = word[: k - 1]
    base, rv = gen.base_point(v)
    alpha = rv / t
    beta = tuple((b - c) / t for b, c in zip(base, x))
    Z = zoom(gen, x, t, depth=k0)
    # α·C_∞ + β restricted to Q, from the generator at the depth left after |v| levels
    W = gen.window(tuple(-b / alpha for b in beta), 1 / alpha, k0 - len(v))
    pts = [tuple(alpha * p + q for p, q in zip(pt, beta)) for pt in W.points]
    pts = [p for p in pts if all(abs(c) <= 1 for c in p)]
    ref = PointCloudSet.from_points(pts, gen.dim)
    h = hausdorff_distance(Z, ref)
    cmin = min(gen.sys.ratio(l) for l in word)
    return {
        "k": k,
        "alpha": float(alpha),
        "alpha_diam": float(alpha) * D,
        "upper": 1 / float(cmin),
        "dH": h.value,
        "slack": float(2 * gen.capped_resolution(k0) / t),
    }


# ---------------------------------------------------------------- cover sums


@dataclass(frozen=True)
class CoverSum:
    k: int
    t: float
    value: float
    closed_form: float
    c_t: float
    log2_value: float


def _level_sum_bound(sys: IfsSystem, t: float, max_size: int) -> float:
    """``c(t)``: ``Σ #γ_n r_n^t`` over the capped levels plus a tail bound using
    ``r_n <= (2 #γ_n)^{-n}`` and ``#γ_n <= max_size``."""
    partial = sum(len(g) * float(r) ** t for g, r in zip(sys.translations, sys.ratios))
    tail = 0.0
    n = sys.cap + 1
    while True:
        term = max_size * (2.0 ** (-n * t)) * (max_size ** max(0.0, 1 - n * t))
        tail += term
        if term < 1e-18 * max(1.0, partial) or n > sys.cap + 10_000:
            # remaining terms decay at least geometrically with ratio 2^{-t}
            tail += term * 2.0 ** (-t) / (1 - 2.0 ** (-t))
            break
        n += 1
    return partial + tail


def check_kinf_schedule(sys: IfsSystem) -> None:
    for n, (g, r) in enumerate(zip(sys.translations, sys.ratios), start=1):
        if r > Fraction(1, (2 * len(g)) ** n):
            raise ScheduleViolation(f"r_{n} = {r} exceeds (2#γ_{n})^-{n}")


def kinf_cover_sum(k: int, t: float, sys: IfsSystem, max_size: int | None = None) -> CoverSum:
    """Cover sum ``(2√d)^t (∏_{i<=k} α_i)^t (Σ_{i∈I} r_i^t)^k`` with ``α_i = 2^{-i}``.

    ``value`` uses ``∏ α_i = 2^{-k(k+1)/2}``; ``closed_form`` evaluates the
    exponent ``-k(k-1)t/2 + k log2 c(t)`` as displayed in the dimension-zero
    argument, which is the larger of the two.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    check_kinf_schedule(sys)
    m = max_size or max(len(g) for g in sys.translations)
    c = _level_sum_bound(sys, t, m)
    pre = t * math.log2(2 * math.sqrt(sys.dim))
    log2_value = pre - k * (k + 1) / 2 * t + k * math.log2(c)
    log2_closed = pre - k * (k - 1) / 2 * t + k * math.log2(c)
    return CoverSum(k, t, 2.0**log2_value, 2.0**log2_closed, c, log2_value)


def predicted_k(t: float, sys: IfsSystem, eps: float = 1e-6, kmax: int = 10_000) -> int:
    """First ``k`` at which the closed form drops below ``eps``."""
    for k in range(1, kmax + 1):
        if kinf_cover_sum(k, t, sys).closed_form < eps:
            return k
    raise ValueError("closed form never drops below eps")
