"""The ultrametric-style product space Σ = ∏ γ(n) truncated at depth N.

Points are words ``ω = (ω(1), ..., ω(N))`` with ``ω(n)`` a label of ``γ(n)``.
The distance is ``max_n ρ(n) d_γ(n)(ω(n), ω'(n))`` where ``ρ(n) = r_1···r_n``;
because ``r_{n+1} < δ_n`` this equals the term at the first differing level.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .gromov_hausdorff import Correspondence, gh_exact
from .metric_core import (
    FiniteMetricSpace,
    RationalSpaceEnumerator,
    enumerate_rational_spaces,
    zoom_ball,
)
from .rational import format_fraction, to_fraction

__all__ = [
    "InvalidSchedule",
    "BudgetExceeded",
    "NoWitnessAtDepth",
    "LengthMismatch",
    "ScaleSchedule",
    "RULES",
    "make_schedule",
    "default_schedule",
    "build_sigma",
    "sigma_distance",
    "sigma_distance_maxform",
    "TangentReport",
    "verify_sigma_tangent",
    "doubling_witness",
    "minkowski_quotients",
]

DEFAULT_POINT_BUDGET = 4096


class InvalidSchedule(ValueError):
    pass


class BudgetExceeded(RuntimeError):
    pass


class NoWitnessAtDepth(LookupError):
    pass


class LengthMismatch(ValueError):
    pass


def _rule_default(n: int, delta_prev: Fraction, r_prev: Fraction, gamma: FiniteMetricSpace) -> Fraction:
    # min(δ_{n-1}, 2^{-n+1}) / 2, additionally capped at r_{n-1}/2 to keep r_n decreasing
    return min(delta_prev, Fraction(1, 2 ** (n - 1)), r_prev) / 2


def _rule_halve(n, delta_prev, r_prev, gamma):
    return delta_prev / 2


def _rule_minkowski(n, delta_prev, r_prev, gamma):
    # r_n <= (#γ(n))^{-n}, which forces lower Minkowski dimension 0
    cap = Fraction(1, len(gamma) ** n) if len(gamma) > 1 else Fraction(1)
    return min(delta_prev / 2, r_prev / 2, cap)


RULES: dict[str, Callable] = {
    "default": _rule_default,
    "halve": _rule_halve,
    "minkowski": _rule_minkowski,
}


@dataclass(frozen=True)
class ScaleSchedule:
    """The levels ``γ(n)`` with ``δ_n``, ``r_n`` and ``ρ(n)`` (index 0 is level 1)."""

    gammas: tuple[FiniteMetricSpace, ...]
    deltas: tuple[Fraction, ...]
    rs: tuple[Fraction, ...]
    rhos: tuple[Fraction, ...]
    rule: str = "custom"

    def __post_init__(self) -> None:
        n = len(self.gammas)
        if not (len(self.deltas) == len(self.rs) == len(self.rhos) == n) or n == 0:
            raise InvalidSchedule("schedule sequences must be non-empty and of equal length")
        for i, g in enumerate(self.gammas):
            if g.diam > 1:
                raise InvalidSchedule(f"γ({i + 1}) has diameter {g.diam} > 1")
            if self.deltas[i] != _delta(g):
                raise InvalidSchedule(f"δ_{i + 1} is not the minimum distance of γ({i + 1})")
        if self.rs[0] != 1:
            raise InvalidSchedule("r_1 must equal 1")
        for i in range(1, n):
            if not self.rs[i] < self.deltas[i - 1]:
                raise InvalidSchedule(f"r_{i + 1} = {self.rs[i]} is not below δ_{i} = {self.deltas[i - 1]}")
            if not 0 < self.rs[i] < self.rs[i - 1]:
                raise InvalidSchedule(f"r_{i + 1} does not decrease")
        rho = Fraction(1)
        for i in range(n):
            rho *= self.rs[i]
            if self.rhos[i] != rho:
                raise InvalidSchedule(f"ρ({i + 1}) is not the product r_1···r_{i + 1}")

    @property
    def depth(self) -> int:
        return len(self.gammas)

    def r(self, n: int) -> Fraction:
        """``r_n`` with 1-based ``n``."""
        return self.rs[n - 1]

    def rho(self, n: int) -> Fraction:
        return self.rhos[n - 1] if n >= 1 else Fraction(1)

    def to_json(self) -> dict:
        return {
            "gammas": [[[format_fraction(v) for v in row] for row in g.dist] for g in self.gammas],
            "rs": [format_fraction(r) for r in self.rs],
            "rule": self.rule,
        }


def _delta(g: FiniteMetricSpace) -> Fraction:
    # a singleton has no pairs; 1 keeps r_{n+1} < δ_n meaningful
    m = g.min_positive_distance()
    return Fraction(1) if m is None else m


def make_schedule(gammas: Sequence[FiniteMetricSpace], rule: str | Sequence = "default") -> ScaleSchedule:
    """Schedule from explicit levels, using a named rule or an explicit ``r`` list."""
    gammas = tuple(gammas)
    deltas = tuple(_delta(g) for g in gammas)
    if isinstance(rule, str):
        try:
            fn = RULES[rule]
        except KeyError:
            raise InvalidSchedule(f"unknown rule {rule!r}; choose from {sorted(RULES)}") from None
        rs = [Fraction(1)]
        for n in range(2, len(gammas) + 1):
            rs.append(fn(n, deltas[n - 2], rs[-1], gammas[n - 1]))
        name = rule
    else:
        rs = [to_fraction(r) for r in rule]
        name = "custom"
    rhos, rho = [], Fraction(1)
    for r in rs:
        rho *= r
        rhos.append(rho)
    return ScaleSchedule(gammas, deltas, tuple(rs), tuple(rhos), name)


def default_schedule(depth: int, enumerator: RationalSpaceEnumerator | None = None, rule: str = "default") -> ScaleSchedule:
    e = enumerator if enumerator is not None else RationalSpaceEnumerator(max_points=3, max_denominator=2)
    return make_schedule(enumerate_rational_spaces(e, depth), rule)


def _check_word(word: Sequence, schedule: ScaleSchedule) -> tuple:
    word = tuple(word)
    if not word:
        raise LengthMismatch("words must have length >= 1")
    if len(word) > schedule.depth:
        raise InvalidSchedule("word longer than the schedule")
    for n, lab in enumerate(word):
        schedule.gammas[n].index(lab)
    return word


def sigma_distance(w1: Sequence, w2: Sequence, schedule: ScaleSchedule) -> Fraction:
    """Closed form: ``ρ(n) d_γ(n)(ω(n), ω'(n))`` at the first differing level ``n``."""
    if len(w1) != len(w2):
        raise LengthMismatch(f"word lengths {len(w1)} and {len(w2)} differ")
    w1, w2 = _check_word(w1, schedule), _check_word(w2, schedule)
    for n, (a, b) in enumerate(zip(w1, w2)):
        if a != b:
            return schedule.rhos[n] * schedule.gammas[n].d(a, b)
    return Fraction(0)


def sigma_distance_maxform(w1: Sequence, w2: Sequence, schedule: ScaleSchedule) -> Fraction:
    if len(w1) != len(w2):
        raise LengthMismatch(f"word lengths {len(w1)} and {len(w2)} differ")
    return max(schedule.rhos[n] * schedule.gammas[n].d(a, b) for n, (a, b) in enumerate(zip(w1, w2)))


def build_sigma(schedule: ScaleSchedule, N: int, budget: int = DEFAULT_POINT_BUDGET) -> FiniteMetricSpace:
    """``Σ_N = γ(1) × ... × γ(N)`` with the Σ metric; labels are words."""
    if not 1 <= N <= schedule.depth:
        raise InvalidSchedule(f"depth {N} outside 1..{schedule.depth}")
    size = math.prod(len(g) for g in schedule.gammas[:N])
    if size > budget:
        raise BudgetExceeded(f"Σ_{N} has {size} points, budget is {budget}")
    words = list(itertools.product(*(g.labels for g in schedule.gammas[:N])))
    # per-level tables of ρ(n) d_γ(n), indexed by label positions
    tables = [
        [[schedule.rhos[n] * v for v in row] for row in schedule.gammas[n].dist] for n in range(N)
    ]
    pos = [[schedule.gammas[n].index(w[n]) for n in range(N)] for w in words]
    zero = Fraction(0)
    rows = []
    for a in range(size):
        pa = pos[a]
        row = []
        for b in range(size):
            pb = pos[b]
            v = zero
            for n in range(N):
                if pa[n] != pb[n]:
                    v = tables[n][pa[n]][pb[n]]
                    break
            row.append(v)
        rows.append(tuple(row))
    return FiniteMetricSpace(tuple(words), tuple(rows))


@dataclass(frozen=True)
class TangentReport:
    level: int
    gh_value: Fraction
    bound: Fraction
    exact: bool
    passed: bool
    ball_size: int
    target_gap: Fraction | None = None

    def as_row(self) -> dict:
        return {
            "level": self.level,
            "gh_value": float(self.gh_value),
            "bound": float(self.bound),
            "exact": self.exact,
            "pass": self.passed,
            "ball_size": self.ball_size,
        }


def _tail(schedule: ScaleSchedule, start: int, N: int) -> tuple:
    """Fixed tail α: the first label at every level ``start..N`` (1-based)."""
    return tuple(schedule.gammas[m - 1].labels[0] for m in range(start, N + 1))


def verify_sigma_tangent(
    schedule: ScaleSchedule,
    N: int,
    omega: Sequence,
    n: int,
    target: FiniteMetricSpace | None = None,
    sigma: FiniteMetricSpace | None = None,
    gh_budget: int | None = None,
) -> TangentReport:
    """Check ``d_GH(T_{ω,ρ(n)}(Σ_N), γ(n)) <= r_{n+1}``.

    The search is seeded with the correspondence induced by
    ``x -> ω|_{n-1} x α`` (every ball point paired with its level-``n``
    letter).  With ``target`` the zoom is compared to that space instead and
    the bound becomes ``2 max(r_{n+1}, d_GH(target, γ(n)))``.
    """
    if not 1 <= n < N:
        raise ValueError(f"need 1 <= n < N, got n={n}, N={N}")
    omega = _check_word(omega, schedule)
    if len(omega) != N:
        raise LengthMismatch(f"ω must have length {N}")
    S = sigma if sigma is not None else build_sigma(schedule, N)
    ball = zoom_ball(S, omega, schedule.rho(n))
    gamma = schedule.gammas[n - 1]
    kw = {} if gh_budget is None else {"budget": gh_budget}
    r_next = schedule.r(n + 1)
    if target is None:
        seed = Correspondence.of((i, gamma.index(w[n - 1])) for i, w in enumerate(ball.labels))
        res = gh_exact(ball, gamma, seed=seed, **kw)
        bound = r_next
        gap = None
    else:
        res = gh_exact(ball, target, **kw)
        gap = gh_exact(target, gamma, **kw).value
        bound = 2 * max(r_next, gap)
    return TangentReport(n, res.value, bound, res.exact, res.value <= bound, len(ball), gap)


def _max_far_clique(gamma: FiniteMetricSpace, threshold: Fraction, want: int) -> list | None:
    idx = range(len(gamma))
    for combo in itertools.combinations(idx, want):
        if all(gamma.dist[a][b] > threshold for a, b in itertools.combinations(combo, 2)):
            return list(combo)
    return None


def doubling_witness(schedule: ScaleSchedule, N: int, omega: Sequence, M: int) -> tuple[Fraction, list]:
    """Scale ``t`` and ``M + 1`` words in ``B(ω, t)`` pairwise more than ``3/4·t`` apart.

    Searches levels ``1..N`` in order for ``M + 1`` points of ``γ(n)`` with
    mutual distance above ``3/4``; the witnesses are ``ω|_{n-1} x α``.
    """
    omega = _check_word(omega, schedule)
    three_quarters = Fraction(3, 4)
    for n in range(1, N + 1):
        gamma = schedule.gammas[n - 1]
        if len(gamma) < M + 1:
            continue
        combo = _max_far_clique(gamma, three_quarters, M + 1)
        if combo is None:
            continue
        tail = _tail(schedule, n + 1, N)
        pts = [omega[: n - 1] + (gamma.labels[c],) + tail for c in combo]
        return schedule.rho(n), pts
    raise NoWitnessAtDepth(f"no level up to {N} has {M + 1} points pairwise > 3/4 apart")


def minkowski_quotients(schedule: ScaleSchedule, N: int) -> list[dict]:
    """Covering-number quotients ``log N(Σ, ρ(n)) / -log ρ(n)`` for ``n < N``.

    A ball of radius ``ρ(n)`` covers its whole ``(n-1)``-cylinder, so
    ``N(Σ, ρ(n)) <= ∏_{i<n} #γ(i)``; alongside we report the bound
    ``log ∏_{i<=n} #γ(i) / log ∏_{i<=n} (#γ(i))^i`` valid when
    ``r_n <= (#γ(n))^{-n}``.
    """
    out = []
    for n in range(1, N):
        rho = schedule.rho(n)
        cover = math.prod(len(g) for g in schedule.gammas[: n - 1])
        num = sum(math.log(len(g)) for g in schedule.gammas[:n])
        den = sum(i * math.log(len(g)) for i, g in enumerate(schedule.gammas[:n], start=1))
        quotient = math.log(cover) / -math.log(rho) if rho < 1 else 0.0
        bound = num / den if den > 0 else float("nan")
        out.append({"n": n, "cover_count": cover, "quotient": quotient, "bound": bound})
    return out
