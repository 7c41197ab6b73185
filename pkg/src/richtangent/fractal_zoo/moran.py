"""Root of the Moran equation ``Σ r_i^s = 1`` for finite or countable ratio lists."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence


class NoConvergence(RuntimeError):
    pass


@dataclass(frozen=True)
class MoranResult:
    s: float
    low: float
    high: float
    residual: float
    trace: list = field(default_factory=list)


def _partial(ratios: Sequence[float], s: float) -> float:
    if s == 0:
        return float(sum(1 for r in ratios if r > 0))
    return math.fsum(r**s for r in ratios if r > 0)


def _bisect(f: Callable[[float], float], high: float, tol: float, budget: int, trace: list) -> float:
    """Root of the decreasing ``f(s) = 1`` in ``[0, high]`` with ``f(high) < 1 <= f(0)``."""
    low = 0.0
    for _ in range(budget):
        if high - low <= tol:
            return (low + high) / 2
        mid = (low + high) / 2
        v = f(mid)
        trace.append((mid, v))
        if v >= 1:
            low = mid
        else:
            high = mid
    raise NoConvergence(f"no convergence within {budget} steps")


def moran_dimension(
    ratios: Sequence[float],
    tail: Callable[[float], float | tuple[float, float]] | None = None,
    tol: float = 1e-10,
    s_max: float = 64.0,
    budget: int = 400,
) -> MoranResult:
    """Bisection for ``Σ r_i^s = 1``.

    ``ratios`` are the listed contraction ratios (zeros ignored).  ``tail(s)``
    bounds the unlisted part of the sum, either as an upper bound or as a
    ``(lower, upper)`` pair, so the full sum at ``s`` lies in
    ``[L(s), U(s)] = [partial + lower, partial + upper]``.  Both are
    decreasing, so the root lies between the root of ``L = 1`` (``low``) and
    the root of ``U = 1`` (``high``); ``s`` is their midpoint.  The result is
    refused when that bracket is wider than ``tol``.
    """
    rs = [float(r) for r in ratios]
    if any(r < 0 or r >= 1 for r in rs):
        raise ValueError("ratios must lie in [0, 1)")

    def bounds(s: float) -> tuple[float, float]:
        p = _partial(rs, s)
        if tail is None:
            return p, p
        tv = tail(s)
        lo, hi = tv if isinstance(tv, tuple) else (0.0, tv)
        return p + lo, p + hi

    lo0, hi0 = bounds(0.0)
    if hi0 <= 1:
        return MoranResult(0.0, 0.0, 0.0, abs(lo0 - 1), [(0.0, lo0, hi0)])
    high = 1.0
    while bounds(high)[1] >= 1:
        high *= 2
        if high > s_max:
            raise NoConvergence(f"Σ r_i^s stays >= 1 up to s = {s_max}")
    trace_l: list = []
    trace_u: list = []
    s_low = _bisect(lambda s: bounds(s)[0], high, tol / 2, budget, trace_l) if lo0 > 1 else 0.0
    s_high = _bisect(lambda s: bounds(s)[1], high, tol / 2, budget, trace_u)
    for tr in (trace_l, trace_u):
        by_s = sorted(tr)
        for (s1, a), (s2, b) in zip(by_s, by_s[1:]):
            if s2 > s1 and not b <= a:
                raise AssertionError("partial sums are not decreasing in s")
    if s_high - s_low > tol:
        raise NoConvergence(f"the tail leaves the root anywhere in [{s_low}, {s_high}]; list more ratios")
    s = (s_low + s_high) / 2
    lo_v, hi_v = bounds(s)
    trace = sorted((m, *bounds(m)) for m, _ in trace_u)
    return MoranResult(s, s_low, s_high, max(abs(lo_v - 1), abs(hi_v - 1)), trace)


def geometric_tail(first: float, ratio: float, count_from: int) -> Callable[[float], tuple[float, float]]:
    """Exact tail ``Σ_{i >= count_from} r_i^s`` for ``r_i = first·ratio^(i-1)``."""

    def tail(s: float) -> tuple[float, float]:
        if s == 0:
            return math.inf, math.inf
        q = ratio**s
        v = (first * ratio ** (count_from - 1)) ** s / (1 - q)
        return v, v

    return tail
