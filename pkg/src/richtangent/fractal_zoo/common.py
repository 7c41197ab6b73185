"""Shared errors and pattern helpers for the constructions."""

from __future__ import annotations

from fractions import Fraction

from ..pisigma import base_patterns


class ConditionViolation(ValueError):
    """A construction condition fails; ``which`` names it and ``n`` the index."""

    def __init__(self, which: str, n: int, detail: str = ""):
        self.which, self.n = which, n
        super().__init__(f"condition {which} fails at n={n}" + (f": {detail}" if detail else ""))


class ScheduleViolation(ValueError):
    pass


def kplus_patterns(dim: int, q: int = 2, max_points: int = 2) -> list[tuple[tuple[Fraction, ...], ...]]:
    """Grid patterns containing 0 whose points all have non-negative first coordinate."""
    return [p for p in base_patterns(dim, q, max_points) if all(x[0] >= 0 for x in p)]


def cycle(patterns, length: int):
    return [patterns[(n - 1) % len(patterns)] for n in range(1, length + 1)]
