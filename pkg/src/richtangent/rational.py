"""Exact-rational helpers shared by the constructions."""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence

Number = "int | float | str | Fraction"


def to_fraction(value) -> Fraction:
    """Convert a token to an exact rational.

    Floats go through their shortest decimal repr, so ``0.6`` becomes ``3/5``
    rather than the nearest binary fraction.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"non-finite value {value!r}")
        return Fraction(repr(value))
    if isinstance(value, str):
        return Fraction(value.strip())
    # numpy scalars and friends
    return to_fraction(float(value)) if not hasattr(value, "numerator") else Fraction(value)


def format_fraction(q: Fraction) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def sqrt_lower(q: Fraction, bits: int = 40) -> Fraction:
    """Largest dyadic m/2**bits with (m/2**bits)**2 <= q (exact when q is a square)."""
    q = Fraction(q)
    if q < 0:
        raise ValueError("negative argument")
    n, d = q.numerator, q.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    scale = 1 << bits
    return Fraction(math.isqrt(n * scale * scale // d), scale)


def sqrt_upper(q: Fraction, bits: int = 40) -> Fraction:
    """Smallest dyadic m/2**bits with (m/2**bits)**2 >= q (exact when q is a square)."""
    low = sqrt_lower(q, bits)
    if low * low == q:
        return low
    return low + Fraction(1, 1 << bits)


def sq_norm(v: Sequence[Fraction]) -> Fraction:
    return sum((c * c for c in v), Fraction(0))


def sub(u: Sequence[Fraction], v: Sequence[Fraction]) -> tuple[Fraction, ...]:
    return tuple(a - b for a, b in zip(u, v))


def max_norm(v: Iterable[Fraction]) -> Fraction:
    return max((abs(c) for c in v), default=Fraction(0))


def as_point(values, dim: int | None = None) -> tuple[Fraction, ...]:
    if isinstance(values, (int, float, Fraction, str)):
        values = (values,)
    pt = tuple(to_fraction(v) for v in values)
    if dim is not None and len(pt) != dim:
        raise ValueError(f"expected a {dim}-vector, got {len(pt)} coordinates")
    return pt
