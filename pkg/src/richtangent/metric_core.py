"""Finite metric spaces with exact rational distances.

A :class:`FiniteMetricSpace` is the unit every Gromov-Hausdorff computation
works on.  Distances are kept as :class:`fractions.Fraction` so that deep
products of scale factors never lose relative precision; floats appear only
when a caller asks for them.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Iterator, Sequence

import numpy as np

from .rational import format_fraction, to_fraction

__all__ = [
    "MetricError",
    "NegativeDistance",
    "ZeroDiagonalViolation",
    "AsymmetryViolation",
    "TriangleViolation",
    "UnknownLabel",
    "FiniteMetricSpace",
    "validate_metric",
    "zoom_ball",
    "canonical_form",
    "is_isometric",
    "RationalSpaceEnumerator",
    "enumerate_rational_spaces",
    "read_matrix_csv",
    "write_matrix_csv",
]


class MetricError(ValueError):
    """A matrix failed one of the metric axioms."""


class NegativeDistance(MetricError):
    def __init__(self, i: int, j: int):
        self.indices = (i, j)
        super().__init__(f"negative distance at ({i}, {j})")


class ZeroDiagonalViolation(MetricError):
    """Non-zero diagonal entry, or (with ``j``) zero distance between distinct points."""

    def __init__(self, i: int, j: int | None = None):
        self.indices = (i,) if j is None else (i, j)
        msg = f"non-zero diagonal entry at ({i}, {i})" if j is None else f"distinct points {i}, {j} at distance 0"
        super().__init__(msg)


class AsymmetryViolation(MetricError):
    def __init__(self, i: int, j: int):
        self.indices = (i, j)
        super().__init__(f"d[{i}][{j}] != d[{j}][{i}]")


class TriangleViolation(MetricError):
    """``d[i][j] > d[i][k] + d[k][j]``."""

    def __init__(self, i: int, j: int, k: int):
        self.indices = (i, j, k)
        super().__init__(f"triangle inequality fails: d[{i}][{j}] > d[{i}][{k}] + d[{k}][{j}]")


class UnknownLabel(KeyError):
    pass


@dataclass(frozen=True, eq=False)
class FiniteMetricSpace:
    """Labelled points with a validated, exact distance matrix.

    Build instances through :func:`validate_metric`; the constructor trusts
    its input.
    """

    labels: tuple[Hashable, ...]
    dist: tuple[tuple[Fraction, ...], ...]
    diam: Fraction = field(init=False)
    _index: dict = field(init=False, repr=False)

    def __post_init__(self) -> None:
        diam = max((max(row) for row in self.dist), default=Fraction(0))
        object.__setattr__(self, "diam", diam)
        object.__setattr__(self, "_index", {lab: i for i, lab in enumerate(self.labels)})
        if len(self._index) != len(self.labels):
            raise ValueError("labels must be distinct")

    def __len__(self) -> int:
        return len(self.labels)

    def index(self, label: Hashable) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise UnknownLabel(label) from None

    def d(self, a: Hashable, b: Hashable) -> Fraction:
        return self.dist[self.index(a)][self.index(b)]

    def min_positive_distance(self) -> Fraction | None:
        vals = [self.dist[i][j] for i in range(len(self)) for j in range(i + 1, len(self))]
        return min(vals) if vals else None

    def eccentricities(self) -> tuple[Fraction, ...]:
        return tuple(max(row) for row in self.dist)

    def to_float(self) -> np.ndarray:
        return np.array([[float(x) for x in row] for row in self.dist], dtype=float)

    def relabel(self, labels: Sequence[Hashable]) -> "FiniteMetricSpace":
        return FiniteMetricSpace(tuple(labels), self.dist)

    def permuted(self, perm: Sequence[int]) -> "FiniteMetricSpace":
        """Reorder points: new point ``k`` is old point ``perm[k]``."""
        dist = tuple(tuple(self.dist[perm[a]][perm[b]] for b in range(len(perm))) for a in range(len(perm)))
        return FiniteMetricSpace(tuple(self.labels[p] for p in perm), dist)

    def scaled(self, factor) -> "FiniteMetricSpace":
        f = to_fraction(factor)
        return FiniteMetricSpace(self.labels, tuple(tuple(x * f for x in row) for row in self.dist))

    def subspace(self, labels: Sequence[Hashable]) -> "FiniteMetricSpace":
        idx = [self.index(lab) for lab in labels]
        dist = tuple(tuple(self.dist[i][j] for j in idx) for i in idx)
        return FiniteMetricSpace(tuple(labels), dist)

    def __repr__(self) -> str:
        return f"FiniteMetricSpace(n={len(self)}, diam={format_fraction(self.diam)})"


def validate_metric(matrix, labels: Sequence[Hashable] | None = None, tol=None) -> FiniteMetricSpace:
    """Check the metric axioms and return the space.

    Entries may be ints, Fractions, ``"p/q"`` strings or floats.  ``tol``
    defaults to 0 for exact input and to ``1e-12`` when any float is present;
    it only relaxes the symmetry and triangle checks.
    """
    rows = [list(r) for r in matrix]
    n = len(rows)
    if n < 1:
        raise MetricError("a metric space needs at least one point")
    if any(len(r) != n for r in rows):
        raise MetricError("distance matrix must be square")
    has_float = any(isinstance(x, float) for r in rows for x in r)
    tol = Fraction(0) if tol is None and not has_float else to_fraction(1e-12 if tol is None else tol)
    dist = [[to_fraction(x) for x in r] for r in rows]

    for i in range(n):
        for j in range(n):
            if dist[i][j] < 0:
                raise NegativeDistance(i, j)
    for i in range(n):
        if dist[i][i] != 0:
            raise ZeroDiagonalViolation(i)
    for i in range(n):
        for j in range(i + 1, n):
            if abs(dist[i][j] - dist[j][i]) > tol:
                raise AsymmetryViolation(i, j)
            if dist[i][j] == 0:
                raise ZeroDiagonalViolation(i, j)
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(n):
                if k in (i, j):
                    continue
                if dist[i][j] > dist[i][k] + dist[k][j] + tol:
                    raise TriangleViolation(i, j, k)
    if tol:
        # symmetrise small float noise
        for i in range(n):
            for j in range(i + 1, n):
                dist[j][i] = dist[i][j]
    if labels is None:
        labels = tuple(range(n))
    return FiniteMetricSpace(tuple(labels), tuple(tuple(r) for r in dist))


def zoom_ball(X: FiniteMetricSpace, center: Hashable, r) -> FiniteMetricSpace:
    """Closed ball ``B(center, r)`` with the metric divided by ``r``."""
    r = to_fraction(r)
    if r <= 0:
        raise ValueError("zoom radius must be positive")
    c = X.index(center)
    keep = [i for i in range(len(X)) if X.dist[c][i] <= r]
    dist = tuple(tuple(X.dist[i][j] / r for j in keep) for i in keep)
    return FiniteMetricSpace(tuple(X.labels[i] for i in keep), dist)


def canonical_form(X: FiniteMetricSpace) -> tuple[int, tuple[Fraction, ...]]:
    """Isometry invariant: point count plus the lexicographically least
    lower-triangle sequence ``(d[1][0], d[2][0], d[2][1], ...)`` over all
    orderings of the points.

    The search extends orderings one point at a time and drops any prefix
    already larger than the best complete sequence found.
    """
    n = len(X)
    if n <= 1:
        return (n, ())
    D = X.dist
    best: list | None = None
    # stack entries: (perm prefix, emitted sequence)
    stack: list[tuple[list[int], list]] = [([i], []) for i in reversed(range(n))]
    while stack:
        perm, seq = stack.pop()
        if best is not None:
            head = best[: len(seq)]
            if seq > head:
                continue
        if len(perm) == n:
            if best is None or seq < best:
                best = seq
            continue
        children = []
        for nxt in range(n):
            if nxt in perm:
                continue
            row = [D[nxt][p] for p in perm]
            children.append((seq + row, perm + [nxt]))
        children.sort(key=lambda c: c[0])
        if best is not None:
            cutoff = best[: len(children[0][0])]
            children = [c for c in children if c[0] <= cutoff]
        for s, p in reversed(children):
            stack.append((p, s))
    return (n, tuple(best))


def is_isometric(X: FiniteMetricSpace, Y: FiniteMetricSpace) -> bool:
    return len(X) == len(Y) and canonical_form(X) == canonical_form(Y)


def _space_from_lower(n: int, lower: Sequence[Fraction]) -> FiniteMetricSpace:
    D = [[Fraction(0)] * n for _ in range(n)]
    it = iter(lower)
    for k in range(1, n):
        for j in range(k):
            D[k][j] = D[j][k] = next(it)
    return FiniteMetricSpace(tuple(range(n)), tuple(tuple(r) for r in D))


def _farey_values(q: int) -> list[Fraction]:
    return sorted({Fraction(j, p) for p in range(1, q + 1) for j in range(1, p + 1)})


def _spaces_at(n: int, q: int) -> list[FiniteMetricSpace]:
    """All ``n``-point spaces up to isometry with every distance ``j/p``,
    ``p <= q``, and at least one reduced denominator equal to ``q``."""
    if n == 1:
        return [_space_from_lower(1, ())] if q == 1 else []
    values = _farey_values(q)
    m = n * (n - 1) // 2
    found: dict[tuple, FiniteMetricSpace] = {}
    for lower in itertools.product(values, repeat=m):
        if max(v.denominator for v in lower) != q:
            continue
        X = _space_from_lower(n, lower)
        if not _is_metric(X):
            continue
        key = canonical_form(X)
        if key not in found:
            found[key] = _space_from_lower(n, key[1])
    return [found[k] for k in sorted(found)]


def _is_metric(X: FiniteMetricSpace) -> bool:
    D, n = X.dist, len(X)
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(n):
                if k != i and k != j and D[i][j] > D[i][k] + D[k][j]:
                    return False
    return True


@dataclass
class RationalSpaceEnumerator:
    """Deterministic sequence of rational finite spaces of diameter at most 1.

    Order: point count, then largest reduced denominator, then canonical
    form.  With finite bounds the list is finite, and the enumerator cycles
    through it so the sequence is infinite and every space recurs.
    """

    max_points: int = 3
    max_denominator: int = 2
    cursor: int = 0
    _cache: list = field(default_factory=list, repr=False)

    def __post_init__(self) -> None:
        if not 1 <= self.max_points <= 8:
            raise ValueError("max_points must lie in 1..8")
        if self.max_denominator < 1:
            raise ValueError("max_denominator must be positive")

    def spaces(self) -> list[FiniteMetricSpace]:
        """One full period of the enumeration."""
        if not self._cache:
            for n in range(1, self.max_points + 1):
                for q in range(1, self.max_denominator + 1):
                    self._cache.extend(_spaces_at(n, q))
        return self._cache

    @property
    def period(self) -> int:
        return len(self.spaces())

    def __iter__(self) -> Iterator[FiniteMetricSpace]:
        while True:
            yield self.next()

    def next(self) -> FiniteMetricSpace:
        sp = self.spaces()
        X = sp[self.cursor % len(sp)]
        self.cursor += 1
        return X


def enumerate_rational_spaces(e: RationalSpaceEnumerator, count: int) -> list[FiniteMetricSpace]:
    if count < 1:
        raise ValueError("count must be >= 1")
    return [e.next() for _ in range(count)]


def read_matrix_csv(path) -> FiniteMetricSpace:
    """Read the ``n=<k>`` headed distance-matrix CSV (decimal or ``p/q`` tokens)."""
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines or not lines[0].startswith("n="):
        raise MetricError(f"{path}: first line must be 'n=<k>'")
    n = int(lines[0][2:])
    rows = [[tok.strip() for tok in ln.split(",")] for ln in lines[1 : n + 1]]
    if len(rows) != n:
        raise MetricError(f"{path}: expected {n} rows, found {len(rows)}")
    return validate_metric([[to_fraction(t) for t in r] for r in rows])


def write_matrix_csv(X: FiniteMetricSpace, path, exact: bool = True) -> None:
    fmt = format_fraction if exact else (lambda q: repr(float(q)))
    with open(path, "w") as fh:
        fh.write(f"n={len(X)}\n")
        for row in X.dist:
            fh.write(",".join(fmt(x) for x in row) + "\n")
