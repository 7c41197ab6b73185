"""Gromov-Hausdorff distance of finite metric spaces.

``d_GH(X, Y) = 1/2 * min_R dis(R)`` over correspondences ``R``.  Every
correspondence contains one of the form ``graph(f) ∪ graph(g)^T`` with
``f: X -> Y`` and ``g: Y -> X``, and distortion can only drop on a subset,
so the solver searches over such pairs of maps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .metric_core import FiniteMetricSpace

__all__ = [
    "NotACorrespondence",
    "BudgetExceeded",
    "Correspondence",
    "GhResult",
    "correspondence_distortion",
    "gh_bounds",
    "gh_exact",
    "DEFAULT_NODE_BUDGET",
]

DEFAULT_NODE_BUDGET = 2_000_000


class NotACorrespondence(ValueError):
    pass


class BudgetExceeded(RuntimeError):
    """Search stopped early; ``lower``/``upper`` bracket the true value."""

    def __init__(self, lower: Fraction, upper: Fraction, certificate: "Correspondence"):
        self.lower, self.upper, self.certificate = lower, upper, certificate
        super().__init__(f"search budget exhausted; d_GH in [{lower}, {upper}]")


@dataclass(frozen=True)
class Correspondence:
    pairs: frozenset

    @classmethod
    def of(cls, pairs: Iterable[tuple[int, int]]) -> "Correspondence":
        return cls(frozenset((int(a), int(b)) for a, b in pairs))

    @classmethod
    def from_maps(cls, f: Iterable[int], g: Iterable[int]) -> "Correspondence":
        """``graph(f) ∪ graph(g)^T`` for ``f: X -> Y``, ``g: Y -> X`` given as index lists."""
        return cls.of([(x, y) for x, y in enumerate(f)] + [(x, y) for y, x in enumerate(g)])

    def check(self, nx: int, ny: int) -> None:
        xs = {a for a, _ in self.pairs}
        ys = {b for _, b in self.pairs}
        if any(not (0 <= a < nx and 0 <= b < ny) for a, b in self.pairs):
            raise NotACorrespondence("pair index out of range")
        if len(xs) != nx or len(ys) != ny:
            raise NotACorrespondence("relation does not cover both spaces")

    def sorted_pairs(self) -> list[tuple[int, int]]:
        return sorted(self.pairs)


@dataclass(frozen=True)
class GhResult:
    value: Fraction
    lower_bound: Fraction
    exact: bool
    certificate: Correspondence
    nodes: int = 0

    def __float__(self) -> float:
        return float(self.value)


def correspondence_distortion(R: Correspondence, X: FiniteMetricSpace, Y: FiniteMetricSpace) -> Fraction:
    """``max |d_X(x, x') - d_Y(y, y')|`` over pairs of pairs in ``R``."""
    R.check(len(X), len(Y))
    pairs = R.sorted_pairs()
    DX, DY = X.dist, Y.dist
    worst = Fraction(0)
    for a, (x, y) in enumerate(pairs):
        for x2, y2 in pairs[a + 1 :]:
            v = abs(DX[x][x2] - DY[y][y2])
            if v > worst:
                worst = v
    return worst


def _integer_scale(X: FiniteMetricSpace, Y: FiniteMetricSpace):
    den = 1
    for M in (X.dist, Y.dist):
        for row in M:
            for v in row:
                den = den * v.denominator // math.gcd(den, v.denominator)
    ix = [[int(v * den) for v in row] for row in X.dist]
    iy = [[int(v * den) for v in row] for row in Y.dist]
    return den, ix, iy


def _profile_gap(a: list[int], b: list[int]) -> int:
    """Hausdorff distance between two finite subsets of the line (as sorted lists)."""

    def directed(p, q):
        worst, j = 0, 0
        for v in p:
            while j + 1 < len(q) and abs(q[j + 1] - v) <= abs(q[j] - v):
                j += 1
            worst = max(worst, abs(q[j] - v))
        return worst

    return max(directed(a, b), directed(b, a))


def _bounds_scaled(ix, iy):
    nx, ny = len(ix), len(iy)
    px = [sorted(set(r)) for r in ix]
    py = [sorted(set(r)) for r in iy]
    H = [[_profile_gap(px[x], py[y]) for y in range(ny)] for x in range(nx)]
    # distance-profile bound: for (x, y) in R, the sets {d(x, .)} and {d(y, .)}
    # are within dis(R) of each other in the Hausdorff sense
    prof = max(max(min(H[x]) for x in range(nx)), max(min(H[x][y] for x in range(nx)) for y in range(ny)))
    diam_bound = abs(max(map(max, ix)) - max(map(max, iy)))
    lower2 = max(prof, diam_bound)  # lower bound on min distortion

    f = [min(range(ny), key=lambda y: (H[x][y], y)) for x in range(nx)]
    g = [min(range(nx), key=lambda x: (H[x][y], x)) for y in range(ny)]
    greedy = [(x, f[x]) for x in range(nx)] + [(g[y], y) for y in range(ny)]
    full = [(x, y) for x in range(nx) for y in range(ny)]
    candidates = [greedy, full, _sequential(ix, iy, H)]
    if nx == ny:
        candidates.append([(i, i) for i in range(nx)])
    best, best_pairs = None, None
    for pairs in candidates:
        d = _scaled_distortion(pairs, ix, iy)
        if best is None or d < best:
            best, best_pairs = d, pairs
    return lower2, best, best_pairs


def _sequential(ix, iy, H):
    """Assign points one at a time, each to the partner that keeps the running
    distortion smallest (X by decreasing eccentricity, then uncovered Y)."""
    nx, ny = len(ix), len(iy)
    pairs: list[tuple[int, int]] = []

    def cost(x, y):
        return max((abs(ix[x][a] - iy[y][b]) for a, b in pairs), default=0)

    for x in sorted(range(nx), key=lambda v: (-max(ix[v]), v)):
        y = min(range(ny), key=lambda v: (cost(x, v), H[x][v], v))
        pairs.append((x, y))
    for y in range(ny):
        if all(b != y for _, b in pairs):
            x = min(range(nx), key=lambda v: (cost(v, y), H[v][y], v))
            pairs.append((x, y))
    return pairs


def _scaled_distortion(pairs, ix, iy) -> int:
    pairs = sorted(set(pairs))
    worst = 0
    for a, (x, y) in enumerate(pairs):
        rx, ry = ix[x], iy[y]
        for x2, y2 in pairs[a + 1 :]:
            v = abs(rx[x2] - ry[y2])
            if v > worst:
                worst = v
    return worst


def gh_bounds(X: FiniteMetricSpace, Y: FiniteMetricSpace) -> tuple[Fraction, Fraction]:
    """Cheap ``(lower, upper)`` bracket for ``d_GH(X, Y)``.

    Lower: the larger of the diameter bound and the distance-profile bound.
    Upper: half the distortion of a greedy correspondence.
    """
    den, ix, iy = _integer_scale(X, Y)
    lo, up, _ = _bounds_scaled(ix, iy)
    return Fraction(lo, 2 * den), Fraction(up, 2 * den)


def gh_exact(
    X: FiniteMetricSpace,
    Y: FiniteMetricSpace,
    budget: int = DEFAULT_NODE_BUDGET,
    seed: Correspondence | None = None,
    raise_on_budget: bool = False,
) -> GhResult:
    """Exact ``d_GH`` by branch and bound over map pairs ``(f, g)``.

    Variables are ``f(x)`` for ``x`` by decreasing eccentricity, then ``g(y)``
    likewise; ties by index.  A branch is cut as soon as its partial
    distortion reaches the incumbent.  ``seed`` (e.g. a proof's explicit
    isometry) joins the greedy correspondence as a starting incumbent.

    If ``budget`` search nodes run out the result has ``exact=False`` and
    carries the best upper value, or :class:`BudgetExceeded` is raised when
    ``raise_on_budget`` is set.
    """
    nx, ny = len(X), len(Y)
    den, ix, iy = _integer_scale(X, Y)
    lower2, upper2, best_pairs = _bounds_scaled(ix, iy)
    if seed is not None:
        seed.check(nx, ny)
        s = _scaled_distortion(list(seed.pairs), ix, iy)
        if s < upper2:
            upper2, best_pairs = s, sorted(seed.pairs)

    def result(exact: bool, nodes: int) -> GhResult:
        value = Fraction(upper2, 2 * den)
        lo = value if exact else Fraction(lower2, 2 * den)
        return GhResult(value, lo, exact, Correspondence.of(best_pairs), nodes)

    if upper2 <= lower2:
        return result(True, 0)

    ecc_x = [max(r) for r in ix]
    ecc_y = [max(r) for r in iy]
    xs = sorted(range(nx), key=lambda x: (-ecc_x[x], x))
    ys = sorted(range(ny), key=lambda y: (-ecc_y[y], y))
    # variable v < nx assigns a partner to X-point xs[v]; otherwise to Y-point ys[v - nx]
    variables = [("x", x) for x in xs] + [("y", y) for y in ys]
    nvar = len(variables)

    def pair_of(var: int, val: int) -> tuple[int, int]:
        kind, p = variables[var]
        return (p, val) if kind == "x" else (val, p)

    domain_size = [ny if k == "x" else nx for k, _ in variables]
    # conf[var][val]: worst conflict of that candidate with the assigned pairs
    conf0 = [[0] * domain_size[v] for v in range(nvar)]
    state = {"upper": upper2, "pairs": best_pairs, "nodes": 0, "out": False}

    def search(var: int, cur: int, conf: list[list[int]], assigned: list[tuple[int, int]]) -> None:
        if state["out"]:
            return
        state["nodes"] += 1
        if state["nodes"] > budget:
            state["out"] = True
            return
        if var == nvar:
            if cur < state["upper"]:
                state["upper"] = cur
                state["pairs"] = list(assigned)
            return
        cands = [val for val in range(domain_size[var]) if max(cur, conf[var][val]) < state["upper"]]
        for val in cands:
            new_cur = max(cur, conf[var][val])
            if new_cur >= state["upper"]:
                continue
            x, y = pair_of(var, val)
            rx, ry = ix[x], iy[y]
            new_conf = []
            dead = False
            for w in range(var + 1, nvar):
                row = conf[w][:]
                alive = False
                for c in range(domain_size[w]):
                    a, b = pair_of(w, c)
                    v = abs(rx[a] - ry[b])
                    if v > row[c]:
                        row[c] = v
                    if max(new_cur, row[c]) < state["upper"]:
                        alive = True
                if not alive:
                    dead = True
                    break
                new_conf.append(row)
            if dead:
                continue
            search(var + 1, new_cur, [None] * (var + 1) + new_conf, assigned + [(x, y)])
            if state["out"] or state["upper"] <= lower2:
                return

    search(0, 0, conf0, [])
    upper2, best_pairs = state["upper"], state["pairs"]
    if state["out"]:
        if raise_on_budget:
            raise BudgetExceeded(Fraction(lower2, 2 * den), Fraction(upper2, 2 * den), Correspondence.of(best_pairs))
        return result(False, state["nodes"])
    return result(True, state["nodes"])
