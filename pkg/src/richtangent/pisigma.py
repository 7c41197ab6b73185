"""The projected symbol set πΣ ⊂ Q = [-1, 1]^d.

A point is coded by ``i = (i(1), i(2), ...)`` with ``i(n) ∈ γ_n`` and sits at
``Σ_k ρ(k) i(k)``.  The scales obey ``8√d r_{n+1} <= δ_n`` so that distinct
cylinders stay far apart; the generator exploits the nested cubes
``ρ(n+1)Q + Σ_{k<=n} ρ(k) i(k)`` to prune whole subtrees outside a window.

Irrational quantities (``√d`` and Euclidean ``δ_n`` for d > 1) are carried
as exact squares; where a rational value is needed a dyadic lower or upper
bound is used on the safe side.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .euclid_sets import (
    PointCloudSet,
    WindowGenerator,
    hausdorff_distance,
    similar_up_to,
    within,
    zoom,
)
from .rational import as_point, max_norm, sq_norm, sqrt_lower, sqrt_upper, to_fraction

__all__ = [
    "InvalidGammas",
    "ScheduleViolation",
    "BudgetExceeded",
    "PatternUnknown",
    "NotInBall",
    "base_patterns",
    "EuclidGammaSequence",
    "PiSchedule",
    "PiSigmaGenerator",
    "PiCoding",
    "build_pisigma",
    "build_from_config",
    "window_points",
    "project",
    "special_point_coding",
    "check_nested",
    "continuity_gap",
    "injectivity_margin",
    "PiTangentReport",
    "verify_pisigma_tangent",
    "block_centers",
    "block_set",
    "BaireReport",
    "baire_block_check",
    "jittered_block_set",
]

DEFAULT_POINT_BUDGET = 200_000


class InvalidGammas(ValueError):
    pass


class ScheduleViolation(ValueError):
    pass


class BudgetExceeded(RuntimeError):
    pass


class PatternUnknown(LookupError):
    pass


class NotInBall(ValueError):
    pass


Point = tuple[Fraction, ...]


def _reduced_den(p: Point) -> int:
    return max((c.denominator for c in p), default=1)


def base_patterns(dim: int, q: int, max_points: int) -> list[tuple[Point, ...]]:
    """All finite sets ``{0} ∪ S`` with ``S`` in the grid ``{j/p : p <= q, |j| < p}^d``
    and at most ``max_points`` points.

    Ordered by largest reduced denominator, then size, then the sorted
    point list; each pattern's points are sorted, so its first point is the
    lexicographically least one.
    """
    if dim < 1 or q < 1 or max_points < 1:
        raise InvalidGammas("dim, q and max_points must be positive")
    axis = sorted({Fraction(j, p) for p in range(1, q + 1) for j in range(-p + 1, p)})
    zero = (Fraction(0),) * dim
    others = [pt for pt in itertools.product(axis, repeat=dim) if pt != zero]
    pats = []
    for size in range(0, max_points):
        for combo in itertools.combinations(others, size):
            pats.append(tuple(sorted((zero,) + combo)))
    pats.sort(key=lambda s: (max(_reduced_den(p) for p in s), len(s), s))
    return pats


@dataclass(frozen=True)
class EuclidGammaSequence:
    """``γ_1, ..., γ_N`` together with the recurrence plan of base patterns.

    With ``P = len(base)``, ``γ_n = base[(n - 1) mod P]``, so pattern ``p``
    (1-based) sits at indices ``p, p + P, p + 2P, ...``.
    """

    dim: int
    base: tuple[tuple[Point, ...], ...]
    length: int

    @classmethod
    def periodic(cls, dim: int, base: Sequence[Sequence], length: int) -> "EuclidGammaSequence":
        pats = tuple(tuple(sorted(as_point(p, dim) for p in pat)) for pat in base)
        seq = cls(dim, pats, length)
        seq.validate()
        return seq

    @classmethod
    def from_grid(cls, dim: int, q: int, max_points: int, length: int) -> "EuclidGammaSequence":
        return cls(dim, tuple(base_patterns(dim, q, max_points)), length)

    @property
    def period(self) -> int:
        return len(self.base)

    @property
    def gammas(self) -> list[tuple[Point, ...]]:
        return [self.base[(n - 1) % self.period] for n in range(1, self.length + 1)]

    def validate(self) -> None:
        zero = (Fraction(0),) * self.dim
        if not self.base:
            raise InvalidGammas("no base patterns")
        for pat in self.base:
            if zero not in pat:
                raise InvalidGammas(f"pattern {pat} misses the origin")
            if len(set(pat)) != len(pat):
                raise InvalidGammas("duplicate point in a pattern")
            for p in pat:
                if len(p) != self.dim or any(abs(c) >= 1 for c in p):
                    raise InvalidGammas(f"point {p} is not inside the open cube")

    def pattern_index(self, pattern) -> int:
        pat = tuple(sorted(as_point(p, self.dim) for p in pattern))
        for i, b in enumerate(self.base, start=1):
            if b == pat:
                return i
        raise PatternUnknown(f"{pat} is not a base pattern")

    def occurrences(self, pattern, upto: int | None = None) -> list[int]:
        p = self.pattern_index(pattern)
        upto = self.length if upto is None else upto
        return list(range(p, upto + 1, self.period))


def _delta_sq(gamma: Sequence[Point]) -> Fraction:
    best = min((1 - max_norm(p)) ** 2 for p in gamma)
    for a, b in itertools.combinations(gamma, 2):
        v = sq_norm([x - y for x, y in zip(a, b)])
        if v < best:
            best = v
    return best


@dataclass(frozen=True)
class PiSchedule:
    dim: int
    gammas: tuple[tuple[Point, ...], ...]
    delta_sq: tuple[Fraction, ...]
    rs: tuple[Fraction, ...]
    rhos: tuple[Fraction, ...]
    margin: Fraction = Fraction(2)

    def __post_init__(self) -> None:
        if len(self.rs) != len(self.gammas) + 1:
            raise ScheduleViolation("need one more scale than levels (r_1..r_{N+1})")
        if self.rs[0] != 1:
            raise ScheduleViolation("r_1 must be 1")
        for n in range(1, len(self.rs)):
            r = self.rs[n]
            if not 0 < r < self.rs[n - 1] or (n > 1 and 2 * r > self.rs[n - 1]):
                raise ScheduleViolation(f"r_{n + 1} = {r} must satisfy 0 < r_{n + 1} <= r_{n}/2")
            # 8√d r_{n+1} <= δ_n, compared in squares
            if 64 * self.dim * r * r > self.delta_sq[n - 1]:
                raise ScheduleViolation(f"8√d·r_{n + 1} exceeds δ_{n}")
        acc = Fraction(1)
        for r, rho in zip(self.rs, self.rhos):
            acc *= r
            if rho != acc:
                raise ScheduleViolation("ρ must be the running product of r")

    @property
    def depth(self) -> int:
        return len(self.gammas)

    def r(self, n: int) -> Fraction:
        return self.rs[n - 1]

    def rho(self, n: int) -> Fraction:
        return Fraction(1) if n == 0 else self.rhos[n - 1]

    def delta_lower(self, n: int) -> Fraction:
        return sqrt_lower(self.delta_sq[n - 1])

    def to_json(self) -> str:
        return json.dumps(
            {
                "dim": self.dim,
                "r": [str(r) for r in self.rs],
                "rho": [str(r) for r in self.rhos],
                "delta_sq": [str(v) for v in self.delta_sq],
                "gammas": [[[str(c) for c in p] for p in g] for g in self.gammas],
            },
            indent=1,
        )


def make_pi_schedule(dim: int, gammas: Sequence[Sequence[Point]], rule="default", margin=2) -> PiSchedule:
    """Scales for the levels ``1..N`` plus ``r_{N+1}``.

    Default rule: ``r_{n+1} = min(δ_n / (8√d·margin), r_n / 2)``; the second
    term drives ``r_n -> 0`` when the patterns recur periodically.
    An explicit list of ``N + 1`` values is validated as given.
    """
    gs = tuple(tuple(g) for g in gammas)
    dsq = tuple(_delta_sq(g) for g in gs)
    margin = to_fraction(margin)
    if isinstance(rule, str):
        if rule != "default":
            raise ScheduleViolation(f"unknown rule {rule!r}")
        root_d = sqrt_upper(Fraction(dim))
        rs = [Fraction(1)]
        for n in range(1, len(gs) + 1):
            cap = sqrt_lower(dsq[n - 1]) / (8 * root_d * margin)
            rs.append(min(cap, rs[-1] / 2) if n > 1 else min(cap, Fraction(1, 2)))
    else:
        rs = [to_fraction(v) for v in rule]
    rhos, acc = [], Fraction(1)
    for r in rs:
        acc *= r
        rhos.append(acc)
    return PiSchedule(dim, gs, dsq, tuple(rs), tuple(rhos), margin)


@dataclass(frozen=True)
class PiCoding:
    coords: tuple[Point, ...]

    def __len__(self) -> int:
        return len(self.coords)

    def truncated(self, n: int) -> "PiCoding":
        return PiCoding(self.coords[:n])

    def replaced(self, k: int, value: Point) -> "PiCoding":
        c = list(self.coords)
        c[k - 1] = value
        return PiCoding(tuple(c))


def project(schedule: PiSchedule, coding: PiCoding) -> Point:
    """``Σ_{k<=n} ρ(k) i(k)`` for a coding of length ``n``."""
    s = [Fraction(0)] * schedule.dim
    for k, p in enumerate(coding.coords, start=1):
        if p not in schedule.gammas[k - 1]:
            raise InvalidGammas(f"coordinate {k} is not a point of γ_{k}")
        rho = schedule.rho(k)
        s = [a + rho * b for a, b in zip(s, p)]
    return tuple(s)


class PiSigmaGenerator(WindowGenerator):
    """Window queries on the depth-``n`` approximations of πΣ."""

    def __init__(self, schedule: PiSchedule, budget: int = DEFAULT_POINT_BUDGET):
        self.schedule = schedule
        self.dim = schedule.dim
        self.frame = Fraction(1)
        self.max_depth = schedule.depth
        self.default_depth = schedule.depth
        self.budget = budget
        self._root_d = sqrt_upper(Fraction(schedule.dim))

    def resolution(self, depth: int) -> Fraction:
        return 2 * self._root_d * self.schedule.rho(depth + 1)

    def codings(self, center, halfwidth, depth: int):
        """Yield ``(coding, point)`` for depth-``depth`` cylinders whose cube meets the window."""
        if not 0 <= depth <= self.schedule.depth:
            raise ValueError(f"depth must lie in 0..{self.schedule.depth}")
        c = as_point(center, self.dim)
        h = to_fraction(halfwidth)
        sch = self.schedule
        count = 0

        def meets(s, m) -> bool:
            reach = h + sch.rho(m + 1)
            return all(abs(a - b) <= reach for a, b in zip(s, c))

        stack = [((), (Fraction(0),) * self.dim)]
        if not meets(stack[0][1], 0):
            return
        while stack:
            code, s = stack.pop()
            m = len(code)
            if m == depth:
                count += 1
                if count > self.budget:
                    raise BudgetExceeded(f"window holds more than {self.budget} points")
                yield PiCoding(code), s
                continue
            rho = sch.rho(m + 1)
            kids = []
            for p in sch.gammas[m]:
                t = tuple(a + rho * b for a, b in zip(s, p))
                if meets(t, m + 1):
                    kids.append((code + (p,), t))
            stack.extend(reversed(kids))

    def window(self, center, halfwidth, depth=None):
        depth = self.default_depth if depth is None else depth
        pts = [p for _, p in self.codings(center, halfwidth, depth)]
        if not pts:
            return None
        return PointCloudSet(self.dim, tuple(sorted(set(pts))), self.resolution(depth))


def build_pisigma(gammas, rule="default", margin=2, budget: int = DEFAULT_POINT_BUDGET):
    """Schedule and generator for ``πΣ`` from an :class:`EuclidGammaSequence`
    (or a plain list of patterns)."""
    if isinstance(gammas, EuclidGammaSequence):
        dim, gs = gammas.dim, gammas.gammas
    else:
        gs = [tuple(sorted(as_point(p) for p in g)) for g in gammas]
        if not gs:
            raise InvalidGammas("need at least one level")
        dim = len(gs[0][0])
        EuclidGammaSequence.periodic(dim, gs, len(gs))
    schedule = make_pi_schedule(dim, gs, rule, margin)
    return schedule, PiSigmaGenerator(schedule, budget)


def build_from_config(cfg: dict):
    """``{"dim", "gamma_denominator", "max_points", "rule_margin", "depth"}`` -> (sequence, schedule, generator)."""
    seq = EuclidGammaSequence.from_grid(
        int(cfg.get("dim", 1)), int(cfg.get("gamma_denominator", 2)), int(cfg.get("max_points", 2)), int(cfg.get("depth", 6))
    )
    schedule, gen = build_pisigma(seq, "default", cfg.get("rule_margin", 2), int(cfg.get("budget_points", DEFAULT_POINT_BUDGET)))
    return seq, schedule, gen


def window_points(gen: PiSigmaGenerator, center, halfwidth, depth: int) -> PointCloudSet | None:
    return gen.window(center, halfwidth, depth)


def special_point_coding(seq: EuclidGammaSequence, pattern, N: int) -> PiCoding:
    """Zero at every occurrence index of ``pattern`` below ``N``, first label elsewhere.

    ``pattern=None`` gives the all-zero coding, which serves every pattern at once.
    """
    gs = seq.gammas[:N]
    zero = (Fraction(0),) * seq.dim
    if pattern is None:
        return PiCoding(tuple(zero for _ in gs))
    occ = set(seq.occurrences(pattern, N))
    return PiCoding(tuple(zero if n in occ else g[0] for n, g in enumerate(gs, start=1)))


# ---------------------------------------------------------------- structural checks


def check_nested(schedule: PiSchedule) -> None:
    """Every child cube sits inside its parent: ``max|i(n)| + r_{n+1} <= 1``."""
    for n, g in enumerate(schedule.gammas, start=1):
        r = schedule.r(n + 1)
        for p in g:
            if max_norm(p) + r > 1:
                raise ScheduleViolation(f"level {n} cube of {p} leaves its parent")


def _first_diff(a: PiCoding, b: PiCoding) -> int:
    for n, (x, y) in enumerate(zip(a.coords, b.coords), start=1):
        if x != y:
            return n
    raise ValueError("codings agree on the common prefix")


def continuity_gap(schedule: PiSchedule, a: PiCoding, b: PiCoding) -> Fraction:
    """``2ρ(n0 - 1) - ||πa - πb||_max``; non-negative when the continuity bound holds."""
    n0 = _first_diff(a, b)
    pa, pb = project(schedule, a), project(schedule, b)
    return 2 * schedule.rho(n0 - 1) - max_norm([x - y for x, y in zip(pa, pb)])


def injectivity_margin(gen: PiSigmaGenerator, depth: int) -> Fraction:
    """Least ``|p - q|^2 - 16 d ρ(n0 + 1)^2`` over all depth-``depth`` pairs."""
    items = list(gen.codings((0,) * gen.dim, 1, depth))
    sch = gen.schedule
    worst = None
    for (ca, pa), (cb, pb) in itertools.combinations(items, 2):
        n0 = _first_diff(ca, cb)
        v = sq_norm([x - y for x, y in zip(pa, pb)]) - 16 * sch.dim * sch.rho(n0 + 1) ** 2
        if worst is None or v < worst:
            worst = v
    return worst if worst is not None else Fraction(0)


# ---------------------------------------------------------------- tangents


@dataclass(frozen=True)
class PiTangentReport:
    mode: str
    k: int
    dH: float
    bound: float
    slack: float
    passed: bool
    lam: float | None = None
    b: tuple | None = None
    points: int = 0

    def as_row(self) -> dict:
        return {
            "mode": self.mode,
            "k": self.k,
            "dH": self.dH,
            "bound": self.bound,
            "slack": self.slack,
            "lambda": "" if self.lam is None else self.lam,
            "pass": self.passed,
            "points": self.points,
        }


def verify_pisigma_tangent(
    gen: PiSigmaGenerator,
    coding: PiCoding,
    k: int,
    mode: str = "dense",
    target=None,
    depth: int | None = None,
    lambda_tol: float = 0.05,
) -> PiTangentReport:
    """Certify one zoom of πΣ at ``π(coding)``.

    ``dense``: needs ``coding(k) = 0``; checks
    ``d_H(T_{πi, ρ(k)}(πΣ), E) <= 2√d r_{k+1}`` plus the truncation slack.
    ``allpoints``: any coding; zooms with the doubled screen ``2ρ(k)`` and
    looks for ``λ(Z - z) ≈ E - e`` with ``λ`` near 2, i.e. the view is close
    to ``½E + b``.  The residual must stay below ``2√d r_{k+1}`` plus slack.
    """
    sch = gen.schedule
    N = sch.depth if depth is None else depth
    if not 1 <= k <= N or len(coding) < N:
        raise ValueError("need 1 <= k <= depth and a coding of length >= depth")
    coding = coding.truncated(N)
    E = sch.gammas[k - 1] if target is None else tuple(as_point(p, sch.dim) for p in target)
    F = PointCloudSet.from_points(E, sch.dim)
    x = project(sch, coding)
    root_d = sqrt_upper(Fraction(sch.dim))
    rk = sch.rho(k)
    tail = 2 * root_d * sch.rho(N + 1)  # ideal set vs depth-N cloud, and true πi vs its truncation
    if mode == "dense":
        if any(c != 0 for c in coding.coords[k - 1]):
            raise ValueError(f"dense mode needs coding({k}) = 0")
        Z = zoom(gen, x, rk, depth=N)
        h = hausdorff_distance(Z, F)
        bound = 2 * root_d * sch.r(k + 1)
        slack = 2 * tail / rk
        ok = within(h, bound + slack)
        return PiTangentReport(mode, k, h.value, float(bound), float(slack), ok, points=len(Z))
    if mode == "allpoints":
        Z = zoom(gen, x, 2 * rk, depth=N)
        bound = 2 * root_d * sch.r(k + 1)
        slack = 2 * tail / rk
        tol = float(bound + slack)
        m = similar_up_to(Z, F, 0.4, tol, prefer=(2.0,))
        b = tuple(-c / 2 for c in coding.coords[k - 1])
        if not m:
            return PiTangentReport(mode, k, m.best_residual, float(bound), float(slack), False, b=b, points=len(Z))
        ok = abs(m.lam - 2) <= 2 * lambda_tol
        return PiTangentReport(mode, k, m.residual, float(bound), float(slack), ok, m.lam, b, len(Z))
    raise ValueError(f"unknown mode {mode!r}")


# ---------------------------------------------------------------- blocks


def block_centers(n: int, dim: int) -> list[Point]:
    """Centres of the ``3^{nd}`` subcubes of side ``2·3^{-n}`` tiling ``Q``."""
    side = Fraction(2, 3**n)
    axis = [-1 + side * j + side / 2 for j in range(3**n)]
    return [tuple(p) for p in itertools.product(axis, repeat=dim)]


def block_set(n: int, gamma: Sequence, centers: Sequence | None = None) -> PointCloudSet:
    """``A_{n,k} = ∪_{a ∈ A_n} (a + 3^{-(n+1)} γ_k)``."""
    g = [as_point(p) for p in gamma]
    dim = len(g[0])
    cs = block_centers(n, dim) if centers is None else [as_point(c, dim) for c in centers]
    s = Fraction(1, 3 ** (n + 1))
    return PointCloudSet.from_points([tuple(a + s * b for a, b in zip(c, p)) for c in cs for p in g], dim)


@dataclass(frozen=True)
class BaireReport:
    n: int
    radius: float
    bound: float
    distance_to_block: float
    worst: float
    worst_point: tuple
    passed: bool
    rows: list


def baire_block_check(n: int, gamma, perturbation: PointCloudSet | None = None, centers=None) -> BaireReport:
    """For every ``x`` of a set ``E`` near ``A_{n,k}``, find ``b(x) ∈ Q(0, 1/2)`` with
    ``d_H(T_{x, 2·3^{-(n+1)}}(E), ½γ_k + b(x)) < 3^{-n} δ_k``.

    ``b(x) = (a - x) / (2·3^{-(n+1)})`` for the block centre ``a`` nearest
    to ``x``.  ``E`` defaults to the block set itself.
    """
    g = tuple(sorted(as_point(p) for p in gamma))
    dim = len(g[0])
    A = block_set(n, g, centers)
    E = A if perturbation is None else perturbation
    dsq = _delta_sq(g)
    delta_lo = sqrt_lower(dsq)
    radius = Fraction(1, 9**n) * delta_lo
    dist = hausdorff_distance(E, A)
    if dist.value >= float(radius):
        raise NotInBall(f"set is {dist.value} from the block set, radius is {float(radius)}")
    cs = block_centers(n, dim) if centers is None else [as_point(c, dim) for c in centers]
    s = Fraction(1, 3 ** (n + 1))
    bound = Fraction(1, 3**n) * delta_lo
    half = Fraction(1, 2)
    rows, worst, worst_pt = [], -1.0, None
    for x in E.points:
        a = min(cs, key=lambda c: (max_norm([u - v for u, v in zip(c, x)]), c))
        b = tuple((u - v) / (2 * s) for u, v in zip(a, x))
        if max_norm(b) > half:
            raise NotInBall(f"{x} is too far from every block centre")
        Z = zoom(E, x, 2 * s, check_center=False)
        T = PointCloudSet.from_points([tuple(half * c + o for c, o in zip(p, b)) for p in g], dim)
        h = hausdorff_distance(Z, T)
        rows.append({"x": x, "b": b, "dH": h.value})
        if h.value > worst:
            worst, worst_pt = h.value, x
    return BaireReport(n, float(radius), float(bound), dist.value, worst, worst_pt, worst < float(bound), rows)


def jittered_block_set(n: int, gamma, fraction=Fraction(1, 2), centers=None) -> PointCloudSet:
    """``A_{n,k}`` with every point pushed by ``±fraction·3^{-2n}δ_k`` along the first
    axis, sign alternating in sorted order."""
    A = block_set(n, gamma, centers)
    g = [as_point(p) for p in gamma]
    step = to_fraction(fraction) * Fraction(1, 9**n) * sqrt_lower(_delta_sq(g))
    pts = []
    for i, p in enumerate(A.points):
        sgn = 1 if i % 2 == 0 else -1
        pts.append((p[0] + sgn * step,) + p[1:])
    return PointCloudSet.from_points(pts, A.dim)
