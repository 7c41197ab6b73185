"""Compact subsets of the cube as resolution-tagged point clouds.

Ideal sets in this package are limits; what a run holds is a finite ε-net
(:class:`PointCloudSet`) or a lazy :class:`WindowGenerator` that produces one
for any window and depth.  Zooming is done in exact rationals; distance
computations are exact in dimension one and for small clouds, and fall back
to a k-d tree in floating point otherwise.
"""

from __future__ import annotations

import bisect
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
from scipy.spatial import cKDTree

from .rational import as_point, sq_norm, to_fraction

__all__ = [
    "DimensionMismatch",
    "EmptyZoom",
    "CenterNotInSet",
    "BudgetExceeded",
    "PointCloudSet",
    "WindowGenerator",
    "FiniteSetGenerator",
    "HausdorffResult",
    "hausdorff_distance",
    "within",
    "zoom",
    "ScanResult",
    "tangent_photograph_scan",
    "SimilarityMatch",
    "NoMatch",
    "similar_up_to",
    "PorosityProfile",
    "porosity_profile",
    "BoxDimension",
    "box_dimension",
    "EXACT_PAIR_LIMIT",
]

EXACT_PAIR_LIMIT = 20_000


class DimensionMismatch(ValueError):
    pass


class EmptyZoom(ValueError):
    pass


class CenterNotInSet(ValueError):
    pass


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class PointCloudSet:
    """Finite point set with exact coordinates and a resolution tag ``ε``.

    The ideal set lies within Hausdorff distance ``resolution`` of
    ``points``.  Coordinates must lie in ``[-frame, frame]``; the frame is 1
    for subsets of the unit cube and larger only for the unbounded
    constructions viewed through photographs.
    """

    dim: int
    points: tuple[tuple[Fraction, ...], ...]
    resolution: Fraction = Fraction(0)
    frame: Fraction = Fraction(1)
    _array: np.ndarray | None = field(default=None, init=False, repr=False, compare=False)

    @classmethod
    def from_points(cls, points: Iterable, dim: int | None = None, resolution=0, frame=1) -> "PointCloudSet":
        pts = [as_point(p) for p in points]
        if not pts:
            raise ValueError("a point cloud needs at least one point")
        dim = len(pts[0]) if dim is None else dim
        return cls(dim, tuple(sorted(set(pts))), to_fraction(resolution), to_fraction(frame))

    def __post_init__(self) -> None:
        if not self.points:
            raise ValueError("a point cloud needs at least one point")
        frame = self.frame
        for p in self.points:
            if len(p) != self.dim:
                raise DimensionMismatch(f"point {p} is not {self.dim}-dimensional")
            if any(abs(c) > frame for c in p):
                raise ValueError(f"point {tuple(map(str, p))} leaves the frame [-{frame}, {frame}]^{self.dim}")
        if self.resolution < 0:
            raise ValueError("resolution must be non-negative")

    def __len__(self) -> int:
        return len(self.points)

    @property
    def array(self) -> np.ndarray:
        if self._array is None:
            arr = np.array([[float(c) for c in p] for p in self.points], dtype=float).reshape(len(self.points), self.dim)
            object.__setattr__(self, "_array", arr)
        return self._array

    def with_resolution(self, eps) -> "PointCloudSet":
        return PointCloudSet(self.dim, self.points, to_fraction(eps), self.frame)

    def scaled(self, factor, shift=None) -> "PointCloudSet":
        """``factor * P + shift`` (frame grows if needed)."""
        f = to_fraction(factor)
        s = as_point(shift, self.dim) if shift is not None else (Fraction(0),) * self.dim
        pts = [tuple(f * c + o for c, o in zip(p, s)) for p in self.points]
        frame = max([self.frame] + [abs(c) for p in pts for c in p])
        return PointCloudSet.from_points(pts, self.dim, abs(f) * self.resolution, frame)

    def union(self, other: "PointCloudSet") -> "PointCloudSet":
        if other.dim != self.dim:
            raise DimensionMismatch("cannot unite clouds of different dimension")
        return PointCloudSet.from_points(
            self.points + other.points, self.dim, max(self.resolution, other.resolution), max(self.frame, other.frame)
        )


class WindowGenerator(ABC):
    """Deterministic producer of a construction's points inside a window.

    ``window(center, halfwidth, depth)`` returns the depth-``depth``
    approximation restricted to the cube ``Q(center, halfwidth)``; its
    resolution tag bounds the Hausdorff distance to the ideal set there.
    """

    dim: int = 1
    frame: Fraction = Fraction(1)
    default_depth: int = 4
    max_depth: int = 64

    @abstractmethod
    def resolution(self, depth: int) -> Fraction:
        ...

    @abstractmethod
    def window(self, center, halfwidth, depth: int | None = None) -> PointCloudSet | None:
        """Points in ``Q(center, halfwidth)``; ``None`` when the window is empty."""

    def points(self, depth: int | None = None) -> PointCloudSet:
        out = self.window((0,) * self.dim, self.frame, depth)
        if out is None:
            raise ValueError("generator produced no points")
        return out

    def depth_for(self, eps) -> int:
        eps = to_fraction(eps)
        for k in range(self.max_depth + 1):
            if self.resolution(k) <= eps:
                return k
        raise BudgetExceeded(f"no depth up to {self.max_depth} reaches resolution {eps}")


def _in_box(p, center, h) -> bool:
    return all(abs(a - c) <= h for a, c in zip(p, center))


class FiniteSetGenerator(WindowGenerator):
    """Generator view of a fixed point cloud (depth is ignored)."""

    def __init__(self, cloud: PointCloudSet):
        self.cloud = cloud
        self.dim = cloud.dim
        self.frame = cloud.frame

    def resolution(self, depth: int) -> Fraction:
        return self.cloud.resolution

    def window(self, center, halfwidth, depth=None):
        c = as_point(center, self.dim)
        h = to_fraction(halfwidth)
        pts = [p for p in self.cloud.points if _in_box(p, c, h)]
        if not pts:
            return None
        return PointCloudSet(self.dim, tuple(pts), self.cloud.resolution, self.cloud.frame)


def _as_generator(E) -> WindowGenerator:
    return E if isinstance(E, WindowGenerator) else FiniteSetGenerator(E)


# ---------------------------------------------------------------- distances


@dataclass(frozen=True)
class HausdorffResult:
    """Distance between the point sets plus the resolution slack of the ideal sets."""

    value: float
    slack: Fraction
    exact: Fraction | None = None
    exact_sq: Fraction | None = None

    def __float__(self) -> float:
        return self.value

    @property
    def upper(self) -> float:
        return self.value + float(self.slack)


def within(h: HausdorffResult, bound) -> bool:
    """``h <= bound``, decided exactly whenever the distance is known exactly."""
    bound = to_fraction(bound)
    if h.exact is not None:
        return h.exact <= bound
    if h.exact_sq is not None:
        return bound >= 0 and h.exact_sq <= bound * bound
    return h.value <= float(bound) * (1 + 1e-12)


def _directed_1d(A: Sequence[Fraction], Bs: list[Fraction]) -> Fraction:
    worst = Fraction(0)
    for a in A:
        i = bisect.bisect_left(Bs, a)
        best = None
        if i < len(Bs):
            best = Bs[i] - a
        if i > 0:
            v = a - Bs[i - 1]
            best = v if best is None or v < best else best
        if best > worst:
            worst = best
    return worst


def _directed_sq_exact(A, B) -> Fraction:
    worst = Fraction(0)
    for a in A:
        best = None
        for b in B:
            v = sq_norm([x - y for x, y in zip(a, b)])
            if best is None or v < best:
                best = v
                if v == 0:
                    break
        if best > worst:
            worst = best
    return worst


def _directed_float(A: np.ndarray, B: np.ndarray) -> float:
    d, _ = cKDTree(B).query(A, k=1)
    return float(np.max(d)) if len(d) else 0.0


def hausdorff_distance(A: PointCloudSet, B: PointCloudSet, exact: bool | None = None) -> HausdorffResult:
    """Hausdorff distance of the point sets (Euclidean norm).

    Exact in dimension one and, for dimension > 1, whenever
    ``len(A) * len(B) <= EXACT_PAIR_LIMIT`` (squared distance exact, value
    rounded once).  ``slack = A.resolution + B.resolution``.
    """
    if A.dim != B.dim:
        raise DimensionMismatch(f"dimensions {A.dim} and {B.dim} differ")
    slack = A.resolution + B.resolution
    if A.dim == 1:
        a = [p[0] for p in A.points]
        b = [p[0] for p in B.points]
        v = max(_directed_1d(a, b), _directed_1d(b, a))
        return HausdorffResult(float(v), slack, v, v * v)
    if exact is None:
        exact = len(A) * len(B) <= EXACT_PAIR_LIMIT
    if exact:
        sq = max(_directed_sq_exact(A.points, B.points), _directed_sq_exact(B.points, A.points))
        return HausdorffResult(math.sqrt(sq), slack, None, sq)
    v = max(_directed_float(A.array, B.array), _directed_float(B.array, A.array))
    return HausdorffResult(v, slack)


def _dist_to_set_sq(y, pts) -> Fraction:
    return min(sq_norm([a - b for a, b in zip(y, p)]) for p in pts)


# ---------------------------------------------------------------- zooming


def zoom(E, x, t, depth: int | None = None, check_center: bool = True) -> PointCloudSet:
    """``T_{x,t}(E) = ((E - x) / t) ∩ Q`` computed exactly.

    ``E`` may be a cloud or a generator; a generator is asked for the window
    ``Q(x, t)`` at ``depth`` (default: its default depth).  ``t > 1`` zooms
    out, which is how photographs are taken.  The output resolution is
    ``E.resolution / t``.
    """
    gen = _as_generator(E)
    x = as_point(x, gen.dim)
    t = to_fraction(t)
    if t <= 0:
        raise ValueError("zoom scale must be positive")
    depth = gen.default_depth if depth is None else depth
    win = gen.window(x, t, depth)
    res = gen.resolution(depth)
    if check_center:
        near = win is not None and _dist_to_set_sq(x, win.points) <= res * res
        if not near and res < t:
            raise CenterNotInSet(f"{tuple(map(str, x))} is not within {res} of the set")
    if win is None:
        raise EmptyZoom("no point of the set inside the window")
    pts = []
    for p in win.points:
        q = tuple((a - c) / t for a, c in zip(p, x))
        if all(abs(v) <= 1 for v in q):
            pts.append(q)
    if not pts:
        raise EmptyZoom("no point survives the clip to Q")
    return PointCloudSet(gen.dim, tuple(sorted(set(pts))), res / t)


@dataclass(frozen=True)
class ScanResult:
    mode: str
    best_index: int
    best_t: Fraction
    best_dh: float
    profile: list[dict]

    def rows(self) -> list[tuple[float, float, float]]:
        return [(float(r["t"]), r["dH"], r["slack"]) for r in self.profile]


def tangent_photograph_scan(E, x, F: PointCloudSet, scales: Sequence, depth: int | None = None) -> ScanResult:
    """``d_H(T_{x,t}(E), F)`` for every ``t`` in a strictly monotone grid.

    Decreasing scales scan for tangents, increasing ones for photographs.
    The best scale is the first index attaining the minimum.
    """
    ts = [to_fraction(t) for t in scales]
    if len(ts) > 1:
        dec = all(a > b for a, b in zip(ts, ts[1:]))
        inc = all(a < b for a, b in zip(ts, ts[1:]))
        if not (dec or inc):
            raise ValueError("scales must be strictly monotone")
        mode = "tangent" if dec else "photograph"
    else:
        mode = "photograph" if ts and ts[0] > 1 else "tangent"
    profile = []
    for t in ts:
        Z = zoom(E, x, t, depth=depth)
        h = hausdorff_distance(Z, F)
        profile.append({"t": t, "dH": h.value, "slack": float(h.slack), "size": len(Z)})
    best = min(range(len(profile)), key=lambda i: (profile[i]["dH"], i))
    return ScanResult(mode, best, ts[best], profile[best]["dH"], profile)


# ---------------------------------------------------------------- similarity


@dataclass(frozen=True)
class SimilarityMatch:
    """``lam * (A - anchor_a) ≈ B - anchor_b`` with Hausdorff ``residual``."""

    lam: float
    anchor_a: tuple
    anchor_b: tuple
    residual: float


@dataclass(frozen=True)
class NoMatch:
    best_residual: float
    best: SimilarityMatch | None

    def __bool__(self) -> bool:
        return False


def _residual(Aa: np.ndarray, Bb: np.ndarray, lam: float) -> float:
    S = lam * Aa
    return max(_directed_float(S, Bb), _directed_float(Bb, S))


def similar_up_to(
    A: PointCloudSet,
    B: PointCloudSet,
    lambda0: float,
    tol: float,
    grid: int = 48,
    refine: int = 40,
    prefer: Sequence[float] = (),
) -> SimilarityMatch | NoMatch:
    """Search anchors ``a ∈ A``, ``b ∈ B`` and ``λ ∈ (λ0, 1/λ0)`` with
    ``d_H(λ(A - a), B - b) <= tol``.

    For each anchor pair the candidates are the ratio of the farthest-point
    distances (exact for a true similarity) and any ``prefer`` values, then a
    logarithmic grid, then a golden-section refinement around the best grid
    value.  The first candidate within ``tol`` is returned.
    """
    if not 0 < lambda0 < 1:
        raise ValueError("lambda0 must lie in (0, 1)")
    if A.dim != B.dim:
        raise DimensionMismatch("dimensions differ")
    lo, hi = math.log(lambda0), -math.log(lambda0)
    grid_vals = [math.exp(lo + (hi - lo) * (i + 0.5) / grid) for i in range(grid)]
    Aarr, Barr = A.array, B.array
    best: SimilarityMatch | None = None
    for ia, a in enumerate(Aarr):
        Aa = Aarr - a
        ra = float(np.max(np.linalg.norm(Aa, axis=1)))
        for ib, b in enumerate(Barr):
            Bb = Barr - b
            rb = float(np.max(np.linalg.norm(Bb, axis=1)))
            cands = []
            if ra > 0 and rb > 0:
                cands.append(rb / ra)
            elif ra == 0 and rb == 0:
                cands.append(1.0)
            cands += list(prefer)
            cands = [c for c in cands if lambda0 < c < 1 / lambda0]

            def make(lam: float, res: float) -> SimilarityMatch:
                return SimilarityMatch(lam, A.points[ia], B.points[ib], res)

            for lam in cands:
                res = _residual(Aa, Bb, lam)
                m = make(lam, res)
                if best is None or res < best.residual:
                    best = m
                if res <= tol:
                    return m
            scored = [(_residual(Aa, Bb, lam), lam) for lam in grid_vals]
            k = min(range(grid), key=lambda i: (scored[i][0], i))
            res, lam = scored[k]
            if best is None or res < best.residual:
                best = make(lam, res)
            if res <= tol:
                return make(lam, res)
            # golden-section on log λ between the grid neighbours
            left = math.log(grid_vals[max(k - 1, 0)])
            right = math.log(grid_vals[min(k + 1, grid - 1)])
            phi = (math.sqrt(5) - 1) / 2
            c, d = right - phi * (right - left), left + phi * (right - left)
            fc, fd = _residual(Aa, Bb, math.exp(c)), _residual(Aa, Bb, math.exp(d))
            for _ in range(refine):
                if fc <= fd:
                    right, d, fd = d, c, fc
                    c = right - phi * (right - left)
                    fc = _residual(Aa, Bb, math.exp(c))
                else:
                    left, c, fc = c, d, fd
                    d = left + phi * (right - left)
                    fd = _residual(Aa, Bb, math.exp(d))
            lam, res = (math.exp(c), fc) if fc <= fd else (math.exp(d), fd)
            if res < best.residual:
                best = make(lam, res)
            if res <= tol:
                return make(lam, res)
    return NoMatch(best.residual if best else math.inf, best)


# ---------------------------------------------------------------- porosity


@dataclass(frozen=True)
class PorosityProfile:
    rows: list[tuple[Fraction, float]]
    upper_est: float
    lower_est: float
    candidates: str = "pair midpoints + grid of step r/32"


def _por_1d(pts: list[Fraction], x: Fraction, r: Fraction, eps: Fraction) -> Fraction:
    """Exact 1-D porosity at one radius.

    Barriers are the ball's two edges and the points of ``E`` inside it; a
    point barrier costs ``eps``.  Between consecutive barriers ``a < b`` the
    best hole has radius ``(b - a - e_a - e_b)/2``.  A point just outside the
    ball only matters when it sits within ``eps`` of an edge, which raises
    that edge's cost.
    """
    lo, hi = x - r, x + r
    pts = sorted(set(pts))
    left = max([Fraction(0)] + [p + eps - lo for p in pts if p < lo][-1:])
    right = max([Fraction(0)] + [hi - p + eps for p in pts if p > hi][:1])
    walls = [(lo, left)] + [(p, eps) for p in pts if lo <= p <= hi] + [(hi, right)]
    best = Fraction(0)
    for (a, ea), (b, eb) in zip(walls, walls[1:]):
        v = (b - a - ea - eb) / 2
        if v > best:
            best = v
    return best / r


def porosity_profile(E, x, radii: Sequence, depth: int | None = None) -> PorosityProfile:
    """``por(E, x, r)`` estimates over a decreasing radius grid.

    For each ``r`` the value is the best ``min(dist(y, E) - ε, r - |y - x|) / r``
    over candidate centres ``y`` (pair midpoints and a grid of step ``r/32``
    inside ``B(x, r)``), clamped to ``[0, 1/2]``.  In dimension one the
    optimum over all ``y`` is found exactly.  ``upper_est``/``lower_est`` are
    the max/min over the smallest quarter of the radii.
    """
    gen = _as_generator(E)
    x = as_point(x, gen.dim)
    rs = [to_fraction(r) for r in radii]
    if any(a <= b for a, b in zip(rs, rs[1:])):
        raise ValueError("radii must be strictly decreasing")
    depth = gen.default_depth if depth is None else depth
    eps = gen.resolution(depth)
    half = Fraction(1, 2)
    rows: list[tuple[Fraction, float]] = []
    for r in rs:
        win = gen.window(x, 2 * r, depth)
        pts = list(win.points) if win is not None else []
        if gen.dim == 1:
            if not pts:
                v = half
            else:
                v = _por_1d([p[0] for p in pts], x[0], r, eps)
        else:
            v = Fraction(repr(_por_nd(pts, x, r, eps, gen.dim)))
        v = min(max(v, Fraction(0)), half)
        assert 0 <= v <= half
        rows.append((r, float(v)))
    q = max(1, len(rows) // 4)
    tail = [v for _, v in rows[-q:]]
    return PorosityProfile(rows, max(tail), min(tail))


def _por_nd(pts, x, r, eps, dim) -> float:
    xr = np.array([float(c) for c in x])
    rf, ef = float(r), float(eps)
    steps = np.arange(-32, 33) / 32.0 * rf
    mesh = np.stack(np.meshgrid(*([steps] * dim), indexing="ij"), axis=-1).reshape(-1, dim)
    mesh = mesh[np.linalg.norm(mesh, axis=1) <= rf] + xr
    cands = [mesh]
    if pts:
        P = np.array([[float(c) for c in p] for p in pts])
        if len(P) > 1:
            tree = cKDTree(P)
            k = min(7, len(P))
            _, nb = tree.query(P, k=k)
            mids = (P[:, None, :] + P[nb[:, 1:]]) / 2
            mids = mids.reshape(-1, dim)
            mids = mids[np.linalg.norm(mids - xr, axis=1) <= rf]
            cands.append(mids)
        Y = np.concatenate(cands)
        dist, _ = cKDTree(P).query(Y, k=1)
    else:
        Y = np.concatenate(cands)
        dist = np.full(len(Y), np.inf)
    room = rf - np.linalg.norm(Y - xr, axis=1)
    vals = np.minimum(dist - ef, room) / rf
    return float(np.max(vals))


# ---------------------------------------------------------------- box counting


@dataclass(frozen=True)
class BoxDimension:
    depths: list[int]
    sides: list[Fraction]
    counts: list[int]
    lower_slope: float
    upper_slope: float
    fit_slope: float

    def rows(self) -> list[tuple[int, float, int, float]]:
        out = []
        for k, s, n in zip(self.depths, self.sides, self.counts):
            ratio = math.log(n) / math.log(1 / float(s)) if s < 1 else float("nan")
            out.append((k, float(s), n, ratio))
        return out


def box_dimension(E, k_min: int, k_max: int, depth: int | None = None, budget: int = 2_000_000) -> BoxDimension:
    """Count dyadic cubes of side ``2·2^{-k}`` (tiling the frame cube) that
    meet the generator's points, for ``k = k_min..k_max``.

    Slopes are ``log N / log(1/side)``; the reported lower/upper values are
    the min/max over the deepest half of the range.  ``fit_slope`` is the
    least-squares slope of ``log N`` against ``log(1/side)`` over that half,
    which drops the ``log C / log(1/side)`` bias of the plain ratios.
    """
    if not 1 <= k_min <= k_max:
        raise ValueError("need 1 <= k_min <= k_max")
    gen = _as_generator(E)
    cloud = gen.points(depth)
    if len(cloud) > budget:
        raise BudgetExceeded(f"{len(cloud)} points exceed the budget {budget}")
    frame = gen.frame
    depths, sides, counts = [], [], []
    for k in range(k_min, k_max + 1):
        side = 2 * frame / 2**k
        top = 2**k - 1
        cells = set()
        for p in cloud.points:
            cells.add(tuple(min(int((c + frame) // side), top) for c in p))
        depths.append(k)
        sides.append(side)
        counts.append(len(cells))
    ratios = [math.log(n) / math.log(1 / float(s)) for n, s in zip(counts, sides) if s < 1]
    if not ratios:
        raise ValueError("range too coarse for slopes")
    half = ratios[len(ratios) // 2 :] if len(ratios) > 1 else ratios
    # least-squares slope of log N against log(1/side) over the same deepest half
    xs = [-math.log(float(s)) for s in sides][len(sides) // 2 :]
    ys = [math.log(n) for n in counts][len(counts) // 2 :]
    fit = float(np.polyfit(xs, ys, 1)[0]) if len(xs) > 1 else half[-1]
    return BoxDimension(depths, sides, counts, min(half), max(half), fit)
