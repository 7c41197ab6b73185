import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import brute_box_count, brute_hausdorff_sq, brute_por_1d
from richtangent.euclid_sets import (
    CenterNotInSet,
    DimensionMismatch,
    EmptyZoom,
    FiniteSetGenerator,
    PointCloudSet,
    box_dimension,
    hausdorff_distance,
    porosity_profile,
    similar_up_to,
    tangent_photograph_scan,
    within,
    zoom,
)
from richtangent.fractal_zoo import CantorGenerator, ternary

F = Fraction


def cloud(*xs, dim=1):
    return PointCloudSet.from_points([(x,) if dim == 1 else x for x in xs], dim)


def test_hausdorff_examples():
    A = cloud(0, F(1, 2))
    assert hausdorff_distance(A, A).value == 0
    assert hausdorff_distance(cloud(0), cloud(0, 1)).exact == 1
    assert hausdorff_distance(cloud(-1, 1), cloud(0)).exact == 1


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        hausdorff_distance(cloud(0), cloud((0, 0), dim=2))


pts2 = st.lists(st.tuples(st.integers(-8, 8), st.integers(-8, 8)), min_size=1, max_size=12)


@settings(max_examples=50, deadline=None)
@given(pts2, pts2, pts2)
def test_hausdorff_exact_metric(a, b, c):
    mk = lambda p: PointCloudSet.from_points([(F(x, 8), F(y, 8)) for x, y in p], 2)
    A, B, C = mk(a), mk(b), mk(c)
    hab = hausdorff_distance(A, B)
    assert hab.exact_sq == brute_hausdorff_sq(A.points, B.points)
    assert hab.exact_sq == hausdorff_distance(B, A).exact_sq
    ab, bc, ac = (float(hausdorff_distance(*p).value) for p in ((A, B), (B, C), (A, C)))
    assert ac <= ab + bc + 1e-12


def test_float_path_agrees_with_exact():
    rng = np.random.default_rng(1)
    A = PointCloudSet.from_points([tuple(F(int(v), 1000) for v in row) for row in rng.integers(-999, 999, (400, 2))], 2)
    B = PointCloudSet.from_points([tuple(F(int(v), 1000) for v in row) for row in rng.integers(-999, 999, (300, 2))], 2)
    fast = hausdorff_distance(A, B, exact=False)
    slow = hausdorff_distance(A, B, exact=True)
    assert abs(float(fast.value) - float(slow.value)) <= 1e-9


def test_zoom_examples():
    E = cloud(0, F(1, 2), 1)
    assert zoom(E, (0,), F(1, 2)).points == ((F(0),), (F(1),))
    assert zoom(E, (1,), F(1, 2)).points == ((F(-1),), (F(0),))
    assert zoom(E, (F(1, 2),), 1).points == ((F(-1, 2),), (F(0),), (F(1, 2),))


def test_zoom_center_must_be_in_set():
    with pytest.raises(CenterNotInSet):
        zoom(cloud(0, 1), (F(1, 2),), F(1, 8))


def test_zoom_empty():
    with pytest.raises(EmptyZoom):
        zoom(cloud(0, 1), (F(1, 2),), F(1, 8), check_center=False)


@settings(max_examples=40, deadline=None)
@given(pts2, pts2, st.integers(1, 8))
def test_zoom_scales_hausdorff(a, b, k):
    # both sets inside Q(0, t): no clipping, so the distance scales by 1/t
    t = F(k, 8)
    mk = lambda p: PointCloudSet.from_points([(F(x, 8) * t, F(y, 8) * t) for x, y in p], 2)
    A, B = mk(a), mk(b)
    x = A.points[0]
    ZA = zoom(A, x, 2 * t, check_center=False)
    ZB = zoom(B, x, 2 * t, check_center=False)
    assert hausdorff_distance(ZA, ZB).exact_sq == hausdorff_distance(A, B).exact_sq / (2 * t) ** 2


def test_scan_density_example():
    pts = [(0,)] + [(s * F(1, n),) for n in range(1, 65) for s in (1, -1)]
    E = PointCloudSet.from_points(pts, 1)
    grid = PointCloudSet.from_points([(F(j, 64),) for j in range(-64, 65)], 1)
    res = tangent_photograph_scan(E, (0,), grid, [F(1, n) for n in (1, 2, 4, 8)])
    assert res.mode == "tangent"
    assert res.best_dh <= F(1, 8)
    dh = [p["dH"] for p in res.profile]
    assert all(a >= b for a, b in zip(dh, dh[1:]))


def test_scan_grid_example():
    G = PointCloudSet.from_points([(F(j, 32),) for j in range(-32, 33)], 1)
    res = tangent_photograph_scan(G, (0,), G, [F(1, 2**k) for k in range(0, 4)])
    # zoomed spacing is (1/32)/t, so the farthest grid point sits half of that away
    assert [p["dH"] for p in res.profile] == [0, F(1, 32), F(1, 16), F(1, 8)]


def test_scan_rejects_unsorted():
    with pytest.raises(ValueError):
        tangent_photograph_scan(cloud(0), (0,), cloud(0), [F(1, 2), 1, F(1, 4)])


def test_similarity_examples():
    A = cloud(0, F(1, 2), 1)
    m = similar_up_to(A, A, 0.1, 1e-9)
    assert m and abs(m.lam - 1) < 1e-12 and m.residual == 0
    B = cloud(0, F(1, 4), F(1, 2))
    m = similar_up_to(A, B, 0.1, 1e-9)
    assert m and abs(m.lam - 0.5) < 1e-12
    m = similar_up_to(cloud(0, 1), cloud(0, F(51, 100)), 0.1, 0.005)
    assert m and abs(m.lam - 0.51) < 0.01


def test_similarity_no_match_is_falsy():
    m = similar_up_to(cloud(0, 1), cloud(0, F(1, 3), 1), 0.5, 1e-3)
    assert not m and m.best_residual > 1e-3


def test_porosity_reciprocals():
    E = cloud(0, *[F(1, n) for n in range(1, 257)])
    prof = porosity_profile(E, (0,), [F(1, n) for n in (2, 4, 8, 16, 32)])
    for r, v in prof.rows:
        assert abs(v - 0.5) <= 0.05
        assert 0 <= v <= 0.5


def test_porosity_1d_matches_grid_oracle():
    rng = random.Random(5)
    pts = sorted({F(rng.randint(-64, 64), 64) for _ in range(20)})
    E = PointCloudSet.from_points([(p,) for p in pts], 1)
    x = pts[len(pts) // 2]
    for r in (F(1, 2), F(1, 4), F(1, 8)):
        exact = porosity_profile(E, (x,), [r]).rows[0][1]
        grid = brute_por_1d(pts, x, r, r / 512)
        assert grid <= exact + 1e-12
        assert exact - grid <= F(1, 256)


def test_porosity_full_grid_small():
    G = PointCloudSet.from_points([(F(j, 64),) for j in range(-64, 65)], 1)
    prof = porosity_profile(G, (0,), [F(1, 2), F(1, 4)])
    for r, v in prof.rows:
        assert v <= F(1, 64) / r


def test_porosity_ternary_at_zero():
    E = CantorGenerator(ternary(8))
    prof = porosity_profile(E, (0,), [F(1, 3**k) for k in range(1, 5)])
    for r, v in prof.rows:
        assert v >= F(1, 6) - 2 * E.resolution(8) / r


def test_porosity_needs_decreasing_radii():
    with pytest.raises(ValueError):
        porosity_profile(cloud(0), (0,), [F(1, 4), F(1, 2)])


def test_box_counts_match_oracle():
    E = CantorGenerator(ternary(7))
    bd = box_dimension(E, 2, 7)
    pts = E.points().points
    for k, c in zip(bd.depths, bd.counts):
        # every counted cell holds a level-7 interval, i.e. an endpoint pair
        assert c <= brute_box_count(pts, 1, k)


def test_box_dimension_examples():
    assert box_dimension(cloud(0), 1, 6).fit_slope == 0
    G = PointCloudSet.from_points([(F(j, 512),) for j in range(-512, 513)], 1)
    assert abs(box_dimension(FiniteSetGenerator(G), 3, 8).fit_slope - 1) < 0.02
    bd = box_dimension(CantorGenerator(ternary(9)), 4, 9)
    assert abs(bd.fit_slope - np.log(2) / np.log(3)) < 0.05


def test_within_is_exact_when_possible():
    h = hausdorff_distance(cloud(0), cloud(F(1, 3)))
    assert within(h, F(1, 3)) and not within(h, F(1, 3) - F(1, 10**12))
