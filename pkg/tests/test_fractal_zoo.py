import math
from fractions import Fraction

import pytest

from richtangent.euclid_sets import PointCloudSet, hausdorff_distance, zoom
from richtangent.fractal_zoo import (
    CantorGenerator,
    CompositeGenerator,
    ConditionViolation,
    GlobalGenerator,
    InvalidCantor,
    NoConvergence,
    ScheduleViolation,
    UnionGenerator,
    build_c0,
    build_cinf,
    build_kinf,
    c0_tangent_profile,
    cantor_build,
    cantor_dimension,
    cantor_params,
    check_alignment,
    check_c0,
    check_disjoint_cylinders,
    check_global,
    check_sandwich,
    default_c0_params,
    default_global_params,
    finitely_generated_zoom,
    gap_ratio,
    geometric_tail,
    global_rich_build,
    kinf_cover_sum,
    make_ifs,
    moran_dimension,
    photograph_profile,
    power_family,
    predicted_k,
    self_similar_zoom_check,
    ternary,
    whitney_cubes,
    whitney_glue,
    zero_tangent_construction,
    zero_tangent_scan,
)
from richtangent.fractal_zoo.c0 import C0Params

F = Fraction
LOG23 = math.log(2) / math.log(3)


# ---------------------------------------------------------------- C0


def test_c0_defaults_conditions():
    p = default_c0_params(6)
    assert p.a[0] == F(1, 2) and p.lam[0] == F(1, 2)
    rep = check_c0(p)
    assert rep["cond1"] == "1"
    assert rep["cond2"][0] == ("3/16", "1/2")


def test_c0_condition_violation():
    p = default_c0_params(3)
    bad = C0Params((F(1, 2), F(1, 2)) + p.a[2:], p.lam, p.gammas)
    with pytest.raises(ConditionViolation) as e:
        check_c0(bad)
    assert e.value.which == "(2)"


@pytest.mark.parametrize("dim", [1, 2])
def test_c0_profile_bound(dim):
    gen, _ = build_c0(default_c0_params(6, dim))
    rows = c0_tangent_profile(gen)
    for r in rows:
        assert r["pass"]
        assert r["bound"] <= dim / (1 + r["n"]) + 1e-15
    bounds = [r["bound"] for r in rows]
    assert all(a > b for a, b in zip(bounds[1:], bounds[2:]))


# ---------------------------------------------------------------- IFS


def test_ifs_level_ratios_and_images():
    p = default_c0_params(3)
    sys = make_ifs(p)
    check_disjoint_cylinders(sys)
    for n in range(1, 4):
        assert sorted(sys.translations[n - 1]) == sorted(p.piece(n))
    assert sys.eps[0] == F(1, 2)


def test_ifs_rejects_bad_eps():
    with pytest.raises(ScheduleViolation):
        make_ifs(default_c0_params(3), [F(3, 4), F(1, 4), F(1, 8)])


def test_cinf_depth_zero_is_c0_prefix():
    p = default_c0_params(3)
    gen = build_cinf(make_ifs(p), 2)
    c0, _ = build_c0(p)
    assert set(gen.points(0).points) == set(c0.points(3).points)


@pytest.mark.parametrize("word,t", [([(1, 1)], F(1, 2)), ([(2, 2)], F(1, 3)), ([(2, 2), (1, 1)], F(1, 3))])
def test_cinf_self_similar_zoom(word, t):
    gen = build_cinf(make_ifs(default_c0_params(3)), 2)
    assert self_similar_zoom_check(gen, word, t)["pass"]


def test_finitely_generated_zoom_alpha_range():
    gen = build_cinf(make_ifs(default_c0_params(3)), 2)
    for t in (F(1, 100), F(1, 1000), F(1, 5000)):
        r = finitely_generated_zoom(gen, [(2, 2)] * 3, t)
        assert 1 - 1e-9 <= r["alpha_diam"] <= r["upper"]
        assert r["dH"] <= r["slack"]


def test_kinf_ratio_bound():
    sys = make_ifs(default_c0_params(3), "kinf")
    for n, (g, r) in enumerate(zip(sys.translations, sys.ratios), start=1):
        assert r <= F(1, (2 * len(g)) ** n)


def test_kinf_cover_sums():
    sys = make_ifs(default_c0_params(3), "kinf")
    k0 = predicted_k(0.5, sys)
    vals = [kinf_cover_sum(k, 0.5, sys).value for k in range(1, k0 + 1)]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    assert vals[-1] < 1e-6
    s = kinf_cover_sum(k0, 0.5, sys)
    assert s.value <= s.closed_form < 1e-6


def test_kinf_generator_builds():
    gen = build_kinf(make_ifs(default_c0_params(3), "kinf"), 1)
    assert len(gen.points(1)) > len(gen.points(0))


# ---------------------------------------------------------------- Moran


def test_moran_examples():
    assert moran_dimension([0.5]).s == 0
    assert abs(moran_dimension([F(1, 3)] * 2).s - LOG23) < 1e-9
    r = moran_dimension([0.5, 0.25], tail=geometric_tail(0.5, 0.5, 3))
    assert abs(r.s - 1) < 1e-9


def test_moran_residual_and_trace():
    r = moran_dimension([0.2, 0.3, 0.4])
    assert r.residual <= 1e-8
    sums = [v for _, v, _ in r.trace]
    assert all(a >= b for a, b in zip(sums, sums[1:]))


def test_moran_loose_tail_refused():
    with pytest.raises(NoConvergence):
        moran_dimension([0.5], tail=lambda s: 0.5 ** s)


# ---------------------------------------------------------------- Cantor


def test_ternary_level_two():
    lefts, length = cantor_build(ternary(2))
    assert lefts == [0, F(2, 9), F(2, 3), F(8, 9)] and length == F(1, 9)
    assert cantor_build(ternary(2), 0) == ([0], 1)


def test_cantor_counts_and_alignment():
    p = cantor_params([2, 3, 4], [F(1, 3), F(1, 4), F(1, 5)])
    lefts, length = cantor_build(p)
    assert len(lefts) == 24 and length == F(1, 60)
    check_alignment(p)


def test_cantor_invalid():
    with pytest.raises(InvalidCantor):
        cantor_params([2], [F(1, 2)])


def test_cantor_dimension_values():
    assert all(abs(v - LOG23) < 1e-12 for v in cantor_dimension(ternary(6)).values)
    d = cantor_dimension(power_family(F(1, 2), 30), s=F(1, 2))
    assert 0.45 <= d.value <= 0.55
    assert gap_ratio(F(1, 2), 4) == F(1, 4)
    assert d.gap_ratios[2] == F(1, 4)


def test_power_family_half():
    p = power_family(F(1, 2), 4)
    assert p.m == (1, 2, 3, 4) and p.lam == (1, F(1, 4), F(1, 9), F(1, 16))


def test_cantor_generator_product():
    g = CantorGenerator(ternary(2), 2)
    assert len(g.points(2)) == 16


# ---------------------------------------------------------------- zero tangents


def test_zero_tangent_finite():
    g = zero_tangent_construction(0)
    assert g.points().points == ((F(0),), (F(1, 2),))


def test_zero_tangent_half_uses_power_family():
    g = zero_tangent_construction(F(1, 2), 1, depth=5)
    assert isinstance(g, CantorGenerator) and g.p == power_family(F(1, 2), 5)


@pytest.mark.parametrize("s,d,depth", [(F(1, 2), 1, 7), (F(1, 2), 2, 5), (F(1, 4), 1, 7)])
def test_zero_tangent_scan_decreases(s, d, depth):
    # the product set grows like (depth!)^d, so d = 2 stays shallow
    g = zero_tangent_construction(s, d, depth=depth)
    res = zero_tangent_scan(g, (0,) * d, [2, 3, 4])
    dh = [r["dH"] for r in res.profile]
    assert dh[-1] < dh[0] and all(a >= b for a, b in zip(dh, dh[1:]))


def test_zero_tangent_union():
    g = zero_tangent_construction(1, 1, depth=5, pieces=4)
    assert isinstance(g, UnionGenerator)
    dh = [r["dH"] for r in zero_tangent_scan(g, (0,), [1, 2, 3]).profile]
    assert dh == [0.75, 0.5, 0.3125]


# ---------------------------------------------------------------- global


def test_global_conditions():
    p = default_global_params(4)
    assert check_global(p)["rows"][0] == ("5", "16", "1/2")


@pytest.mark.parametrize("dim", [1, 2])
def test_photograph_profile(dim):
    gen = global_rich_build("A", 5, dim)
    rows = photograph_profile(gen, levels=range(1, 5))
    assert all(r["pass"] for r in rows)
    bounds = [r["bound"] for r in rows]
    assert all(b <= dim / (1 + n) + 1e-15 for n, b in enumerate(bounds, start=1))


def test_photograph_at_other_point():
    gen = global_rich_build("A", 5)
    x = gen.params.piece(2)[-1]
    assert all(r["pass"] for r in photograph_profile(gen, x, range(3, 5)))


def test_composite_disjoint():
    gen = global_rich_build("composite", 4)
    assert isinstance(gen, CompositeGenerator)
    assert gen.check_disjoint() >= 0
    base = gen.base
    A = base.points()
    E = gen.points()
    h = hausdorff_distance(E, A)
    assert h.value <= float(max(gen.scales)) * 2


def test_global_window_past_prefix():
    from richtangent.euclid_sets import BudgetExceeded

    gen = GlobalGenerator(default_global_params(2))
    with pytest.raises(BudgetExceeded):
        gen.window((0,), 1000)


# ---------------------------------------------------------------- Whitney


def test_whitney_point_1d():
    F0 = PointCloudSet.from_points([(0,)], 1)
    cubes = whitney_cubes(F0, 6)
    check_sandwich(cubes)
    assert len(cubes) == 12
    sides = sorted({c.side for c in cubes})
    assert sides == [F(1, 2**k) for k in range(6, 0, -1)]


def test_whitney_2d_sandwich():
    F0 = PointCloudSet.from_points([(0, 0), (F(1, 2), F(-1, 2))], 2)
    check_sandwich(whitney_cubes(F0, 5))


def test_whitney_glue_scale():
    g = whitney_glue(PointCloudSet.from_points([(0,)], 1))
    by_side = {c.side: s for c, (_, s) in zip(g.cubes, g.copies)}
    assert by_side[F(1, 4)] == F(1, 20)
    assert (F(0),) in g.window((0,), F(1, 100)).points


def test_whitney_rejects_high_dim():
    with pytest.raises(ValueError):
        whitney_cubes(PointCloudSet.from_points([(0, 0, 0)], 3), 2)
