import itertools
import random
from fractions import Fraction

import pytest

from richtangent.euclid_sets import PointCloudSet
from richtangent.pisigma import (
    BudgetExceeded,
    EuclidGammaSequence,
    InvalidGammas,
    NotInBall,
    PatternUnknown,
    PiCoding,
    ScheduleViolation,
    baire_block_check,
    block_centers,
    block_set,
    build_from_config,
    build_pisigma,
    check_nested,
    continuity_gap,
    injectivity_margin,
    jittered_block_set,
    make_pi_schedule,
    project,
    special_point_coding,
    verify_pisigma_tangent,
)
from richtangent.rational import max_norm

F = Fraction
HALF = [(F(0),), (F(1, 2),)]


def all_codings(sch, n):
    return [PiCoding(c) for c in itertools.product(*sch.gammas[:n])]


def test_delta_and_scale_example():
    sch, gen = build_pisigma([HALF, HALF])
    assert sch.delta_sq[0] == F(1, 4)
    assert sch.r(2) <= F(1, 16)
    assert gen.window((0,), 1, 1).points == ((F(0),), (F(1, 2),))


def test_explicit_rule_is_validated():
    make_pi_schedule(1, [HALF], [1, F(1, 16)])
    with pytest.raises(ScheduleViolation):
        make_pi_schedule(1, [HALF], [1, F(1, 8)])
    with pytest.raises(ScheduleViolation):
        make_pi_schedule(1, [HALF, HALF], [1, F(1, 16), F(1, 16)])


def test_gammas_must_contain_origin():
    with pytest.raises(InvalidGammas):
        build_pisigma([[F(1, 2)]])
    with pytest.raises(InvalidGammas):
        build_pisigma([[0, 1]])


def test_base_pattern_order():
    seq = EuclidGammaSequence.from_grid(1, 2, 2, 7)
    assert seq.base == (((F(0),),), ((F(-1, 2),), (F(0),)), ((F(0),), (F(1, 2),)))
    assert seq.occurrences(HALF) == [3, 6]
    with pytest.raises(PatternUnknown):
        seq.occurrences([0, F(1, 3)])


def test_whole_window_has_every_point():
    seq = EuclidGammaSequence.from_grid(1, 2, 3, 5)
    sch, gen = build_pisigma(seq)
    n = 4
    total = 1
    for g in sch.gammas[:n]:
        total *= len(g)
    assert len(gen.window((0,), 1, n)) == total


def test_small_window_keeps_first_coordinate_zero():
    sch, gen = build_pisigma([HALF, HALF, HALF])
    pts = gen.window((0,), sch.rho(2), 3).points
    assert pts and all(p[0] < F(1, 4) for p in pts)


@pytest.mark.parametrize("center,half", [((0,), F(1, 64)), ((F(1, 2),), F(1, 40)), ((F(1, 70),), F(1, 100)), ((F(-1, 3),), F(1, 5))])
def test_window_matches_brute_force(center, half):
    seq = EuclidGammaSequence.from_grid(1, 2, 3, 5)
    sch, gen = build_pisigma(seq)
    n = 5
    rho = sch.rho(n + 1)
    brute = set()
    for c in all_codings(sch, n):
        p = project(sch, c)
        if all(abs(a - b) <= half + rho for a, b in zip(p, center)):
            brute.add(p)
    got = gen.window(center, half, n)
    assert set(got.points if got else ()) == brute


def test_window_budget():
    sch, gen = build_pisigma(EuclidGammaSequence.from_grid(1, 2, 3, 5), budget=10)
    with pytest.raises(BudgetExceeded):
        gen.window((0,), 1, 5)


def test_nested_and_injective_2d():
    seq = EuclidGammaSequence.from_grid(2, 2, 2, 3)
    sch, gen = build_pisigma(seq)
    check_nested(sch)
    assert injectivity_margin(gen, 3) >= 0


def test_continuity_on_random_pairs():
    sch, _ = build_pisigma(EuclidGammaSequence.from_grid(1, 3, 3, 6))
    rng = random.Random(3)
    for _ in range(200):
        a = PiCoding(tuple(rng.choice(g) for g in sch.gammas))
        b = PiCoding(tuple(rng.choice(g) for g in sch.gammas))
        if a == b:
            continue
        assert continuity_gap(sch, a, b) >= 0


def test_special_coding():
    seq = EuclidGammaSequence.from_grid(1, 2, 2, 9)
    c = special_point_coding(seq, HALF, 9)
    for n in seq.occurrences(HALF, 9):
        assert c.coords[n - 1] == (F(0),)
    assert special_point_coding(seq, None, 9).coords == ((F(0),),) * 9
    with pytest.raises(PatternUnknown):
        special_point_coding(seq, [0, F(1, 3)], 9)


def test_truncation_stays_close_to_extensions():
    seq = EuclidGammaSequence.from_grid(1, 2, 2, 8)
    sch, _ = build_pisigma(seq)
    c = special_point_coding(seq, HALF, 8)
    N = 4
    p = project(sch, c.truncated(N))
    for tail in itertools.product(*sch.gammas[N:]):
        q = project(sch, PiCoding(c.coords[:N] + tail))
        assert max_norm([a - b for a, b in zip(p, q)]) <= sch.rho(N + 1)


def test_dense_mode_bound():
    seq = EuclidGammaSequence.from_grid(1, 2, 2, 7)
    sch, gen = build_pisigma(seq)
    c = special_point_coding(seq, HALF, 7)
    for k in seq.occurrences(HALF, 6):
        rep = verify_pisigma_tangent(gen, c, k, "dense")
        assert rep.passed, rep
        assert rep.bound == 2 * float(sch.r(k + 1))


def test_dense_mode_trivial_pattern():
    seq = EuclidGammaSequence.from_grid(1, 2, 2, 6)
    sch, gen = build_pisigma(seq)
    c = special_point_coding(seq, [0], 6)
    rep = verify_pisigma_tangent(gen, c, 1, "dense")
    assert rep.passed and rep.dH <= rep.bound + rep.slack


def test_dense_mode_needs_zero():
    sch, gen = build_pisigma([HALF, HALF])
    with pytest.raises(ValueError):
        verify_pisigma_tangent(gen, PiCoding(((F(1, 2),), (F(0),))), 1, "dense")


def test_allpoints_mode_nonzero_coordinate():
    seq = EuclidGammaSequence.from_grid(1, 2, 2, 7)
    sch, gen = build_pisigma(seq)
    c = PiCoding(tuple(g[-1] for g in seq.gammas))
    rep = verify_pisigma_tangent(gen, c, 3, "allpoints")
    assert rep.passed and 1.9 <= rep.lam <= 2.1
    assert rep.b == (F(-1, 4),)


def test_block_centers():
    assert block_centers(1, 1) == [(F(-2, 3),), (F(0),), (F(2, 3),)]
    assert len(block_centers(2, 2)) == 81


def test_baire_exact_block():
    rep = baire_block_check(1, [0, F(1, 2)])
    assert rep.passed and rep.worst == 0


@pytest.mark.parametrize("n,dim", [(1, 1), (2, 1), (1, 2)])
def test_baire_jittered_block(n, dim):
    g = [(F(0),) * dim, (F(1, 2),) + (F(0),) * (dim - 1)]
    E = jittered_block_set(n, g)
    rep = baire_block_check(n, g, E)
    assert rep.passed, (rep.worst, rep.bound)


def test_baire_rejects_far_set():
    g = [0, F(1, 2)]
    far = PointCloudSet.from_points([(p[0] + F(1, 10),) for p in block_set(1, g).points], 1)
    with pytest.raises(NotInBall):
        baire_block_check(1, g, far)


def test_config_builder():
    seq, sch, gen = build_from_config({"dim": 1, "gamma_denominator": 2, "max_points": 2, "rule_margin": 2, "depth": 4})
    assert seq.length == 4 and sch.depth == 4 and gen.max_depth == 4
