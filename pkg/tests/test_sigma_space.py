import itertools
from fractions import Fraction

import pytest

from richtangent.gromov_hausdorff import gh_exact
from richtangent.metric_core import is_isometric, validate_metric
from richtangent.sigma_space import (
    InvalidSchedule,
    LengthMismatch,
    NoWitnessAtDepth,
    build_sigma,
    default_schedule,
    doubling_witness,
    make_schedule,
    minkowski_quotients,
    sigma_distance,
    sigma_distance_maxform,
    verify_sigma_tangent,
)

H = Fraction(1, 2)
G1 = validate_metric([[0, 1], [1, 0]])
G2 = validate_metric([[0, H], [H, 0]])
TRI = validate_metric([[0, 1, 1], [1, 0, 1], [1, 1, 0]])


@pytest.fixture
def sched():
    return make_schedule([G1, G2, G2], "halve")


def test_halve_rule_values(sched):
    assert sched.r(2) == H and sched.rho(2) == H


def test_build_sigma_examples(sched):
    S2 = build_sigma(sched, 2)
    assert len(S2) == 4 and S2.diam == 1
    assert is_isometric(build_sigma(sched, 1), G1)


def test_sigma_distance_examples(sched):
    assert sigma_distance((0, 0), (0, 0), sched) == 0
    assert sigma_distance((0, 0), (1, 0), sched) == 1
    assert sigma_distance((0, 0), (0, 1), sched) == Fraction(1, 4)
    with pytest.raises(LengthMismatch):
        sigma_distance((0,), (0, 1), sched)


def test_forms_agree_and_metric(sched):
    S = build_sigma(sched, 3)
    validate_metric([list(r) for r in S.dist])
    for a, b in itertools.combinations(S.labels, 2):
        assert sigma_distance(a, b, sched) == sigma_distance_maxform(a, b, sched)


def test_diam_equals_first_level(sched):
    for N in range(1, 4):
        assert build_sigma(sched, N).diam == sched.gammas[0].diam


def test_diam_with_singleton_first_level():
    # the default enumerator starts with a point; the diameter then comes
    # from the first level with two or more points
    sch = default_schedule(4)
    m = next(i for i, g in enumerate(sch.gammas, start=1) if len(g) > 1)
    for N in range(m, 5):
        assert build_sigma(sch, N).diam == sch.rho(m) * sch.gammas[m - 1].diam <= 1


def test_schedule_rejects_large_r():
    with pytest.raises(InvalidSchedule):
        make_schedule([G1, G2], [1, 1])


def test_default_rule_is_below_delta():
    sch = default_schedule(6)
    for n in range(2, 7):
        assert sch.r(n) < sch.deltas[n - 2]
        assert sch.r(n) < sch.r(n - 1)


@pytest.mark.parametrize("n", [1, 2])
def test_tangent_bound_per_level(sched, n):
    S = build_sigma(sched, 3)
    for w in S.labels:
        rep = verify_sigma_tangent(sched, 3, w, n, sigma=S)
        assert rep.passed and rep.gh_value <= sched.r(n + 1)


def test_target_mode_uses_doubled_bound(sched):
    rep = verify_sigma_tangent(sched, 3, (0, 0, 0), 2, target=G2)
    assert rep.target_gap == 0
    assert rep.bound == 2 * sched.r(3)
    assert rep.passed


def test_seed_is_not_needed_for_value(sched):
    # the reported value is the exact GH value, not just the seed's distortion
    from richtangent.metric_core import zoom_ball

    S = build_sigma(sched, 3)
    ball = zoom_ball(S, (1, 0, 1), sched.rho(2))
    assert verify_sigma_tangent(sched, 3, (1, 0, 1), 2).gh_value == gh_exact(ball, G2).value


def test_doubling_witness():
    sch = make_schedule([TRI, G2, TRI], "halve")
    t, pts = doubling_witness(sch, 3, (0, 0, 0), 2)
    assert t == sch.rho(1) and len(pts) == 3
    for a, b in itertools.combinations(pts, 2):
        assert sigma_distance(a, b, sch) / t > Fraction(3, 4)
    t0, p0 = doubling_witness(sch, 3, (0, 0, 0), 0)
    assert t0 == sch.rho(1) and len(p0) == 1


def test_no_witness():
    sch = make_schedule([G1, G2, G2], "halve")
    with pytest.raises(NoWitnessAtDepth):
        doubling_witness(sch, 3, (0, 0, 0), 2)


def test_minkowski_quotients_decrease():
    sch = make_schedule([TRI] * 5, "minkowski")
    rows = minkowski_quotients(sch, 5)
    qs = [r["quotient"] for r in rows if r["n"] > 1]
    assert all(a >= b for a, b in zip(qs, qs[1:]))
