import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from oracles import all_spaces
from richtangent.metric_core import (
    AsymmetryViolation,
    RationalSpaceEnumerator,
    TriangleViolation,
    ZeroDiagonalViolation,
    canonical_form,
    enumerate_rational_spaces,
    is_isometric,
    read_matrix_csv,
    validate_metric,
    write_matrix_csv,
    zoom_ball,
)

H = Fraction(1, 2)


def test_two_point_space():
    X = validate_metric([[0, 1], [1, 0]])
    assert X.diam == 1


def test_triangle_violation_names_indices():
    with pytest.raises(TriangleViolation) as e:
        validate_metric([[0, 1, 3], [1, 0, 1], [3, 1, 0]])
    assert e.value.indices == (0, 2, 1)


def test_asymmetry():
    with pytest.raises(AsymmetryViolation) as e:
        validate_metric([[0, 0.5], [0.6, 0]])
    assert e.value.indices == (0, 1)


def test_zero_between_distinct_points():
    with pytest.raises(ZeroDiagonalViolation):
        validate_metric([[0, 0], [0, 0]])


@pytest.fixture
def abc():
    return validate_metric([[0, H, 1], [H, 0, H], [1, H, 0]], labels=["a", "b", "c"])


def test_zoom_ball_examples(abc):
    one = zoom_ball(abc, "a", 1)
    assert one.labels == ("a", "b", "c")
    assert zoom_ball(abc, "a", 2).d("a", "c") == H
    assert zoom_ball(abc, "a", H).labels == ("a", "b")
    assert len(zoom_ball(abc, "a", Fraction(1, 4))) == 1


def test_zoom_large_radius_is_rescale(abc):
    Z = zoom_ball(abc, "b", 4)
    assert is_isometric(Z, abc.scaled(Fraction(1, 4)))


def _random_space(rng, n):
    pts = [(rng.randint(0, 6), rng.randint(0, 6)) for _ in range(n)]
    pts = list(dict.fromkeys(pts))
    M = [[Fraction(abs(p[0] - q[0]) + abs(p[1] - q[1]), 12) for q in pts] for p in pts]
    return validate_metric(M)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 6))
def test_canonical_form_permutation_invariant(seed, n):
    rng = random.Random(seed)
    X = _random_space(rng, n)
    perm = list(range(len(X)))
    rng.shuffle(perm)
    assert canonical_form(X.permuted(perm)) == canonical_form(X)


def test_canonical_form_matches_brute_force():
    # lower-triangle order, minimised over all permutations
    for D in all_spaces(4):
        X = validate_metric(D)
        n = len(D)
        brute = min(
            tuple(D[p[i]][p[j]] for i in range(n) for j in range(i)) for p in itertools.permutations(range(n))
        )
        assert canonical_form(X) == (n, brute)


def test_enumerator_starts_with_singleton():
    e = RationalSpaceEnumerator(max_points=3, max_denominator=2)
    assert len(enumerate_rational_spaces(e, 1)[0]) == 1


def test_enumerator_two_point_count():
    e = RationalSpaceEnumerator(max_points=2, max_denominator=2)
    multi = [X for X in e.spaces() if len(X) == 2]
    assert sorted(X.dist[0][1] for X in multi) == [H, 1]


def test_enumerator_three_point_count_matches_oracle():
    e = RationalSpaceEnumerator(max_points=3, max_denominator=2)
    ours = [X for X in e.spaces() if len(X) == 3]
    assert len(ours) == sum(1 for D in all_spaces(3) if len(D) == 3) == 4


def test_enumerator_spaces_valid_and_distinct():
    e = RationalSpaceEnumerator(max_points=4, max_denominator=3)
    sp = e.spaces()
    keys = [canonical_form(X) for X in sp]
    assert len(set(keys)) == len(keys)
    for X in sp:
        validate_metric([list(r) for r in X.dist])
        assert X.diam <= 1
        assert all(v.denominator <= 3 for row in X.dist for v in row)


def test_enumerator_cycles():
    e = RationalSpaceEnumerator(max_points=2, max_denominator=1)
    first = enumerate_rational_spaces(e, e.period + 1)
    assert first[0] is first[-1]


def test_matrix_csv_roundtrip(tmp_path, abc):
    p = tmp_path / "m.csv"
    write_matrix_csv(abc, p)
    assert p.read_text().splitlines()[0] == "n=3"
    Y = read_matrix_csv(p)
    assert Y.dist == abc.dist
