import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from oracles import all_spaces, brute_gh
from richtangent.gromov_hausdorff import (
    Correspondence,
    NotACorrespondence,
    correspondence_distortion,
    gh_bounds,
    gh_exact,
)
from richtangent.metric_core import validate_metric

H = Fraction(1, 2)
PT = validate_metric([[0]])
TWO_1 = validate_metric([[0, 1], [1, 0]])
TWO_H = validate_metric([[0, H], [H, 0]])

# brute-force values over all correspondences, frozen
FROZEN = [
    (TWO_1, PT, H),
    (TWO_1, TWO_H, Fraction(1, 4)),
    (validate_metric([[0, 1, 1], [1, 0, 1], [1, 1, 0]]), TWO_1, H),
    (validate_metric([[0, H, H], [H, 0, H], [H, H, 0]]), TWO_1, Fraction(1, 4)),
]


@pytest.mark.parametrize("X,Y,value", FROZEN)
def test_frozen_values(X, Y, value):
    assert brute_gh(X.dist, Y.dist) == value
    assert gh_exact(X, Y).value == value


def test_distortion_examples():
    assert correspondence_distortion(Correspondence.of([(0, 0), (1, 1)]), TWO_1, TWO_1) == 0
    assert correspondence_distortion(Correspondence.of([(0, 0), (1, 0)]), TWO_1, PT) == 1
    assert correspondence_distortion(Correspondence.of([(0, 0), (1, 1)]), TWO_1, TWO_H) == H


def test_not_a_correspondence():
    with pytest.raises(NotACorrespondence):
        correspondence_distortion(Correspondence.of([(0, 0)]), TWO_1, TWO_1)


def test_all_small_spaces_against_brute_force():
    spaces = all_spaces(4)
    assert len(spaces) == 18
    for A in spaces:
        X = validate_metric(A)
        for B in spaces:
            res = gh_exact(X, validate_metric(B))
            assert res.exact
            assert res.value == brute_gh(A, B)


def test_singleton_gives_half_diameter():
    for A in all_spaces(4):
        X = validate_metric(A)
        assert gh_exact(X, PT).value == X.diam / 2


def _rand(rng, n):
    pts = [tuple(rng.randint(0, 8) for _ in range(2)) for _ in range(n)]
    pts = list(dict.fromkeys(pts))
    return validate_metric([[Fraction(max(abs(a - c), abs(b - d)), 8) for c, d in pts] for a, b in pts])


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_bounds_bracket_exact(seed):
    rng = random.Random(seed)
    X, Y = _rand(rng, rng.randint(1, 5)), _rand(rng, rng.randint(1, 5))
    lo, up = gh_bounds(X, Y)
    v = gh_exact(X, Y).value
    assert lo <= v <= up


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_symmetry_and_relabel(seed):
    rng = random.Random(seed)
    X, Y = _rand(rng, rng.randint(1, 5)), _rand(rng, rng.randint(1, 5))
    assert gh_exact(X, Y).value == gh_exact(Y, X).value
    perm = list(range(len(X)))
    rng.shuffle(perm)
    assert gh_exact(X, X.permuted(perm)).value == 0


def test_budget_returns_upper_value():
    rng = random.Random(3)
    X, Y = _rand(rng, 5), _rand(rng, 5)
    res = gh_exact(X, Y, budget=1)
    assert res.value >= gh_exact(X, Y).value
    assert res.lower_bound <= gh_exact(X, Y).value


def test_bounds_examples():
    assert gh_bounds(TWO_1, TWO_1) == (0, 0)
    assert gh_bounds(TWO_1, PT)[0] >= H
