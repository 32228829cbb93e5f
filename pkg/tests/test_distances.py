from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from conftest import one_point, two_point
from metricgames.distances import (
    NO_BIJECTION,
    correspondence_distortion,
    game_distance,
    gh_bruteforce,
    glue,
    hausdorff,
    lipschitz_bruteforce,
)
from metricgames.errors import DistortionTooLarge, EmptySet
from metricgames.structures import check_metric, metric_space

BIJ = [("x", "u"), ("y", "v")]


def test_distortion_examples(x1, x2):
    assert correspondence_distortion(x1, x1, [("x", "x"), ("y", "y")]) == 0
    assert correspondence_distortion(x1, x2, BIJ) == 1
    full = [(a, b) for a in "xy" for b in "uv"]
    assert correspondence_distortion(x1, x2, full) == 2


def test_gh_examples(x1, x2):
    assert gh_bruteforce(x1, x1) == 0
    assert gh_bruteforce(x1, x2) == Fraction(1, 2)
    assert gh_bruteforce(one_point(), x2) == 1


def test_lipschitz_examples(iso1, iso2):
    assert lipschitz_bruteforce(iso1, iso1) == 1
    assert lipschitz_bruteforce(iso1, iso2) == 2
    assert lipschitz_bruteforce(one_point(), iso2) is NO_BIJECTION


def test_hausdorff_examples(x1):
    assert hausdorff(x1, {"x"}, {"x"}) == 0
    assert hausdorff(x1, {"x"}, {"y"}) == 1
    M = metric_space("xyz", [[0, 1, 2], [1, 0, 2], [2, 2, 0]])
    assert hausdorff(M, {"x"}, {"y", "z"}) == 2
    with pytest.raises(EmptySet):
        hausdorff(M, set(), {"x"})


def test_glue_identity_quotients_to_a(x1):
    G, ea, eb = glue(x1, x1, [("x", "x"), ("y", "y")], 0)
    assert G.size == 2 and ea == eb


def test_glue_d1_d2(x1, x2):
    G, ea, eb = glue(x1, x2, BIJ, Fraction(1, 2))
    d = G.carrier.dist
    assert G.size == 4
    assert d(ea["x"], eb["u"]) == Fraction(1, 2) and d(ea["x"], eb["v"]) == Fraction(3, 2)
    assert d(ea["y"], eb["u"]) == Fraction(3, 2) and d(ea["y"], eb["v"]) == Fraction(1, 2)
    check_metric(G.carrier.labels, G.carrier.d)


def test_glue_full_product(x2):
    A = one_point()
    G, ea, eb = glue(A, x2, [("x", "u"), ("x", "v")], 1)
    assert G.carrier.dist(ea["x"], eb["u"]) == 1 == G.carrier.dist(ea["x"], eb["v"])
    assert hausdorff(G, set(ea.values()), set(eb.values())) == 1


def test_glue_rejects_large_distortion(x1, x2):
    with pytest.raises(DistortionTooLarge):
        glue(x1, x2, BIJ, Fraction(2, 5))


def test_game_distance_examples(x1, x2, iso1, iso2):
    assert game_distance(x1, x1, "additive") == (0, 0)
    lo, hi = game_distance(x1, x2, "additive")
    assert lo <= Fraction(1, 2) <= hi and hi - lo <= Fraction(1, 16)
    lo, hi = game_distance(iso1, iso2, "multiplicative")
    assert lo <= 2 <= hi


@st.composite
def spaces(draw, max_points=3):
    n = draw(st.integers(1, max_points))
    vals = st.fractions(Fraction(1, 2), 3, max_denominator=4)
    while True:
        d = [[Fraction(0)] * n for _ in range(n)]
        for i in range(n):
            for j in range(i + 1, n):
                d[i][j] = d[j][i] = draw(vals)
        if all(d[i][k] <= d[i][j] + d[j][k] for i in range(n) for j in range(n) for k in range(n)):
            return metric_space([f"p{i}" for i in range(n)], d)


@settings(max_examples=40, deadline=None)
@given(spaces(), spaces())
def test_game_distance_brackets_gh(A, B):
    g = gh_bruteforce(A, B)
    lo, hi = game_distance(A, B, "additive")
    assert lo <= g <= hi and hi - lo <= Fraction(1, 16)
    assert gh_bruteforce(B, A) == g


@settings(max_examples=40, deadline=None)
@given(spaces(), spaces(), spaces())
def test_gh_triangle(A, B, C):
    assert gh_bruteforce(A, C) <= gh_bruteforce(A, B) + gh_bruteforce(B, C)
