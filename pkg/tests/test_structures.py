from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from conftest import one_point, two_point
from metricgames.atoms import DGeq, DLeq, PNorm
from metricgames.errors import (
    AsymmetricMatrix,
    NonzeroDiagonal,
    NormOverflow,
    ParseError,
    TriangleViolation,
    UnboundVariable,
)
from metricgames.structures import (
    Vocabulary,
    distance_breakpoints,
    eval_atomic,
    format_rational,
    good_saturation_bound,
    metric_space,
    normed_config,
    parse_rational,
    structure_to_json,
    validate_structure,
)


def test_two_point_space_is_valid():
    S = validate_structure({"kind": "metric_space", "points": ["x", "y"], "d": [[0, 1], [1, 0]]})
    assert S.size == 2 and S.carrier.dist("x", "y") == 1


def test_asymmetric_matrix():
    with pytest.raises(AsymmetricMatrix):
        metric_space(["x", "y"], [[0, 1], [2, 0]])


def test_triangle_violation_names_indices():
    with pytest.raises(TriangleViolation) as info:
        metric_space(["a", "b", "c"], [[0, 1, 5], [1, 0, 1], [5, 1, 0]])
    assert "a" in str(info.value) and "c" in str(info.value)


def test_nonzero_diagonal():
    with pytest.raises(NonzeroDiagonal):
        metric_space(["x"], [[1]])


def test_unit_ball_overflow():
    with pytest.raises(NormOverflow):
        normed_config({"p": ["3/2", 0]}, "linf", unit_ball=True)


def test_rationals_cross_as_strings():
    S = metric_space(["x", "y"], [[0, "1/3"], ["1/3", 0]])
    assert S.carrier.dist("x", "y") == Fraction(1, 3)
    with pytest.raises(ParseError):
        parse_rational("0.5")


@given(st.fractions())
def test_rational_round_trip(x):
    assert parse_rational(format_rational(x)) == x


def test_eval_atomic_examples(x1):
    a = {"u": "x", "v": "y"}
    assert eval_atomic(x1, DLeq(Fraction(1), "u", "v"), a)
    assert not eval_atomic(x1, DGeq(Fraction(2), "u", "v"), a)
    cfg = normed_config({"p": ["1/2", 1]}, "linf")
    assert not eval_atomic(cfg, PNorm((Fraction(2),), ("w",)), {"w": "p"})


def test_unbound_variable(x1):
    with pytest.raises(UnboundVariable):
        eval_atomic(x1, DLeq(Fraction(1), "u", "v"), {"u": "x"})


def test_breakpoints(x1, x2, iso1, iso2):
    assert 0 in distance_breakpoints(x1, x1)
    assert 1 in distance_breakpoints(iso1, iso1)
    assert distance_breakpoints(x1, x2) == [0, Fraction(1, 2), 1]
    assert distance_breakpoints(iso1, iso2) == [Fraction(1, 2), 1, 2]


def test_good_saturation_bound():
    assert good_saturation_bound(two_point(1), two_point(2)) == 1
    third = metric_space(["a", "b"], [[0, "1/3"], ["1/3", 0]])
    assert good_saturation_bound(third, third) == 3
    assert good_saturation_bound(one_point(), one_point()) == 1


def test_json_round_trip():
    S = normed_config({"p": ["1/2", 1], "q": [0, "-2/3"]}, "wl1", weights=[1, "1/2"])
    assert validate_structure(structure_to_json(S)) == S
    M = two_point(Fraction(3, 2), vocabulary=Vocabulary.LM_ISO)
    assert validate_structure(structure_to_json(M)) == M
