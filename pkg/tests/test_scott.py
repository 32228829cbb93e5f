from fractions import Fraction

from conftest import one_point, two_point
from metricgames.atoms import DGeq, DLeq
from metricgames.corpus import small_corpus
from metricgames.games import FunctionGameConfig, Menus, default_menus
from metricgames.logic import TRUE, atoms_of, eval_formula, formula_from_json
from metricgames.scott import (
    IIWinsAll,
    corpus_rank,
    scott_formula_function,
    scott_formula_relation,
    scott_sentence_relation,
    watershed_function,
    watershed_relation,
)


def test_relation_watersheds(x1, x2):
    assert watershed_relation(x1, x1, (), 0).value is IIWinsAll
    assert watershed_relation(x1, x2, (), Fraction(2, 5)).value == 2
    assert watershed_relation(x1, x2, (), Fraction(1, 2)).value is IIWinsAll


def test_failing_start_has_watershed_zero(x1, x2):
    assert watershed_relation(x1, x2, [("x", "u"), ("y", "u")], 0).value == 0


def test_function_watersheds(iso1, iso2):
    menus = Menus.product([Fraction(5, 4)], [1])
    assert watershed_function(iso1, iso1, FunctionGameConfig(iso1, iso1, 1, 0, menus)).value is IIWinsAll
    s = Fraction(15, 8)
    cfg = FunctionGameConfig(iso1, iso2, s, 0, default_menus(iso1, iso2, s))
    assert watershed_function(iso1, iso2, cfg).value == 2


def test_relation_formula_examples(x1):
    assert scott_formula_relation(x1, (), 0, 0).formula == TRUE
    F = scott_formula_relation(x1, ("x", "y"), Fraction(1, 2), 0).formula
    atoms = atoms_of(F)
    assert DLeq(Fraction(2), "v0", "v1") in atoms and DGeq(Fraction(0), "v0", "v1") in atoms


def test_one_point_formula_picks_out_one_point_spaces():
    A = one_point()
    # one round never separates: a single pair always passes
    F1 = scott_formula_relation(A, (), 0, 1).formula
    F2 = scott_formula_relation(A, (), 0, 2).formula
    for B in small_corpus(3):
        assert eval_formula(B, F1)
        assert eval_formula(B, F2) == (B.size == 1)


def test_function_formula_examples(iso1):
    menus = Menus.product([Fraction(2)], [1])
    assert scott_formula_function(iso1, (), 1, [], [], 0, menus).formula == TRUE
    F = scott_formula_function(iso1, ("x", "y"), 1, [Fraction(3, 2)] * 2, [1, 1], 0, menus)
    atoms = atoms_of(F.formula)
    assert DLeq(Fraction(3, 2), "v0", "v1") in atoms and DGeq(Fraction(2, 3), "v0", "v1") in atoms


def test_sentence_picks_out_one_point_spaces():
    A = one_point()
    corpus = small_corpus(3)
    S = scott_sentence_relation(A, 0, 2, targets=corpus).formula
    for B in corpus:
        assert eval_formula(B, S) == (B.size == 1)


def test_corpus_rank_examples(x1, x2):
    A = one_point()
    assert corpus_rank(A, [A], 0) == 0
    assert corpus_rank(x1, [x1, x2], Fraction(2, 5)) >= 2


def test_shared_serialization_round_trips(x1):
    F = scott_formula_relation(x1, ("x",), Fraction(1, 4), 2)
    assert formula_from_json(F.to_json(shared=True)) == F.formula
    assert formula_from_json(F.to_json()) == F.formula
    assert F.to_json()["meta"]["eps"] == "1/4"
