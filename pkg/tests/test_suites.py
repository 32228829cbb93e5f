from fractions import Fraction

import pytest

from metricgames import suites
from metricgames.errors import UnknownSuite

C3 = suites.corpus_for(3)


def test_corpus_size():
    assert len(suites.corpus_for(4)) == 61
    assert [len(suites.corpus_for(n)) for n in (1, 2, 3)] == [1, 4, 13]


def test_unknown_suite():
    with pytest.raises(UnknownSuite):
        suites.run_suite("bogus")


@pytest.mark.parametrize("check", [
    suites.relation_symmetry,
    suites.relation_weak_transitivity,
    suites.strategy_replay,
    suites.watershed_successor,
    suites.gh_metric_laws,
    suites.gluing,
    suites.breakpoint_laws,
])
def test_corpus_properties(check):
    rep = check(C3)
    assert rep.checked > 0 and rep.passed, rep.counterexamples


def test_monotonicity_small():
    for rep in suites.relation_monotonicity(C3):
        assert rep.passed, rep.counterexamples
    rep = suites.function_clock_monotonicity(C3, samples=60)
    assert rep.passed, rep.counterexamples


def test_function_laws_small():
    for rep in (suites.function_weak_symmetry(C3, 300), suites.function_weak_transitivity(C3, 300)):
        assert rep.passed and rep.info["nonvacuous"] > 0, rep.counterexamples


def test_formulae_vs_games_small():
    assert suites.formulae_vs_games(suites.corpus_for(2)).passed
    assert suites.function_formulae_vs_games(C3, samples=40).passed


def test_sentence_link_small():
    rep = suites.sentence_laws(suites.corpus_for(2))
    assert rep.passed, rep.counterexamples


def test_report_counts_failures():
    rep = suites.PropertyReport("demo")
    for i in range(7):
        rep.fail(i)
    assert rep.failures == 7 and len(rep.counterexamples) == 5 and not rep.passed
    assert rep.to_json()["pass"] is False


def test_boundary_predicates_match_hand_cases():
    from metricgames.atoms import DGeq
    from metricgames.structures import Vocabulary, metric_space
    S = metric_space("ab", [[0, 1], [1, 0]], Vocabulary.LM_CORR)
    phi = DGeq(Fraction(0), "u", "v")
    assert suites.weak_negation_boundary(S, phi, {"u": "a", "v": "a"})
    assert not suites.weak_negation_boundary(S, phi, {"u": "a", "v": "b"})
    # DGeq(1/2) with eps=1/2, delta=1/2: Appr truncates to D_0, the rest keeps D_{1/2}
    psi = DGeq(Fraction(1, 2), "u", "v")
    assert suites.appr_neg_boundary(S, psi, Fraction(1, 2), Fraction(1, 2), {"u": "a", "v": "b"})
