from fractions import Fraction

import pytest

from conftest import one_point, two_point
from metricgames.errors import IllegalMove, MenuEmpty, SemanticsMismatch
from metricgames.games import (
    FunctionGameConfig,
    Menus,
    RelationGameConfig,
    function_saturation_clock,
    function_win_check,
    play_interactive,
    relation_saturation_clock,
    relation_win_check,
    solve_function_game,
    solve_relation_game,
)
from metricgames.structures import Vocabulary

BIJ = [("x", "u"), ("y", "v")]


def test_relation_win_check_closed_form(x1, x2):
    assert relation_win_check(x1, x1, [("x", "x"), ("y", "y")], 0)
    assert not relation_win_check(x1, x2, BIJ, Fraction(2, 5))
    assert relation_win_check(x1, x2, BIJ, Fraction(1, 2))


def test_relation_game_examples(x1, x2):
    assert solve_relation_game(RelationGameConfig(x1, x1, 0, 4)).winner == "II"
    assert solve_relation_game(RelationGameConfig(x1, x2, Fraction(2, 5), 1)).winner == "II"
    assert solve_relation_game(RelationGameConfig(x1, x2, Fraction(2, 5), 2)).winner == "I"
    sat = relation_saturation_clock(x1, x2)
    assert solve_relation_game(RelationGameConfig(x1, x2, Fraction(1, 2), sat)).winner == "II"


def test_saturation_clock_small_cases(x1, x2):
    assert relation_saturation_clock(one_point(), one_point("u")) == 1
    assert relation_saturation_clock(x1, x2) <= 16


def test_strategy_for_winner_is_reported(x1, x2):
    res = solve_relation_game(RelationGameConfig(x1, x2, Fraction(2, 5), 2))
    assert res.strategy and all(len(k) == 2 for k in res.strategy)
    res = solve_relation_game(RelationGameConfig(x1, x2, Fraction(1, 2), 2))
    assert res.winner == "II" and all(len(k) == 3 for k in res.strategy)


def test_function_win_check_closed_form(iso1, iso2):
    diag = [("x", "x", 1, 1), ("y", "y", 1, 1)]
    assert function_win_check(iso1, iso1, diag)
    three_halves = [("x", "u", Fraction(3, 2), 1), ("y", "v", Fraction(3, 2), 1)]
    assert not function_win_check(iso1, iso2, three_halves)
    assert function_win_check(iso1, iso2, [("x", "u", 2, 1), ("y", "v", 2, 1)])


def test_function_game_examples(iso1, iso2):
    menus = Menus.product([Fraction(5, 4)], [1, 2])
    assert solve_function_game(FunctionGameConfig(iso1, iso1, 1, 3, menus)).winner == "II"
    cfg = FunctionGameConfig(iso1, iso2, Fraction(15, 8), 2, Menus.product([Fraction(31, 16)], [1]))
    assert solve_function_game(cfg).winner == "I"
    menus = Menus.product([Fraction(33, 16)], [1])
    sat = function_saturation_clock(iso1, iso2, menus)
    assert solve_function_game(FunctionGameConfig(iso1, iso2, 2, sat, menus)).winner == "II"


def test_menus_validation(iso1):
    with pytest.raises(MenuEmpty):
        Menus(((),))
    with pytest.raises(Exception):
        FunctionGameConfig(iso1, iso1, 2, 1, Menus.product([Fraction(3, 2)], [1]))
    assert Menus.from_json({"s": ["3/2"], "k": [1, 2]}).options() == [(Fraction(3, 2), 1),
                                                                       (Fraction(3, 2), 2)]


def test_precision_kind_must_match(x1, iso1):
    with pytest.raises(SemanticsMismatch):
        RelationGameConfig(iso1, iso1, 0, 1)
    with pytest.raises(SemanticsMismatch):
        FunctionGameConfig(x1, x1, 1, 1, Menus.product([2], [1]))


def test_play_optimal_ii_on_identical_spaces(x1):
    # with no winning move the engine plays A x; copying answers x
    t = play_interactive(RelationGameConfig(x1, x1, 0, 2), "II", iter(["x", "x"]))
    assert t.winner == "II" and [r["side"] + r["point"] for r in t.rounds] == ["Ax", "Ax"]


def test_play_bad_response_names_constraint(x1, x2):
    t = play_interactive(RelationGameConfig(x1, x2, Fraction(2, 5), 2), "II", iter(["u", "u"]))
    assert t.winner == "I" and "D-constraint" in t.violation


def test_play_rejects_unknown_point(x1, x2):
    with pytest.raises(IllegalMove):
        play_interactive(RelationGameConfig(x1, x2, 0, 2), "I", iter(["A z"]))


def test_play_is_deterministic(x1, x2):
    cfg = RelationGameConfig(x1, x2, Fraction(2, 5), 3)
    runs = [play_interactive(cfg, "I", iter(["A x", "B v", "A y"])).to_json() for _ in range(2)]
    assert runs[0] == runs[1]


def test_lb_relation_needs_bounded_structures():
    from metricgames.structures import normed_config
    A = normed_config({"p": ["1/2", 0]}, "linf", unit_ball=True)
    cfg = RelationGameConfig(A, A, 0, 2, [("p", "p")])
    assert solve_relation_game(cfg, strategy=False).winner == "II"
    assert A.vocabulary is Vocabulary.LBB


def _grid(A, B, *scales):
    ds = {x for S in (A, B) for row in S.carrier.d for x in row}
    out = set(ds)
    for x in ds:
        for s in scales:
            out |= {x + s, max(x - s, 0), x + s / 2}
            if s:
                out |= {x * s, x / s}
    return sorted(r for r in out if r >= 0)


def _transfers(X, Y, phi, p, xs, ys):
    from metricgames.logic import appr
    from metricgames.structures import eval_atomic
    env_x, env_y = {"u": xs[0], "v": xs[1]}, {"u": ys[0], "v": ys[1]}
    return not eval_atomic(X, phi, env_x) or eval_atomic(Y, appr(phi, p), env_y)


def test_relation_closed_form_matches_formula_checker():
    import itertools
    import random
    from metricgames.atoms import DGeq, DLeq
    from metricgames.corpus import small_corpus
    from metricgames.structures import Additive
    rng = random.Random(0)
    corpus = small_corpus(3)
    for _ in range(300):
        A, B = rng.choice(corpus), rng.choice(corpus)
        eps = Fraction(rng.choice([0, 1, 2, 3, 4]), 4)
        pairs = [(rng.choice(A.labels), rng.choice(B.labels)) for _ in range(rng.randint(1, 3))]
        grid = _grid(A, B, 2 * eps, Fraction(1, 2))
        # the condition only transfers truth from A to B
        brute = all(_transfers(A, B, kind(r, "u", "v"), Additive(eps), (p[0], q[0]), (p[1], q[1]))
                    for p, q in itertools.product(pairs, repeat=2) for r in grid
                    for kind in (DLeq, DGeq))
        assert relation_win_check(A, B, pairs, eps) == brute


def test_function_closed_form_matches_formula_checker():
    import random
    from metricgames.atoms import DGeq, DLeq
    from metricgames.corpus import small_corpus
    from metricgames.structures import Multiplicative
    rng = random.Random(1)
    corpus = small_corpus(3, vocabulary=Vocabulary.LM_ISO)
    for _ in range(300):
        A, B = rng.choice(corpus), rng.choice(corpus)
        n = rng.randint(1, 3)
        pos = [(rng.choice(A.labels), rng.choice(B.labels),
                rng.choice([Fraction(1), Fraction(3, 2), Fraction(2), Fraction(3)]),
                rng.choice([1, 2, 3])) for _ in range(n)]
        ok = True
        for i, (_, _, s, k) in enumerate(pos):
            grid = [r for r in _grid(A, B, s, Fraction(1, k)) + [Fraction(1, k)] if r >= Fraction(1, k)]
            for j in range(i, n):
                for l in range(i, n):
                    a, b = (pos[j][0], pos[l][0]), (pos[j][1], pos[l][1])
                    for r in grid:
                        for kind in (DLeq, DGeq):
                            phi = kind(r, "u", "v")
                            ok &= _transfers(A, B, phi, Multiplicative(s), a, b)
        assert function_win_check(A, B, pos) == ok, pos
