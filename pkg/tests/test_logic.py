from fractions import Fraction

from hypothesis import given, strategies as st

from conftest import two_point
from metricgames.atoms import DGeq, DLeq, PNorm, QNorm
from metricgames.logic import (
    FALSE,
    TRUE,
    And,
    Atom,
    Exists,
    Forall,
    Or,
    appr,
    appr_formula,
    atoms_of,
    eval_formula,
    formula_from_json,
    formula_to_json,
    is_good,
    strong_negation,
    weak_neg,
)
from metricgames.structures import Additive, Multiplicative, metric_space

d1 = DLeq(Fraction(1), "u", "v")


def test_appr_examples():
    assert appr(d1, Additive(Fraction(1, 4))) == DLeq(Fraction(3, 2), "u", "v")
    for phi in (d1, DGeq(Fraction(2), "u", "v")):
        assert appr(phi, Additive(0)) == phi
    assert appr(DGeq(Fraction(1, 4), "u", "v"), Additive(Fraction(1, 2))).r == 0


def test_appr_formula_pushes_to_atoms():
    assert appr_formula(TRUE, Additive(Fraction(1, 4))) == TRUE
    F = Exists("v", Atom(d1))
    assert appr_formula(F, Additive(Fraction(1, 4))) == Exists("v", Atom(DLeq(Fraction(3, 2), "u", "v")))


def test_weak_neg_shapes():
    assert weak_neg(Atom(d1)) == Atom(DGeq(Fraction(1), "u", "v"))
    a, b = Atom(d1), Atom(DGeq(Fraction(2), "u", "v"))
    assert weak_neg(Forall("v", And([a, b]))) == Exists("v", Or([weak_neg(a), weak_neg(b)]))


def test_is_good():
    assert is_good(DLeq(Fraction(1, 3), "u", "v"), 3)
    assert not is_good(DLeq(Fraction(1, 3), "u", "v"), 2)
    assert is_good(PNorm((Fraction(2), Fraction(-3)), ("a", "b")), 3)


def test_eval_formula_examples(x1):
    assert eval_formula(x1, TRUE)
    assert eval_formula(x1, Exists("v", Atom(d1)), {"u": "x"})
    assert not eval_formula(x1, Forall("v", Atom(DGeq(Fraction(2), "u", "v"))), {"u": "x"})


def test_strong_negation_of_atom():
    A = metric_space("abc", [[0, 1, 2], [1, 0, 1], [2, 1, 0]])
    G = strong_negation(Atom(d1), A)
    assert any(isinstance(x, DGeq) and 1 < x.r < 2 for x in atoms_of(G))
    for u in A.labels:
        for v in A.labels:
            env = {"u": u, "v": v}
            assert eval_formula(A, G, env) == (A.carrier.dist(u, v) > 1)
            assert eval_formula(A, strong_negation(G, A), env) == eval_formula(A, Atom(d1), env)


def test_strong_negation_of_empty_conjunction(x1, x2):
    G = strong_negation(TRUE, x1, x2)
    assert not eval_formula(x1, G) and not eval_formula(x2, G)
    assert eval_formula(x1, strong_negation(FALSE, x1, x2))


def test_strong_negation_is_relative_to_all_given_structures(x1, x2):
    F = Forall("u", Forall("v", Atom(DLeq(Fraction(1), "u", "v"))))
    G = strong_negation(F, x1, x2)
    assert not eval_formula(x1, G) and eval_formula(x2, G)


_fracs = st.fractions(min_value=0, max_value=4, max_denominator=12)


@st.composite
def atoms(draw):
    kind = draw(st.sampled_from(["d", "D", "P", "Q"]))
    if kind in "dD":
        return (DLeq if kind == "d" else DGeq)(draw(_fracs), "u", "v")
    coeffs = tuple(draw(st.lists(st.fractions(-3, 3, max_denominator=4), min_size=1, max_size=3)))
    vars_ = tuple(f"w{i}" for i in range(len(coeffs)))
    return (PNorm if kind == "P" else QNorm)(coeffs, vars_)


@given(atoms())
def test_formula_json_round_trip(phi):
    F = And([Exists("u", Atom(phi)), Or([Atom(phi), TRUE])])
    assert formula_from_json(formula_to_json(F)) == F
    assert formula_from_json(formula_to_json(F, shared=True)) == F


@given(atoms(), st.fractions(1, 4, max_denominator=8), st.fractions(1, 4, max_denominator=8))
def test_multiplicative_appr_composes(phi, s, t):
    # unbounded atoms compose exactly as syntax
    p, q = Multiplicative(s), Multiplicative(t)
    assert appr(appr(phi, p), q) == appr(phi, p.then(q))


@given(st.sampled_from([DLeq, DGeq]), _fracs, st.fractions(0, 2, max_denominator=8),
       st.fractions(0, 2, max_denominator=8), st.integers(1, 3))
def test_additive_appr_composes_semantically(kind, r, e1, e2, d):
    S = two_point(d)
    phi = kind(r, "u", "v")
    lhs = appr(appr(phi, Additive(e1)), Additive(e2))
    rhs = appr(phi, Additive(e1 + e2))
    for u in S.labels:
        for v in S.labels:
            env = {"u": u, "v": v}
            assert eval_formula(S, Atom(lhs), env) == eval_formula(S, Atom(rhs), env)


@given(atoms(), st.integers(1, 5), st.fractions(1, 4, max_denominator=8))
def test_good_closed_under_appr(phi, k, s):
    from metricgames.logic import ceil_mul
    if is_good(phi, k):
        assert is_good(appr(phi, Multiplicative(s)), ceil_mul(k, s))
