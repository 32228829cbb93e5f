"""Property batteries: the registered suites behind ``metricgames suite``.

Every check returns a PropertyReport with a count of checked instances,
failures, and the first few counterexamples.
"""

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import banach
from .atoms import DGeq, DLeq, PNorm, QNorm
from .corpus import small_corpus
from .distances import (
    correspondence_distortion,
    game_distance,
    gh_bruteforce,
    glue,
    hausdorff,
    lipschitz_bruteforce,
    minimal_correspondences,
)
from .errors import UnknownSuite
from .games import (
    FunctionGame,
    FunctionGameConfig,
    Menus,
    RelationGameConfig,
    function_compat,
    function_saturation_clock,
    pair_game,
    relation_compat,
    relation_saturation_clock,
    solve_function_game,
    solve_relation_game,
)
from .logic import (
    Atom,
    _negation_grid,
    appr,
    ceil_mul,
    is_good,
    neg_atom,
    satisfaction_tables,
    weak_neg,
)
from .scott import (
    IIWinsAll,
    corpus_rank,
    scott_formula_function,
    scott_formula_relation,
    scott_sentence_relation,
    var,
    watershed_function,
    watershed_relation,
)
from .structures import (
    Additive,
    Multiplicative,
    Vocabulary,
    distance_breakpoints,
    eval_atomic,
    format_rational,
    metric_space,
    normed_config,
    term_vector,
    validate_structure,
)

EPS_GRID = (Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(1))


@dataclass
class PropertyReport:
    name: str
    checked: int = 0
    failures: int = 0
    counterexamples: list = field(default_factory=list)
    info: dict = field(default_factory=dict)

    @property
    def passed(self):
        return self.failures == 0

    def fail(self, example):
        self.failures += 1
        if len(self.counterexamples) < 5:
            self.counterexamples.append(example)

    def summary(self):
        status = "PASS" if self.passed else "FAIL"
        extra = "".join(f" {k}={v}" for k, v in self.info.items())
        return f"{status} {self.name}: {self.checked} checked, {self.failures} failures{extra}"

    def to_json(self):
        return {"name": self.name, "pass": self.passed, "checked": self.checked,
                "failures": self.failures,
                "counterexamples": [str(c) for c in self.counterexamples],
                "info": {k: str(v) for k, v in self.info.items()}}


def _fmt(x):
    return format_rational(x) if isinstance(x, Fraction) else str(x)


def corpus_for(max_points=4, vocabulary=Vocabulary.LM_CORR):
    return small_corpus(max_points=max_points, vocabulary=vocabulary)


# -- oracle equivalence ------------------------------------------------------------

def oracle_additive(corpus, resolution=Fraction(1, 16)):
    rep = PropertyReport("game-distance-brackets-gh")
    worst_dev, widest = Fraction(0), Fraction(0)
    for i, A in enumerate(corpus):
        for B in corpus[i:]:
            lo, hi = game_distance(A, B, "additive", resolution)
            g = gh_bruteforce(A, B)
            rep.checked += 1
            dev = max(lo - g, g - hi, Fraction(0))
            worst_dev, widest = max(worst_dev, dev), max(widest, hi - lo)
            if dev or hi - lo > resolution:
                rep.fail((A.carrier.d, B.carrier.d, _fmt(lo), _fmt(hi), _fmt(g)))
    rep.info.update(corpus=len(corpus), max_deviation=_fmt(worst_dev), max_width=_fmt(widest))
    return rep


def oracle_multiplicative(corpus, resolution=Fraction(1, 16)):
    rep = PropertyReport("game-distance-brackets-lipschitz")
    worst_dev, widest = Fraction(0), Fraction(0)
    for i, A in enumerate(corpus):
        for B in corpus[i:]:
            if A.size != B.size:
                continue
            lo, hi = game_distance(A, B, "multiplicative", resolution)
            L = lipschitz_bruteforce(A, B)
            rep.checked += 1
            dev = max(lo - L, L - hi, Fraction(0))
            worst_dev, widest = max(worst_dev, dev), max(widest, hi - lo)
            if dev or hi - lo > resolution:
                rep.fail((A.carrier.d, B.carrier.d, _fmt(lo), _fmt(hi), _fmt(L)))
    rep.info.update(pairs=rep.checked, max_deviation=_fmt(worst_dev), max_width=_fmt(widest))
    return rep


def gluing(corpus):
    rep = PropertyReport("gluing-construction")
    for i, A in enumerate(corpus):
        for B in corpus[i:]:
            best, rels = minimal_correspondences(A, B)
            eps = best / 2
            ca, cb = A.carrier, B.carrier
            for R in rels:
                rep.checked += 1
                G, ea, eb = glue(A, B, R, eps)
                gc = G.carrier
                problems = []
                try:
                    validate_structure({"kind": "metric_space", "points": list(gc.labels),
                                        "d": [[_fmt(x) for x in row] for row in gc.d]})
                except Exception as exc:  # noqa: BLE001 - reported as a counterexample
                    problems.append(f"invalid: {exc}")
                if any(gc.dist(ea[a], ea[a2]) != ca.dist(a, a2)
                       for a in ca.labels for a2 in ca.labels):
                    problems.append("A not isometric")
                if any(gc.dist(eb[b], eb[b2]) != cb.dist(b, b2)
                       for b in cb.labels for b2 in cb.labels):
                    problems.append("B not isometric")
                if any(gc.dist(ea[a], eb[b]) > eps for a, b in R):
                    problems.append("pair beyond eps")
                if hausdorff(G, set(ea.values()), set(eb.values())) > eps:
                    problems.append("Hausdorff beyond eps")
                if problems:
                    rep.fail((ca.d, cb.d, sorted(R), problems))
    return rep


def gh_metric_laws(corpus):
    rep = PropertyReport("gh-metric-laws")
    n = len(corpus)
    gh = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            gh[i][j] = gh[j][i] = gh_bruteforce(corpus[i], corpus[j])
    for i in range(n):
        rep.checked += 1
        if gh[i][i] != 0:
            rep.fail(("self", i))
        for j in range(i + 1, n):
            rep.checked += 1
            # the corpus holds one space per isometry class
            if gh[i][j] == 0 or gh_bruteforce(corpus[j], corpus[i]) != gh[i][j]:
                rep.fail(("symmetry/positivity", i, j))
            if corpus[i].size == corpus[j].size:
                _, f = lipschitz_bruteforce(corpus[i], corpus[j], witness=True)
                bound = correspondence_distortion(corpus[i], corpus[j], list(f.items())) / 2
                if gh[i][j] > bound:
                    rep.fail(("bijection bound", i, j))
    for i in range(n):
        for j in range(n):
            gij = gh[i][j]
            for k in range(n):
                rep.checked += 1
                if gh[i][k] > gij + gh[j][k]:
                    rep.fail(("triangle", i, j, k))
    return rep


# -- watershed pin -----------------------------------------------------------------

def two_point(d, names=("x", "y"), vocabulary=Vocabulary.LM_CORR):
    return metric_space(list(names), [[0, d], [d, 0]], vocabulary)


def watershed_pin():
    rep = PropertyReport("watershed-pin")
    A, B = two_point(1), two_point(2, ("u", "v"))
    w1 = watershed_relation(A, B, (), Fraction(2, 5))
    w2 = watershed_relation(A, B, (), Fraction(1, 2))
    rep.checked = 2
    if w1.value != 2:
        rep.fail(("eps=2/5", w1.value))
    if w2.value is not IIWinsAll:
        rep.fail(("eps=1/2", w2.value))
    rep.info.update(at_2_5=w1.value, at_1_2=w2.value)
    return rep


# -- formulae versus games -------------------------------------------------------------

def _groups(corpus):
    out = {}
    for B in corpus:
        out.setdefault(B.size, []).append(B)
    return out


def _broadcast(vs, tab, n, length, batch):
    target = tuple(var(i) for i in range(length))
    shape = [batch] + [n if v in vs else 1 for v in target]
    return np.broadcast_to(tab.reshape(shape), (batch,) + (n,) * length)


def formulae_vs_games(corpus, eps_grid=EPS_GRID, clocks=(0, 1, 2, 3), tuple_len=2):
    """psi-formula truth on (B, bbar) against the relation-game winner, exhaustively."""
    rep = PropertyReport("formulae-vs-games-relation")
    groups = _groups(corpus)
    for A in corpus:
        for eps in eps_grid:
            memo = {}
            games = {id(B): pair_game(A.size, B.size, relation_compat(A, B, eps)) for B in corpus}
            roots = []
            for L in range(tuple_len + 1):
                for abar in itertools.product(range(A.size), repeat=L):
                    labels = tuple(A.labels[i] for i in abar)
                    for alpha in clocks:
                        F = scott_formula_relation(A, labels, eps, alpha, memo).formula
                        roots.append((abar, alpha, F))
            for n, Bs in groups.items():
                tables = satisfaction_tables([F for _, _, F in roots], Bs)
                for (abar, alpha, _), (vs, tab) in zip(roots, tables):
                    tab = _broadcast(vs, tab, n, len(abar), len(Bs))
                    for bi, B in enumerate(Bs):
                        g = games[id(B)]
                        for bbar in itertools.product(range(n), repeat=len(abar)):
                            mask = 0
                            for a, b in zip(abar, bbar):
                                mask |= 1 << (a * n + b)
                            won = g.passes(mask) and g.ii_wins(mask, alpha)
                            rep.checked += 1
                            if bool(tab[(bi,) + bbar]) != won:
                                rep.fail((A.carrier.d, abar, B.carrier.d, bbar,
                                          _fmt(eps), alpha, won))
    return rep


def function_formulae_vs_games(corpus, samples=300, seed=7):
    """phi-formula truth against the function-game winner on sampled menus."""
    rep = PropertyReport("formulae-vs-games-function")
    rng = random.Random(seed)
    iso = [S.with_vocabulary(Vocabulary.LM_ISO) for S in corpus]
    groups = _groups(iso)
    factors = [Fraction(1), Fraction(5, 4), Fraction(3, 2), Fraction(2), Fraction(3)]
    for _ in range(samples):
        A = rng.choice(iso)
        s = rng.choice(factors)
        opts = tuple((s + Fraction(rng.choice([1, 1, 2, 4, 8]), 8), rng.choice([1, 2, 3]))
                     for _ in range(rng.choice([1, 1, 2])))
        menus = Menus((opts,))
        L = rng.choice([0, 1, 1, 2])
        abar = tuple(rng.choice(A.labels) for _ in range(L))
        sbar = [s + Fraction(rng.choice([1, 2, 4]), 8) for _ in range(L)]
        kbar = [rng.choice([1, 2, 3]) for _ in range(L)]
        alpha = rng.choice([0, 1, 2]) if L < 2 else rng.choice([0, 1])
        F = scott_formula_function(A, abar, s, sbar, kbar, alpha, menus).formula
        for n, Bs in groups.items():
            (vs, tab), = satisfaction_tables([F], Bs)
            tab = _broadcast(vs, tab, n, L, len(Bs))
            for bi, B in enumerate(Bs):
                for bbar in itertools.product(range(n), repeat=L):
                    start = tuple((a, B.labels[b], sb, kb)
                                  for a, b, sb, kb in zip(abar, bbar, sbar, kbar))
                    cfg = FunctionGameConfig(A, B, s, alpha, menus, start)
                    won = solve_function_game(cfg, strategy=False).winner == "II"
                    rep.checked += 1
                    if bool(tab[(bi,) + bbar]) != won:
                        rep.fail((A.carrier.d, abar, B.carrier.d, bbar, _fmt(s), alpha, won))
    return rep


def sentence_laws(corpus, eps_grid=(Fraction(0), Fraction(1, 2), Fraction(1))):
    """Self-satisfaction and the sentence/correspondence link on 3-point corpora."""
    from .logic import eval_formula
    rep = PropertyReport("scott-sentence-laws")
    small = [S for S in corpus if S.size <= 3]
    for A in small:
        for eps in eps_grid:
            for B in small:
                rank = A.size + B.size
                sent = scott_sentence_relation(A, eps, rank, targets=[B], tuple_bound=1).formula
                rep.checked += 1
                if B is A and not eval_formula(A, sent):
                    rep.fail(("self", A.carrier.d, _fmt(eps)))
                has_corr = gh_bruteforce(A, B) <= eps
                if eval_formula(B, sent) != has_corr:
                    rep.fail(("link", A.carrier.d, B.carrier.d, _fmt(eps)))
    return rep


def watershed_successor(corpus, eps_grid=EPS_GRID, tuple_len=1):
    rep = PropertyReport("watershed-successor")
    for A in corpus:
        for B in corpus:
            for eps in eps_grid:
                for L in range(tuple_len + 1):
                    for abar in itertools.product(A.labels, repeat=L):
                        for bbar in itertools.product(B.labels, repeat=L):
                            start = tuple(zip(abar, bbar))
                            cfg = RelationGameConfig(A, B, eps, 0, start)
                            if solve_relation_game(cfg, strategy=False).winner == "I":
                                continue  # a failing start is decided before any clock
                            w = watershed_relation(A, B, start, eps)
                            rep.checked += 1
                            if w.finite and w.value < 1:
                                rep.fail((A.carrier.d, B.carrier.d, start, _fmt(eps), w.value))
    return rep


def rank_monotone(corpus, eps_grid=EPS_GRID):
    rep = PropertyReport("corpus-rank-monotone")
    small = [S for S in corpus if S.size <= 3]
    for A in small:
        ranks = [corpus_rank(A, small, e, tuple_bound=1) for e in eps_grid]
        rep.checked += 1
        if any(r2 > r1 for r1, r2 in zip(ranks, ranks[1:])):
            rep.fail((A.carrier.d, ranks))
    return rep


# -- game laws -----------------------------------------------------------------------

def _watershed_value(core, mask, cap):
    c = core.least_losing_clock(mask, cap)
    return math.inf if c is None else c


def relation_symmetry(corpus, eps_grid=EPS_GRID, tuple_len=1):
    rep = PropertyReport("relation-symmetry")
    for i, A in enumerate(corpus):
        for B in corpus[i:]:
            for eps in eps_grid:
                ab = pair_game(A.size, B.size, relation_compat(A, B, eps))
                ba = pair_game(B.size, A.size, relation_compat(B, A, eps))
                for L in range(tuple_len + 1):
                    for ia in itertools.product(range(A.size), repeat=L):
                        for ib in itertools.product(range(B.size), repeat=L):
                            m1 = m2 = 0
                            for a, b in zip(ia, ib):
                                m1 |= 1 << (a * B.size + b)
                                m2 |= 1 << (b * A.size + a)
                            cap = A.size + B.size
                            rep.checked += 1
                            if _watershed_value(ab, m1, cap) != _watershed_value(ba, m2, cap):
                                rep.fail((A.carrier.d, B.carrier.d, ia, ib, _fmt(eps)))
    return rep


def relation_weak_transitivity(corpus, eps_grid=EPS_GRID):
    """II wins (A,B) at eps and (B,C) at delta => II wins (A,C) at eps+delta, any clock."""
    rep = PropertyReport("relation-weak-transitivity")
    sums = sorted({e + d for e in eps_grid for d in eps_grid} | set(eps_grid))
    n = len(corpus)
    W = {}
    for e in sums:
        W[e] = [[_watershed_value(pair_game(A.size, B.size, relation_compat(A, B, e)), 0,
                                  relation_saturation_clock(A, B))
                 for B in corpus] for A in corpus]
    for e in eps_grid:
        for d in eps_grid:
            We, Wd, Wed = W[e], W[d], W[e + d]
            for i in range(n):
                for j in range(n):
                    wij = We[i][j]
                    for k in range(n):
                        rep.checked += 1
                        if min(wij, Wd[j][k]) > Wed[i][k]:
                            rep.fail((i, j, k, _fmt(e), _fmt(d)))
    rep.info.update(triples=n ** 3, precision_pairs=len(eps_grid) ** 2)
    return rep


def _plain_relation_wins(compat, nA, nB, mask, c, memo):
    """Backward induction keyed on (pairs, clock) with no clock inference."""
    if c == 0:
        return True
    key = (mask, c)
    hit = memo.get(key)
    if hit is not None:
        return hit
    res = True
    for i in range(nA):
        if not any(not (mask & ~compat[i * nB + j]) and
                   _plain_relation_wins(compat, nA, nB, mask | 1 << (i * nB + j), c - 1, memo)
                   for j in range(nB)):
            res = False
            break
    if res:
        for j in range(nB):
            if not any(not (mask & ~compat[i * nB + j]) and
                       _plain_relation_wins(compat, nA, nB, mask | 1 << (i * nB + j), c - 1, memo)
                       for i in range(nA)):
                res = False
                break
    memo[key] = res
    return res


def relation_monotonicity(corpus, eps_grid=EPS_GRID):
    """Clock and precision monotonicity, from a solver that assumes neither."""
    clock_rep = PropertyReport("relation-clock-monotonicity")
    prec_rep = PropertyReport("relation-precision-monotonicity")
    grid = sorted(eps_grid)
    for i, A in enumerate(corpus):
        for B in corpus[i:]:
            cap = relation_saturation_clock(A, B)
            table = []
            for eps in grid:
                compat = relation_compat(A, B, eps)
                memo = {}
                wins = [_plain_relation_wins(compat, A.size, B.size, 0, c, memo)
                        for c in range(cap + 1)]
                table.append(wins)
                clock_rep.checked += 1
                if any(w2 and not w1 for w1, w2 in zip(wins, wins[1:])):
                    clock_rep.fail((A.carrier.d, B.carrier.d, _fmt(eps), wins))
            for c in range(cap + 1):
                prec_rep.checked += 1
                col = [row[c] for row in table]
                if any(w1 and not w2 for w1, w2 in zip(col, col[1:])):
                    prec_rep.fail((A.carrier.d, B.carrier.d, c, col))
    return clock_rep, prec_rep


def _plain_function_wins(game, state, c, memo):
    if c == 0:
        return True
    key = (state, c)
    hit = memo.get(key)
    if hit is not None:
        return hit
    res = True
    for t in game.options_at(state):
        for answers in game.moves:
            ok = False
            for p in answers:
                child = game.extend(state, t, p)
                if child is not None and _plain_function_wins(game, child, c - 1, memo):
                    ok = True
                    break
            if not ok:
                res = False
                break
        if not res:
            break
    memo[key] = res
    return res


def function_clock_monotonicity(corpus, samples=400, seed=11):
    rep = PropertyReport("function-clock-monotonicity")
    rng = random.Random(seed)
    iso = [S.with_vocabulary(Vocabulary.LM_ISO) for S in corpus if S.size <= 3]
    for _ in range(samples):
        A, B = rng.choice(iso), rng.choice(iso)
        s = rng.choice([Fraction(1), Fraction(3, 2), Fraction(2)])
        menus = Menus((tuple((s + Fraction(rng.choice([1, 2, 4, 8]), 8), rng.choice([1, 2, 3]))
                             for _ in range(rng.choice([1, 2]))),))
        game = FunctionGame(A, B, menus)
        st = game.start_state(())
        memo = {}
        cap = min(function_saturation_clock(A, B, menus), 4)
        wins = [_plain_function_wins(game, st, c, memo) for c in range(cap + 1)]
        rep.checked += 1
        if any(w2 and not w1 for w1, w2 in zip(wins, wins[1:])):
            rep.fail((A.carrier.d, B.carrier.d, _fmt(s), menus.to_json(), wins))
    return rep


_FACTORS = [Fraction(1), Fraction(9, 8), Fraction(5, 4), Fraction(3, 2), Fraction(2), Fraction(3)]


def _function_wins(A, B, s, clock, menus):
    return solve_function_game(FunctionGameConfig(A, B, s, clock, menus),
                               strategy=False).winner == "II"


def function_weak_symmetry(corpus, samples=10000, seed=3):
    """II wins (s, menu)(A,B) => II wins (s+, transformed menu)(B,A)."""
    rep = PropertyReport("function-weak-symmetry")
    rng = random.Random(seed)
    iso = [S.with_vocabulary(Vocabulary.LM_ISO) for S in corpus]
    nonvacuous = 0
    for _ in range(samples):
        A, B = rng.choice(iso), rng.choice(iso)
        if A.size != B.size and rng.random() < 0.7:
            B = rng.choice([S for S in iso if S.size == A.size])
        s = rng.choice(_FACTORS)
        entries = []
        for _ in range(1 if max(A.size, B.size) > 3 else rng.choice([1, 2])):
            entries.append((s * rng.choice([Fraction(17, 16), Fraction(9, 8), Fraction(3, 2)]),
                            rng.choice([2, 3, 4, 6])))
        clock = rng.choice([0, 1, 2, 3])
        s_plus = s * rng.choice([Fraction(1), Fraction(9, 8)])
        plus = []
        for si, ki in entries:
            si_plus = max(si, s_plus) * rng.choice([Fraction(33, 32), Fraction(9, 8)])
            plus.append((si_plus, max(1, math.floor(ki / si_plus))))
        rep.checked += 1
        if any(k_minus > ki / sp for (sp, k_minus), (_, ki) in zip(plus, entries)):
            continue  # k- below 1 would be needed; skipped configurations count as vacuous
        if not _function_wins(A, B, s, clock, Menus((tuple(entries),))):
            continue
        nonvacuous += 1
        if not _function_wins(B, A, s_plus, clock, Menus((tuple(plus),))):
            rep.fail((A.carrier.d, B.carrier.d, _fmt(s), entries, _fmt(s_plus), plus, clock))
    rep.info.update(nonvacuous=nonvacuous)
    return rep


def function_weak_transitivity(corpus, samples=10000, seed=5):
    """II wins (A,B) and (B,C) with matched menus => II wins (A,C) at the product factor."""
    rep = PropertyReport("function-weak-transitivity")
    rng = random.Random(seed)
    iso = [S.with_vocabulary(Vocabulary.LM_ISO) for S in corpus]
    by_size = {}
    for S in iso:
        by_size.setdefault(S.size, []).append(S)
    nonvacuous = 0
    for _ in range(samples):
        A = rng.choice(iso)
        same = by_size[A.size]
        B, C = rng.choice(same), rng.choice(same if rng.random() < 0.8 else iso)
        s, s2 = rng.choice(_FACTORS), rng.choice(_FACTORS)
        count = 1 if max(A.size, B.size, C.size) > 3 else rng.choice([1, 2])
        m1, m2, m3 = [], [], []
        for _ in range(count):
            si = s * rng.choice([Fraction(17, 16), Fraction(9, 8), Fraction(3, 2)])
            ti = s2 * rng.choice([Fraction(17, 16), Fraction(9, 8), Fraction(3, 2)])
            ki = rng.choice([1, 2, 3])
            m1.append((si, ki))
            m2.append((ti, ceil_mul(ki, si)))
            m3.append((si * ti, ki))
        clock = rng.choice([0, 1, 2, 3])
        rep.checked += 1
        if not _function_wins(A, B, s, clock, Menus((tuple(m1),))):
            continue
        if not _function_wins(B, C, s2, clock, Menus((tuple(m2),))):
            continue
        nonvacuous += 1
        if not _function_wins(A, C, s * s2, clock, Menus((tuple(m3),))):
            rep.fail((A.carrier.d, B.carrier.d, C.carrier.d, m1, m2, m3, clock))
    rep.info.update(nonvacuous=nonvacuous)
    return rep


def strategy_replay(corpus, eps_grid=EPS_GRID, clocks=(1, 2, 3)):
    """Following the extracted strategy never loses for the declared winner."""
    rep = PropertyReport("strategy-replay")
    small = [S for S in corpus if S.size <= 3]
    for A in small:
        for B in small:
            for eps in eps_grid:
                for clock in clocks:
                    res = solve_relation_game(RelationGameConfig(A, B, eps, clock))
                    rep.checked += 1
                    if not _replays(A, B, eps, clock, res):
                        rep.fail((A.carrier.d, B.carrier.d, _fmt(eps), clock, res.winner))
    return rep


def _replays(A, B, eps, clock, res):
    from .games import relation_win_check
    strat = res.strategy
    moves = [("A", a) for a in A.labels] + [("B", b) for b in B.labels]

    def walk(pairs, c):
        if not relation_win_check(A, B, pairs, eps):
            return "I"
        if c == 0:
            return "II"
        pos = tuple(sorted(set(pairs)))
        if res.winner == "I":
            mv = strat.get((pos, c))
            if mv is None:
                return None
            side, x = mv
            answers = [(x, b) for b in B.labels] if side == "A" else [(a, x) for a in A.labels]
            outs = {walk(pairs + [p], c - 1) for p in answers}
            return "I" if outs == {"I"} else None
        outs = set()
        for side, x in moves:
            ans = strat.get((pos, c, (side, x)))
            if ans is None:
                return None
            p = (x, ans) if side == "A" else (ans, x)
            outs.add(walk(pairs + [p], c - 1))
        return "II" if outs == {"II"} else None

    return walk([], clock) == res.winner


# -- Appr / neg algebra -----------------------------------------------------------------

def _rand_fraction(rng, lo, hi, den=8):
    return Fraction(rng.randint(int(lo * den), int(hi * den)), den)


def _random_normed(rng, unit_ball, norm=None, points=3):
    norm = norm or rng.choice(["l1", "linf", "wl1", "wlinf"])
    weights = None
    if norm in ("wl1", "wlinf"):
        weights = [Fraction(rng.choice([1, 2, 3]), rng.choice([1, 2])) for _ in range(2)]
    pts = {}
    for i in range(points):
        while True:
            v = [_rand_fraction(rng, -1, 1, 4) for _ in range(2)]
            cfg = normed_config({"p": v}, norm, weights)
            if not unit_ball or cfg.carrier.norm_value(v) <= 1:
                break
        pts[f"p{i}"] = v
    return normed_config(pts, norm, weights, unit_ball=unit_ball)


_ADD_EPS = [Fraction(1, 8), Fraction(1, 4), Fraction(1, 3), Fraction(1, 2), Fraction(1),
            Fraction(3, 2)]
_MUL_S = [Fraction(9, 8), Fraction(5, 4), Fraction(3, 2), Fraction(2), Fraction(3)]


def _sample_instance(rng, metric_spaces):
    """(structure, atom, variables) drawn across all four vocabularies."""
    kind = rng.choice(["lm_corr", "lm_iso", "lb", "lbb"])
    if kind in ("lm_corr", "lm_iso"):
        S = rng.choice(metric_spaces).with_vocabulary(kind)
        ds = sorted({x for row in S.carrier.d for x in row})
        r = rng.choice(ds + [Fraction(0), _rand_fraction(rng, 0, 3, 4)])
        atom = rng.choice([DLeq, DGeq])(r, "u", "v")
        return S, atom, ("u", "v")
    if kind == "lb":
        S = _random_normed(rng, False)
        m = rng.choice([1, 2])
        coeffs = tuple(_rand_fraction(rng, -3, 3, 2) for _ in range(m))
        vars_ = tuple(f"w{i}" for i in range(m))
        return S, rng.choice([PNorm, QNorm])(coeffs, vars_), vars_
    S = _random_normed(rng, True)
    m = rng.choice([1, 2])
    raw = [Fraction(rng.randint(1, 4)) * rng.choice([1, -1]) for _ in range(m)]
    tot = sum(abs(x) for x in raw)
    coeffs = tuple(x / tot for x in raw)
    vars_ = tuple(f"w{i}" for i in range(m))
    r = rng.choice([Fraction(0), Fraction(1), _rand_fraction(rng, 0, 1, 8)])
    return S, rng.choice([PNorm, QNorm])(coeffs, vars_, r), vars_


def _assignments(S, vars_):
    for pts in itertools.product(S.labels, repeat=len(set(vars_))):
        yield dict(zip(sorted(set(vars_)), pts))


def _precision(S, rng):
    if S.vocabulary.additive:
        e = rng.choice(_ADD_EPS)
        return Additive(e)
    return Multiplicative(rng.choice(_MUL_S))


def _same_truth(S, phi, psi, vars_):
    return all(eval_atomic(S, phi, a) == eval_atomic(S, psi, a) for a in _assignments(S, vars_))


def _value(S, phi, a):
    if isinstance(phi, (DLeq, DGeq)):
        return S.carrier.dist(a[phi.u], a[phi.v])
    return S.carrier.norm_value(term_vector(S.carrier, phi, a))


def weak_negation_boundary(S, phi, a):
    """Points where the weak-negation law cannot hold because a threshold is truncated."""
    x = _value(S, phi, a)
    if isinstance(phi, DGeq):
        return phi.r == 0 and x == 0
    if isinstance(phi, DLeq):
        return not S.vocabulary.additive and phi.r == 0 and x == 0
    if phi.r is None:
        return False
    if isinstance(phi, PNorm):
        return phi.r == 1 and x == 1
    return phi.r == 0 and x == 0


def appr_neg_boundary(S, phi, eps, delta, a):
    """Points where the Appr-of-neg law breaks because Appr truncates (additive only)."""
    if not S.vocabulary.additive:
        return False
    x = _value(S, phi, a)
    if isinstance(phi, DGeq):
        return phi.r < 2 * eps and max(phi.r - 2 * eps + 2 * delta, Fraction(0)) < x <= 2 * delta
    if isinstance(phi, DLeq):
        return False
    if isinstance(phi, PNorm):
        return phi.r + eps > 1 and 1 - delta <= x < min(phi.r + eps - delta, Fraction(1))
    return phi.r < eps and max(phi.r - eps + delta, Fraction(0)) < x <= min(delta, Fraction(1))


def _normed_grid(S, phi, vars_):
    vals = {_value(S, phi, a) for a in _assignments(S, vars_)}
    if S.vocabulary.additive:
        marks = sorted({abs(v - phi.r) for v in vals} | {Fraction(0)})
        marks.append(marks[-1] + 1)
        return [Additive((x + y) / 2) for x, y in zip(marks, marks[1:])]
    marks = {Fraction(1)} | {v for v in vals if v > 0} | {1 / v for v in vals if v > 0}
    marks = sorted(m for m in marks if m >= 1)
    marks.append(2 * marks[-1])
    return [Multiplicative((x + y) / 2) for x, y in zip(marks, marks[1:])]


def appr_laws(samples=1000, seed=1, corpus=None):
    """Additivity, involution, weak negation and Appr-of-neg on sampled instances.

    Returns the four raw laws plus a characterization report: every failure
    of the last two laws must sit at a truncation boundary, and every
    boundary point must actually fail.
    """
    rng = random.Random(seed)
    corpus = corpus or small_corpus(3)
    add = PropertyReport("appr-additivity")
    inv = PropertyReport("neg-involution")
    wn = PropertyReport("weak-negation-law")
    an = PropertyReport("appr-of-neg-law")
    char = PropertyReport("truncation-boundary-characterization")
    mono = PropertyReport("appr-monotone")
    zero = PropertyReport("appr-zero-identity")
    wn_points = an_points = 0
    for _ in range(samples):
        S, phi, vars_ = _sample_instance(rng, corpus)
        p, q = _precision(S, rng), _precision(S, rng)
        # additivity as satisfaction sets
        add.checked += 1
        if not _same_truth(S, appr(appr(phi, p), q), appr(phi, p.then(q)), vars_):
            add.fail((S.vocabulary.value, phi, p, q))
        inv.checked += 1
        if neg_atom(neg_atom(phi)) != phi or weak_neg(weak_neg(Atom(phi))) != Atom(phi):
            inv.fail((S.vocabulary.value, phi))
        mono.checked += 1
        if any(eval_atomic(S, phi, a) and not eval_atomic(S, appr(phi, p), a)
               for a in _assignments(S, vars_)):
            mono.fail((S.vocabulary.value, phi, p))
        zero.checked += 1
        ident = Additive(0) if S.vocabulary.additive else Multiplicative(1)
        if appr(phi, ident) != phi:
            zero.fail((S.vocabulary.value, phi))
        # weak negation over the breakpoint grid
        wn.checked += 1
        if S.vocabulary.metric:
            grid = _negation_grid(Atom(phi), [S])
        else:
            grid = _normed_grid(S, phi, vars_)
        negs = [neg_atom(appr(phi, e)) for e in grid]
        bad = False
        for a in _assignments(S, vars_):
            holds = eval_atomic(S, phi, a)
            some = any(eval_atomic(S, nphi, a) for nphi in negs)
            fails_here = holds == some
            boundary = weak_negation_boundary(S, phi, a)
            wn_points += 1
            char.checked += 1
            if fails_here != boundary:
                char.fail(("weak-negation", S.vocabulary.value, phi, a, fails_here))
            if fails_here and not bad:
                bad = True
                wn.fail((S.vocabulary.value, phi, a))
        # Appr of neg, eps >= delta > 0
        an.checked += 1
        small, big = sorted([p, q], key=lambda x: x.eps if isinstance(x, Additive) else x.s)
        if isinstance(big, Additive):
            rest = Additive(big.eps - small.eps)
            eps_val, delta_val = big.eps, small.eps
        else:
            rest = Multiplicative(big.s / small.s)
            eps_val = delta_val = None
        lhs = appr(neg_atom(appr(phi, big)), small)
        rhs = neg_atom(appr(phi, rest))
        bad = False
        for a in _assignments(S, vars_):
            fails_here = eval_atomic(S, lhs, a) != eval_atomic(S, rhs, a)
            boundary = eps_val is not None and appr_neg_boundary(S, phi, eps_val, delta_val, a)
            an_points += 1
            char.checked += 1
            if fails_here != boundary:
                char.fail(("appr-of-neg", S.vocabulary.value, phi, big, small, a, fails_here))
            if fails_here and not bad:
                bad = True
                an.fail((S.vocabulary.value, phi, big, small, a))
    wn.info.update(points=wn_points)
    an.info.update(points=an_points)
    return [add, inv, wn, an, char, mono, zero]


def good_closure(samples=500, seed=2):
    rep = PropertyReport("good-closure-under-appr")
    rng = random.Random(seed)
    for _ in range(samples):
        k = rng.randint(1, 5)
        s = rng.choice(_MUL_S)
        if rng.random() < 0.5:
            phi = rng.choice([DLeq, DGeq])(Fraction(rng.randint(1, 12), rng.randint(1, 6)), "u", "v")
        else:
            m = rng.randint(1, 4)
            phi = rng.choice([PNorm, QNorm])(
                tuple(Fraction(rng.randint(-10, 10), rng.randint(1, 3)) for _ in range(m)),
                tuple(f"w{i}" for i in range(m)))
        if not is_good(phi, k):
            continue
        rep.checked += 1
        if not is_good(appr(phi, Multiplicative(s)), ceil_mul(k, s)):
            rep.fail((phi, k, s))
    return rep


def breakpoint_laws(corpus):
    rep = PropertyReport("breakpoint-symmetry")
    for A in corpus:
        for B in corpus:
            rep.checked += 1
            if distance_breakpoints(A, B) != distance_breakpoints(B, A):
                rep.fail(("additive", A.carrier.d, B.carrier.d))
            Ai, Bi = A.with_vocabulary("lm_iso"), B.with_vocabulary("lm_iso")
            bps = distance_breakpoints(Ai, Bi)
            if sorted(1 / b for b in bps) != bps:
                rep.fail(("reciprocal", A.carrier.d, B.carrier.d))
    return rep


# -- perturbation and Banach preservation -----------------------------------------------

def _metric_from_points(points, norm):
    names = list(points)

    def dist(x, y):
        diff = [a - b for a, b in zip(points[x], points[y])]
        return sum(abs(t) for t in diff) if norm == "l1" else max(abs(t) for t in diff)

    return metric_space(names, [[dist(x, y) for y in names] for x in names], Vocabulary.LM_ISO)


def _offset(rng, delta, norm):
    # strictly inside the delta-ball of the norm
    if norm == "l1":
        return [delta * Fraction(rng.randint(-7, 7), 16) for _ in range(2)]
    return [delta * Fraction(rng.randint(-15, 15), 16) for _ in range(2)]


def perturbation(samples=1000, seed=9):
    """A |= phi(a) and d(a, b) < delta  =>  A |= Appr(phi, s)(b)."""
    rng = random.Random(seed)
    lm = PropertyReport("perturbation-lm-iso")
    lb = PropertyReport("perturbation-lb")
    held = {"lm": 0, "lb": 0}
    while lm.checked < samples:
        norm = rng.choice(["l1", "linf"])
        k = rng.randint(1, 5)
        s = rng.choice(_MUL_S)
        kind = rng.choice([DLeq, DGeq])
        delta = (s - 1) / (2 * k) if kind is DLeq else (1 - 1 / s) / (2 * k)
        a = [_rand_fraction(rng, -2, 2, 8) for _ in range(2)]
        a2 = [_rand_fraction(rng, -2, 2, 8) for _ in range(2)]
        b = [x + y for x, y in zip(a, _offset(rng, delta, norm))]
        b2 = [x + y for x, y in zip(a2, _offset(rng, delta, norm))]
        pts = {"a": a, "a2": a2, "b": b, "b2": b2}
        if len({tuple(v) for v in pts.values()}) < 4:
            continue
        S = _metric_from_points(pts, norm)
        dA = S.carrier.dist("a", "a2")
        r = max(Fraction(1, k), rng.choice([dA, dA, _rand_fraction(rng, 0, 4, 8)]))
        phi = kind(r, "u", "v")
        if not (S.carrier.dist("a", "b") < delta and S.carrier.dist("a2", "b2") < delta):
            continue
        lm.checked += 1
        if eval_atomic(S, phi, {"u": "a", "v": "a2"}):
            held["lm"] += 1
            if not eval_atomic(S, appr(phi, Multiplicative(s)), {"u": "b", "v": "b2"}):
                lm.fail((norm, k, s, phi, pts))
    while lb.checked < samples:
        norm = rng.choice(["l1", "linf"])
        k = rng.randint(1, 5)
        s = rng.choice(_MUL_S)
        kind = rng.choice([PNorm, QNorm])
        delta = (s - 1) / (k * k) if kind is PNorm else (1 - 1 / s) / (k * k)
        m = rng.randint(1, min(k, 3))
        coeffs = tuple(Fraction(rng.randint(-k * 2, k * 2), 2) for _ in range(m))
        if not any(coeffs):
            continue
        a = [[_rand_fraction(rng, -1, 1, 8) for _ in range(2)] for _ in range(m)]
        probe = normed_config({"z": [0, 0]}, norm).carrier
        total = probe.norm_value([sum(c * v[t] for c, v in zip(coeffs, a)) for t in range(2)])
        if total == 0:
            continue
        # put the term's norm near the threshold 1
        scale = rng.choice([Fraction(1), Fraction(15, 16), Fraction(17, 16), Fraction(1, 2)])
        a = [[x * scale / total for x in v] for v in a]
        b = [[x + y for x, y in zip(v, _offset(rng, delta, norm))] for v in a]
        pts = {f"a{i}": v for i, v in enumerate(a)}
        pts.update({f"b{i}": v for i, v in enumerate(b)})
        S = normed_config(pts, norm)
        c = S.carrier
        if not all(c.norm_lt([x - y for x, y in zip(c.point(f"a{i}"), c.point(f"b{i}"))], delta)
                   for i in range(m)):
            continue
        vars_ = tuple(f"w{i}" for i in range(m))
        phi = kind(coeffs, vars_)
        if not is_good(phi, k):
            continue
        lb.checked += 1
        if eval_atomic(S, phi, {f"w{i}": f"a{i}" for i in range(m)}):
            held["lb"] += 1
            if not eval_atomic(S, appr(phi, Multiplicative(s)), {f"w{i}": f"b{i}" for i in range(m)}):
                lb.fail((norm, k, s, phi, pts))
    lm.info.update(premise_held=held["lm"])
    lb.info.update(premise_held=held["lb"])
    return lm, lb


def banach_preservation(samples=8, seed=13, max_k=3):
    """Diagonal maps with factor s preserve formulae up to Appr(., s), both directions."""
    rep = PropertyReport("banach-preservation")
    rng = random.Random(seed)
    vertices = 0
    for n in range(samples):
        norm = ["linf", "l1"][n % 2]
        s = rng.choice([Fraction(5, 4), Fraction(3, 2), Fraction(2)])
        t = [rng.choice([1 / s, Fraction(1), s, (1 + s) / 2, 2 / (1 + s)]) * rng.choice([1, -1])
             for _ in range(2)]
        pts = {}
        while len(pts) < 3:
            v = [_rand_fraction(rng, -1, 1, 4) for _ in range(2)]
            if any(v):
                pts[f"p{len(pts)}"] = v
        A = normed_config(pts, norm)
        B = normed_config({x: [t[0] * v[0], t[1] * v[1]] for x, v in pts.items()}, norm)
        labels = list(pts)
        for k in range(1, max_k + 1):
            for m in range(1, k + 1):
                for tup in itertools.combinations(labels, m):
                    for X, Y in ((A, B), (B, A)):
                        cs = banach.coefficient_vertex_set(X, list(tup), k)
                        vertices += len(cs)
                        for c in cs:
                            vars_ = tuple(f"w{i}" for i in range(m))
                            a = dict(zip(vars_, tup))
                            for kind in (PNorm, QNorm):
                                phi = kind(tuple(c), vars_)
                                rep.checked += 1
                                if eval_atomic(X, phi, a) and \
                                        not eval_atomic(Y, appr(phi, Multiplicative(s)), a):
                                    rep.fail((norm, s, t, pts, phi))
                        # exact Q side beyond the vertex set
                        played = [(x, x) for x in tup]
                        rep.checked += 1
                        hit = banach._q_side_exact(X, Y, list(tup), list(tup), k, s)
                        if hit is not None:
                            rep.fail((norm, s, t, pts, "Q-exact", hit))
    rep.info.update(vertices=vertices)
    return rep


# -- registry -----------------------------------------------------------------------

def _suite_appr(quick):
    n = 200 if quick else 1000
    reports = appr_laws(samples=n)
    reports.append(good_closure(samples=200 if quick else 1000))
    reports.append(breakpoint_laws(corpus_for(3 if quick else 4)))
    return reports


def _suite_games(quick):
    corpus = corpus_for(3 if quick else 4)
    samples = 500 if quick else 10000
    return [relation_symmetry(corpus), relation_weak_transitivity(corpus),
            *relation_monotonicity(corpus),
            function_weak_symmetry(corpus, samples),
            function_weak_transitivity(corpus, samples),
            function_clock_monotonicity(corpus, 100 if quick else 400),
            strategy_replay(corpus)]


def _suite_oracle(quick):
    corpus = corpus_for(3 if quick else 4)
    return [oracle_additive(corpus), oracle_multiplicative(corpus), gluing(corpus),
            gh_metric_laws(corpus),
            *perturbation(200 if quick else 1000),
            banach_preservation(2 if quick else 8)]


def _suite_scott(quick):
    corpus = corpus_for(3 if quick else 4)
    return [watershed_pin(), formulae_vs_games(corpus),
            function_formulae_vs_games(corpus_for(3), 50 if quick else 300),
            sentence_laws(corpus_for(2 if quick else 3)),
            watershed_successor(corpus_for(3)), rank_monotone(corpus_for(2 if quick else 3))]


SUITES = {
    "appr-laws": _suite_appr,
    "game-laws": _suite_games,
    "oracle-equivalence": _suite_oracle,
    "scott-equivalence": _suite_scott,
}


def run_suite(name, quick=False):
    """Run a registered suite (or "all"); returns {"suite", "pass", "properties"}."""
    if name == "all":
        names = list(SUITES)
    elif name in SUITES:
        names = [name]
    else:
        raise UnknownSuite(f"no suite named {name!r}; known: {', '.join(list(SUITES) + ['all'])}")
    props = []
    for n in names:
        props.extend(SUITES[n](quick))
    return {"suite": name, "pass": all(p.passed for p in props),
            "properties": [p.to_json() for p in props]}
