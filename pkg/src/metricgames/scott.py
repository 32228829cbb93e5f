"""Scott watersheds, corpus-relative ranks, and finite-fragment Scott formulae."""

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from .atoms import DGeq, DLeq
from .errors import ParseError, SemanticsMismatch
from .games import (
    FunctionGame,
    FunctionGameConfig,
    Menus,
    RelationGameConfig,
    _relation_core,
    _mask_of,
    function_saturation_clock,
    relation_saturation_clock,
    solve_function_game,
    solve_relation_game,
)
from .logic import (
    Atom,
    Exists,
    Forall,
    conj,
    disj,
    formula_to_json,
    strong_negation,
)
from .structures import Additive, Multiplicative, Vocabulary, format_rational


class _IIWinsAll:
    def __repr__(self):
        return "IIWinsAll"

    def __str__(self):
        return "IIWinsAll"


IIWinsAll = _IIWinsAll()


@dataclass(frozen=True)
class Watershed:
    """Least clock at which I wins, or IIWinsAll past the saturation clock."""

    value: object

    @property
    def finite(self):
        return self.value is not IIWinsAll

    def __str__(self):
        return str(self.value)


def var(i):
    return f"v{i}"


def _eps_of(eps):
    if isinstance(eps, Additive):
        return eps.eps
    if isinstance(eps, Multiplicative):
        raise SemanticsMismatch("relation constructions take an additive precision")
    return Fraction(eps)


# -- watersheds -----------------------------------------------------------------

def watershed_relation(A, B, start_pairs=(), eps=0):
    """Least losing clock for II; a start that already fails gives 0."""
    eps = _eps_of(eps)
    cap = relation_saturation_clock(A, B, start_pairs)
    if A.vocabulary is Vocabulary.LBB:
        for c in range(cap + 1):
            cfg = RelationGameConfig(A, B, eps, c, start_pairs)
            if solve_relation_game(cfg, strategy=False).winner == "I":
                return Watershed(c)
        return Watershed(IIWinsAll)
    core = _relation_core(A, B, eps)
    c = core.least_losing_clock(_mask_of(A, B, start_pairs), cap)
    return Watershed(IIWinsAll if c is None else c)


def watershed_function(A, B, cfg):
    """Menu-relative watershed; ``cfg.clock`` is ignored."""
    cap = function_saturation_clock(A, B, cfg.menus, cfg.start)
    if A.vocabulary is Vocabulary.LB:
        for c in range(cap + 1):
            run = FunctionGameConfig(A, B, cfg.s, c, cfg.menus, cfg.start)
            if solve_function_game(run, strategy=False).winner == "I":
                return Watershed(c)
        return Watershed(IIWinsAll)
    game = FunctionGame(A, B, cfg.menus)
    st = game.start_state(cfg.start)
    if not game.state_passes(st):
        return Watershed(0)
    for c in range(1, cap + 1):
        if not game.ii_wins(st, c):
            return Watershed(c)
    return Watershed(IIWinsAll)


# -- formulae ---------------------------------------------------------------------

@dataclass
class ScottFormula:
    formula: object
    meta: dict = field(default_factory=dict)

    def to_json(self, shared=False):
        out = formula_to_json(self.formula, shared=shared)
        out = dict(out)
        out["meta"] = self.meta
        return out


def _intern(memo, F):
    # structurally equal subformulae become one shared node
    table = memo.setdefault("intern", {})
    return table.setdefault(F, F)


def _atom(memo, kind, r, i, j):
    table = memo.setdefault("atoms", {})
    key = (kind, r, i, j)
    a = table.get(key)
    if a is None:
        a = table[key] = Atom(kind(r, var(i), var(j)))
    return a


def _relation_base(A, abar, eps, memo):
    # the clause for abar extends the clause for its prefix by the pairs with the last point
    if len(abar) < 2:
        return conj([])
    d = A.carrier
    idx = [d.index(a) for a in abar]
    j = len(idx) - 1
    parts = [] if j == 1 else [_relation_psi(A, abar[:-1], eps, 0, memo)]
    for i in range(j):
        r = d.d[idx[i]][idx[j]]
        parts.append(_atom(memo, DLeq, r + 2 * eps, i, j))
        parts.append(_atom(memo, DGeq, max(r - 2 * eps, Fraction(0)), i, j))
    return conj(parts)


def _relation_psi(A, abar, eps, alpha, memo):
    key = (abar, alpha)
    hit = memo.get(key)
    if hit is not None:
        return hit
    if alpha == 0:
        F = _relation_base(A, abar, eps, memo)
    else:
        v = var(len(abar))
        subs = [_relation_psi(A, abar + (a,), eps, alpha - 1, memo) for a in A.labels]
        F = conj([conj([Exists(v, G) for G in subs]), Forall(v, disj(subs))])
    F = _intern(memo, F)
    memo[key] = F
    return F


def scott_formula_relation(A, abar, eps, alpha, memo=None):
    """psi^{eps,alpha}_{A,abar} over the variables v0..v{n-1}."""
    eps = _eps_of(eps)
    abar = tuple(abar)
    for a in abar:
        A.carrier.index(a)
    if alpha < 0:
        raise ParseError("clock must be a natural number")
    F = _relation_psi(A, abar, eps, alpha, {} if memo is None else memo)
    return ScottFormula(F, {"eps": format_rational(eps), "clock": alpha, "start": list(abar)})


def _function_base(A, abar, params, memo):
    # new constraints: pairs (j, last) under every round i <= j
    if len(abar) < 2:
        return conj([])
    d = A.carrier
    idx = [d.index(a) for a in abar]
    last = len(idx) - 1
    parts = [] if last == 1 else [_function_phi(A, abar[:-1], params[:-1], 0, None, 0, memo)]
    for j in range(last):
        r = d.d[idx[j]][idx[last]]
        for i in range(j + 1):
            s, k = params[i]
            inv_k = Fraction(1, k)
            parts.append(_atom(memo, DLeq, s * max(inv_k, r), j, last))
            if r >= inv_k:
                parts.append(_atom(memo, DGeq, r / s, j, last))
    return conj(parts)


def _function_phi(A, abar, params, alpha, menus, rnd, memo):
    key = (abar, params, alpha, rnd if alpha else 0)
    hit = memo.get(key)
    if hit is not None:
        return hit
    if alpha == 0:
        F = _function_base(A, abar, params, memo)
    else:
        v = var(len(abar))
        nxt = min(rnd + 1, len(menus.rounds) - 1)
        parts = []
        for opt in menus.at(rnd):
            subs = [_function_phi(A, abar + (a,), params + (opt,), alpha - 1, menus, nxt, memo)
                    for a in A.labels]
            parts.append(conj([Exists(v, G) for G in subs]))
            parts.append(Forall(v, disj(subs)))
        F = conj(parts)
    F = _intern(memo, F)
    memo[key] = F
    return F


def scott_formula_function(A, abar, s, sbar, kbar, alpha, menus, memo=None):
    """phi^{s,alpha,sbar,kbar}_{A,abar}, conjoining over menu entries only."""
    if not isinstance(menus, Menus):
        menus = Menus.from_json(menus)
    s = Fraction(s.s if isinstance(s, Multiplicative) else s)
    abar = tuple(abar)
    if not len(abar) == len(sbar) == len(kbar):
        raise ParseError("start tuple, factors and k-values must have equal length")
    params = tuple((Fraction(x), int(k)) for x, k in zip(sbar, kbar))
    for x, _ in params + tuple(menus.options()):
        if not x > s:
            raise ParseError(f"factor {format_rational(x)} must exceed the base {format_rational(s)}")
    for a in abar:
        A.carrier.index(a)
    F = _function_phi(A, abar, params, alpha, menus, 0, {} if memo is None else memo)
    return ScottFormula(F, {"s": format_rational(s), "clock": alpha, "start": list(abar),
                            "sbar": [format_rational(x) for x, _ in params],
                            "kbar": [k for _, k in params], "menus": menus.to_json()})


def scott_sentence_relation(A, eps, rank, targets=(), tuple_bound=2):
    """psi^rank_A conjoined with the capped stabilization implications.

    Implications use strong negation relative to A and the given targets, so
    evaluation is exact on exactly those structures.
    """
    eps = _eps_of(eps)
    memo = {}
    evaluated = [A] + [B for B in targets if B is not A]
    parts = [_relation_psi(A, (), eps, rank, memo)]
    for n in range(1, tuple_bound + 1):
        for abar in itertools.product(A.labels, repeat=n):
            lo = _relation_psi(A, abar, eps, rank, memo)
            hi = _relation_psi(A, abar, eps, rank + 1, memo)
            body = disj([strong_negation(lo, *evaluated), hi])
            for i in reversed(range(n)):
                body = Forall(var(i), body)
            parts.append(body)
    return ScottFormula(conj(parts), {"eps": format_rational(eps), "rank": rank,
                                      "tuple_bound": tuple_bound,
                                      "targets": len(evaluated)})


def scott_sentence_zero_plus(A, grid, rank, targets=(), tuple_bound=2):
    """Conjunction of the sentences over a caller-supplied positive eps grid."""
    grid = sorted(_eps_of(e) for e in grid)
    parts = [scott_sentence_relation(A, e, rank, targets, tuple_bound).formula for e in grid]
    return ScottFormula(conj(parts), {"grid": [format_rational(e) for e in grid], "rank": rank,
                                      "tuple_bound": tuple_bound})


def corpus_rank(A, corpus, eps, tuple_bound=2):
    """Max finite watershed against corpus members no larger than A."""
    eps = _eps_of(eps)
    best = 0
    for B in corpus:
        if B.size > A.size or B.vocabulary != A.vocabulary:
            continue
        for n in range(tuple_bound + 1):
            for abar in itertools.product(A.labels, repeat=n):
                for bbar in itertools.product(B.labels, repeat=n):
                    w = watershed_relation(A, B, tuple(zip(abar, bbar)), eps)
                    if w.finite:
                        best = max(best, w.value)
    return best
