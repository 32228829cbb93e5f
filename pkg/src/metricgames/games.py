"""Clocked dynamic EF games on finite structures.

Relation games (additive precision) and function games (multiplicative
precision with per-round (s_i, k_i) chosen by player I from finite menus).
Player I moves a point of either structure, player II answers in the other.
With clock n, player I plays n rounds: stopping early never helps I because
winning conditions only accumulate.
"""

import math
from collections import OrderedDict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from . import banach
from .errors import (
    Abort,
    IllegalMove,
    MenuEmpty,
    ParseError,
    SemanticsMismatch,
    StateSpaceTooLarge,
    UnsupportedVocabulary,
    VocabularyMismatch,
)
from .structures import (
    FiniteMetricSpace,
    Vocabulary,
    distance_breakpoints,
    format_rational,
    good_saturation_bound,
    parse_rational,
)

DEFAULT_BUDGET = 1 << 20
DEFAULT_CAP_BUDGET = 1 << 30


# -- closed-form checks ---------------------------------------------------------

def _dist_rows(S):
    return S.carrier.d


def _require_additive(A, B):
    if A.vocabulary != B.vocabulary:
        raise VocabularyMismatch("structures use different vocabularies")
    if not A.vocabulary.additive:
        raise SemanticsMismatch(f"relation games need additive precision, "
                                f"not {A.vocabulary.value}")


def _require_multiplicative(A, B):
    if A.vocabulary != B.vocabulary:
        raise VocabularyMismatch("structures use different vocabularies")
    if A.vocabulary.additive:
        raise SemanticsMismatch(f"function games need multiplicative precision, "
                                f"not {A.vocabulary.value}")


def relation_violation(A, B, pairs, eps, **banach_opts):
    """First witnessed failure of the relation-game condition, or None.

    For metric structures the witness is (kind, (a, b), (a', b'), dA, dB) where
    kind "d" means dB > dA + 2eps and "D" means dB < dA - 2eps.
    """
    _require_additive(A, B)
    eps = Fraction(eps)
    pairs = list(pairs)
    if A.vocabulary is Vocabulary.LBB:
        return banach.lbb_relation_violation(A, B, pairs, eps, **banach_opts)
    ca, cb = A.carrier, B.carrier
    idx = [(ca.index(a), cb.index(b)) for a, b in pairs]
    for x in range(len(idx)):
        for y in range(x, len(idx)):
            (i, j), (i2, j2) = idx[x], idx[y]
            da, db = ca.d[i][i2], cb.d[j][j2]
            if db > da + 2 * eps:
                return ("d", pairs[x], pairs[y], da, db)
            if db < da - 2 * eps:
                return ("D", pairs[x], pairs[y], da, db)
    return None


def relation_win_check(A, B, pairs, eps, **banach_opts):
    """True iff every atomic fact over the pairs in A holds approximately in B."""
    return relation_violation(A, B, pairs, eps, **banach_opts) is None


def function_pair_ok(da, db, s, k):
    """Closed form of Good(k)-preservation for one pair of pairs at factor s."""
    inv_k = Fraction(1, k)
    if db > s * max(inv_k, da):
        return False
    if da >= inv_k and db * s < da:
        return False
    return True


def function_violation(A, B, position, **banach_opts):
    """First failure of the function-game condition on a played position.

    ``position`` lists (a, b, s_i, k_i) in round order.
    """
    _require_multiplicative(A, B)
    position = [(a, b, Fraction(s), int(k)) for a, b, s, k in position]
    if A.vocabulary is Vocabulary.LB:
        played = [(a, b) for a, b, _, _ in position]
        params = [(s, k) for _, _, s, k in position]
        return banach.lb_function_violation(A, B, played, params, **banach_opts)
    ca, cb = A.carrier, B.carrier
    idx = [(ca.index(a), cb.index(b)) for a, b, _, _ in position]
    n = len(position)
    for r in range(n):
        s, k = position[r][2], position[r][3]
        for x in range(r, n):
            for y in range(x + 1, n):
                da = ca.d[idx[x][0]][idx[y][0]]
                db = cb.d[idx[x][1]][idx[y][1]]
                if not function_pair_ok(da, db, s, k):
                    kind = "d" if db > s * max(Fraction(1, k), da) else "D"
                    return (kind, r, position[x][:2], position[y][:2], da, db)
    return None


def function_win_check(A, B, position, **banach_opts):
    return function_violation(A, B, position, **banach_opts) is None


# -- bitmask core ---------------------------------------------------------------

def relation_compat(A, B, eps):
    """compat[p] = bitmask of pairs q with (p, q) jointly admissible; p = i*|B| + j."""
    da, db = _dist_rows(A), _dist_rows(B)
    nA, nB = len(da), len(db)
    two_e = 2 * Fraction(eps)
    out = []
    for i in range(nA):
        for j in range(nB):
            m = 0
            for i2 in range(nA):
                ra = da[i][i2]
                for j2 in range(nB):
                    if abs(ra - db[j][j2]) <= two_e:
                        m |= 1 << (i2 * nB + j2)
            out.append(m)
    return out


def function_compat(A, B, s, k):
    da, db = _dist_rows(A), _dist_rows(B)
    nA, nB = len(da), len(db)
    s = Fraction(s)
    out = []
    for i in range(nA):
        for j in range(nB):
            m = 0
            for i2 in range(nA):
                for j2 in range(nB):
                    if function_pair_ok(da[i][i2], db[j][j2], s, k):
                        m |= 1 << (i2 * nB + j2)
            out.append(m)
    return out


class PairGame:
    """Clocked game whose positions are sets of pairs with a pairwise condition.

    ``ii_wins(mask, c)`` decides whether II survives c more rounds from a
    passing pair set. The memo stores, per mask, the largest clock known won
    by II and the smallest known won by I; clock monotonicity makes both
    reusable for every other clock.
    """

    def __init__(self, nA, nB, compat, budget=DEFAULT_BUDGET):
        self.nA, self.nB = nA, nB
        self.compat = compat
        self.budget = budget
        full = (1 << (nA * nB)) - 1
        self.complete = all(c == full for c in compat)
        self.won = {}
        self.lost = {}
        # I's moves: A points then B points; each lists II's answers as pair indices
        self.moves = [[i * nB + j for j in range(nB)] for i in range(nA)]
        self.moves += [[i * nB + j for i in range(nA)] for j in range(nB)]

    @property
    def explored(self):
        return len(self.won.keys() | self.lost.keys())

    def passes(self, mask):
        m = mask
        while m:
            low = m & -m
            p = low.bit_length() - 1
            if mask & ~self.compat[p]:
                return False
            m ^= low
        return True

    def admissible(self, mask, p):
        return not (mask & ~self.compat[p])

    def ii_wins(self, mask, c):
        if c <= 0 or self.complete:
            return True
        if c <= self.won.get(mask, 0):
            return True
        if c >= self.lost.get(mask, 1 << 30):
            return False
        if len(self.won) + len(self.lost) > self.budget:
            raise StateSpaceTooLarge(f"more than {self.budget} memoized positions")
        compat = self.compat
        result = True
        for answers in self.moves:
            # stall answers first: they keep the pair set unchanged
            survived = False
            for p in answers:
                if mask >> p & 1:
                    if self.ii_wins(mask, c - 1):
                        survived = True
                    break
            if not survived:
                for p in answers:
                    if mask >> p & 1 or mask & ~compat[p]:
                        continue
                    if self.ii_wins(mask | 1 << p, c - 1):
                        survived = True
                        break
            if not survived:
                result = False
                break
        if result:
            self.won[mask] = c
        else:
            self.lost[mask] = c
        return result

    def least_losing_clock(self, mask, cap):
        """Least clock <= cap at which I wins from mask, or None."""
        if not self.passes(mask):
            return 0
        for c in range(1, cap + 1):
            if not self.ii_wins(mask, c):
                return c
        return None

    def i_move(self, mask, c):
        """Lexicographically least winning move of I (index into moves), or None."""
        for x, answers in enumerate(self.moves):
            if all(not self._answer_ok(mask, p, c) for p in answers):
                return x
        return None

    def ii_answer(self, mask, c, x):
        for p in self.moves[x]:
            if self._answer_ok(mask, p, c):
                return p
        return None

    def _answer_ok(self, mask, p, c):
        if mask & ~self.compat[p]:
            return False
        return self.ii_wins(mask | 1 << p, c - 1)


_core_cache = OrderedDict()
CORE_CACHE_SIZE = 1 << 14


def pair_game(nA, nB, compat, budget=DEFAULT_BUDGET):
    """Shared PairGame per compat signature, so equal conditions reuse one memo."""
    key = (nA, nB, tuple(compat))
    g = _core_cache.get(key)
    if g is None:
        g = PairGame(nA, nB, compat, budget)
        _core_cache[key] = g
        if len(_core_cache) > CORE_CACHE_SIZE:
            _core_cache.popitem(last=False)
    else:
        _core_cache.move_to_end(key)
    return g


def clear_caches():
    _core_cache.clear()


# -- configurations and results ----------------------------------------------------

@dataclass(frozen=True)
class RelationGameConfig:
    A: object
    B: object
    eps: Fraction
    clock: int
    start_pairs: Tuple[Tuple[str, str], ...] = ()

    def __post_init__(self):
        _require_additive(self.A, self.B)
        object.__setattr__(self, "eps", Fraction(self.eps))
        object.__setattr__(self, "start_pairs", tuple(tuple(p) for p in self.start_pairs))
        if self.eps < 0:
            raise ParseError("eps must be nonnegative")
        if self.clock < 0:
            raise ParseError("clock must be a natural number")
        for a, b in self.start_pairs:
            self.A.carrier.index(a)
            self.B.carrier.index(b)


@dataclass(frozen=True)
class Menus:
    """Player I's per-round (s, k) options; the last round's menu repeats."""

    rounds: Tuple[Tuple[Tuple[Fraction, int], ...], ...]

    def __post_init__(self):
        rounds = tuple(tuple((Fraction(s), int(k)) for s, k in opts) for opts in self.rounds)
        if not rounds or any(not opts for opts in rounds):
            raise MenuEmpty("every round needs at least one (s, k) option")
        for opts in rounds:
            for s, k in opts:
                if k < 1:
                    raise ParseError(f"k-menu entry {k} is below 1")
        object.__setattr__(self, "rounds", rounds)

    @classmethod
    def product(cls, s_values, k_values):
        return cls(((tuple((Fraction(s), int(k)) for s in s_values for k in k_values)),))

    def at(self, n):
        return self.rounds[min(n, len(self.rounds) - 1)]

    def options(self):
        seen = []
        for opts in self.rounds:
            for o in opts:
                if o not in seen:
                    seen.append(o)
        return seen

    def to_json(self):
        return {"rounds": [[[format_rational(s), k] for s, k in opts] for opts in self.rounds]}

    @classmethod
    def from_json(cls, obj):
        if "rounds" in obj:
            rounds = []
            for r in obj["rounds"]:
                if isinstance(r, dict):
                    rounds.append([(parse_rational(s), int(k)) for s in r.get("s", [])
                                   for k in r.get("k", [])])
                else:
                    rounds.append([(parse_rational(s), int(k)) for s, k in r])
            return cls(tuple(tuple(r) for r in rounds))
        if "s" in obj and "k" in obj:
            return cls.product([parse_rational(s) for s in obj["s"]], obj["k"])
        raise ParseError("menus need 'rounds' or both 's' and 'k'")


@dataclass(frozen=True)
class FunctionGameConfig:
    A: object
    B: object
    s: Fraction
    clock: int
    menus: Menus
    start: Tuple[Tuple[str, str, Fraction, int], ...] = ()

    def __post_init__(self):
        _require_multiplicative(self.A, self.B)
        object.__setattr__(self, "s", Fraction(self.s))
        object.__setattr__(self, "start",
                           tuple((a, b, Fraction(si), int(ki)) for a, b, si, ki in self.start))
        if self.s < 1:
            raise ParseError("base factor must be at least 1")
        if self.clock < 0:
            raise ParseError("clock must be a natural number")
        for a, b, si, ki in self.start:
            self.A.carrier.index(a)
            self.B.carrier.index(b)
            if not si > self.s:
                raise ParseError(f"start factor {si} must exceed the base {self.s}")
            if ki < 1:
                raise ParseError("start k must be at least 1")
        for si, _ in self.menus.options():
            if not si > self.s:
                raise ParseError(f"menu factor {format_rational(si)} must exceed the base "
                                 f"{format_rational(self.s)}")


@dataclass
class GameResult:
    winner: str
    strategy: Dict = field(default_factory=dict)
    explored: int = 0
    clock: int = 0

    def to_json(self):
        return {"winner": self.winner, "clock": self.clock, "explored": self.explored,
                "strategy": [{"position": _pos_json(k), "move": _move_json(v)}
                             for k, v in sorted(self.strategy.items(), key=lambda kv: repr(kv[0]))]}


def _pos_json(key):
    return [list(x) if isinstance(x, tuple) else x for x in key]


def _move_json(v):
    return list(v) if isinstance(v, tuple) else v


# -- relation games -----------------------------------------------------------------

def _relation_core(A, B, eps, budget=DEFAULT_BUDGET):
    return pair_game(A.size, B.size, relation_compat(A, B, eps), budget)


def _mask_of(A, B, pairs):
    nB = B.size
    m = 0
    for a, b in pairs:
        m |= 1 << (A.carrier.index(a) * nB + B.carrier.index(b))
    return m


def relation_ii_wins(A, B, eps, clock, start_pairs=(), budget=DEFAULT_BUDGET):
    """Fast decision used by suites: does II win the clocked relation game?"""
    if A.vocabulary is Vocabulary.LBB:
        return solve_relation_game(RelationGameConfig(A, B, eps, clock, start_pairs),
                                   strategy=False).winner == "II"
    core = _relation_core(A, B, eps, budget)
    mask = _mask_of(A, B, start_pairs)
    return core.passes(mask) and core.ii_wins(mask, clock)


def solve_relation_game(cfg, strategy=True, budget=DEFAULT_BUDGET, **banach_opts):
    """Exact winner by backward induction over (pair set, remaining clock)."""
    A, B = cfg.A, cfg.B
    if A.vocabulary is Vocabulary.LBB:
        return _solve_generic_relation(cfg, strategy, budget, banach_opts)
    core = _relation_core(A, B, cfg.eps, budget)
    mask = _mask_of(A, B, cfg.start_pairs)
    ok = core.passes(mask) and core.ii_wins(mask, cfg.clock)
    res = GameResult("II" if ok else "I", {}, core.explored, cfg.clock)
    if strategy:
        res.strategy = _extract_pair_strategy(core, A, B, mask, cfg.clock, ok)
    return res


def _labels_of_mask(A, B, mask):
    nB = B.size
    out = []
    p = 0
    while mask >> p:
        if mask >> p & 1:
            out.append((A.labels[p // nB], B.labels[p % nB]))
        p += 1
    return tuple(out)


def _move_label(A, B, core, x):
    return ("A", A.labels[x]) if x < core.nA else ("B", B.labels[x - core.nA])


def _answer_label(A, B, core, x, p):
    return B.labels[p % core.nB] if x < core.nA else A.labels[p // core.nB]


def _extract_pair_strategy(core, A, B, mask, clock, ii_wins):
    """Strategy on every position reachable when the winner follows it."""
    strat = {}
    if not core.passes(mask):
        return strat
    stack = [(mask, clock)]
    seen = set()
    while stack:
        m, c = stack.pop()
        if (m, c) in seen or c == 0:
            continue
        seen.add((m, c))
        pos = _labels_of_mask(A, B, m)
        if not ii_wins:
            x = core.i_move(m, c)
            strat[(pos, c)] = _move_label(A, B, core, x)
            for p in core.moves[x]:
                if core.admissible(m, p):
                    stack.append((m | 1 << p, c - 1))
        else:
            for x in range(len(core.moves)):
                p = core.ii_answer(m, c, x)
                strat[(pos, c, _move_label(A, B, core, x))] = _answer_label(A, B, core, x, p)
                stack.append((m | 1 << p, c - 1))
    return strat


def relation_saturation_clock(A, B, start_pairs=(), budget=DEFAULT_CAP_BUDGET):
    """Clock past which relation-game results no longer change.

    Any move of I on a point already covered can be answered by its partner,
    leaving the pair set unchanged, so only moves on uncovered points matter;
    each covers at least one new point and the first covers two.
    """
    if (1 << (A.size * B.size)) > budget:
        raise StateSpaceTooLarge(
            f"2^{A.size * B.size} pair sets exceed the budget of {budget}")
    if not start_pairs:
        return A.size + B.size - 1
    covered = len({a for a, _ in start_pairs}) + len({b for _, b in start_pairs})
    return max(A.size + B.size - covered, 0)


def _solve_generic_relation(cfg, strategy, budget, banach_opts):
    A, B = cfg.A, cfg.B
    memo = {}
    moves = [("A", a) for a in A.labels] + [("B", b) for b in B.labels]

    def answers(mv):
        side, x = mv
        return [(x, b) for b in B.labels] if side == "A" else [(a, x) for a in A.labels]

    def ok(pairs):
        return relation_win_check(A, B, sorted(pairs), cfg.eps, **banach_opts)

    def ii(pairs, c):
        if c == 0:
            return True
        key = (pairs, c)
        if key in memo:
            return memo[key]
        if len(memo) > budget:
            raise StateSpaceTooLarge(f"more than {budget} memoized positions")
        res = all(any(ok(pairs | {p}) and ii(pairs | {p}, c - 1) for p in answers(mv))
                  for mv in moves)
        memo[key] = res
        return res

    start = frozenset(cfg.start_pairs)
    won = ok(start) and ii(start, cfg.clock)
    strat = {}
    if strategy and ok(start):
        stack = [(start, cfg.clock)]
        while stack:
            pairs, c = stack.pop()
            if c == 0:
                continue
            pos = tuple(sorted(pairs))
            if won:
                for mv in moves:
                    p = next(p for p in answers(mv) if ok(pairs | {p}) and ii(pairs | {p}, c - 1))
                    strat[(pos, c, mv)] = p[1] if mv[0] == "A" else p[0]
                    stack.append((pairs | {p}, c - 1))
            else:
                mv = next(mv for mv in moves
                          if not any(ok(pairs | {p}) and ii(pairs | {p}, c - 1)
                                     for p in answers(mv)))
                strat[(pos, c)] = mv
                stack.extend((pairs | {p}, c - 1) for p in answers(mv) if ok(pairs | {p}))
    return GameResult("II" if won else "I", strat, len(memo), cfg.clock)


# -- function games -----------------------------------------------------------------

def default_menus(A, B, s):
    """One s just above the base (below the next ratio breakpoint) and a saturating k."""
    s = Fraction(s)
    above = [b for b in distance_breakpoints(A, B) if b > s]
    s_next = (s + above[0]) / 2 if above else s + Fraction(1, 16)
    k = good_saturation_bound(A, B, factor=s_next)
    return Menus((((s_next, k),),))


def function_saturation_clock(A, B, menus, start=()):
    """Clock past which function-game results no longer change (menu-relative).

    With a dominant option in the repeating menu (least s with greatest k),
    I's only useful moves put a point into the fully constrained tier, so
    |A| + |B| moves after the per-round prefix suffice. Without one, every new
    option can open a fresh tier.
    """
    last = menus.rounds[-1]
    prefix = len(menus.rounds) - 1
    dominant = any(all(s <= s2 and k >= k2 for s2, k2 in last) for s, k in last)
    tiers = 1 if dominant else len(menus.options()) + 1
    return prefix + tiers * (A.size + B.size) + (0 if dominant else tiers)


class FunctionGame:
    """Search over function-game positions.

    A position is summarized by which pairs were played under which set of
    round parameters: the pair played on round j is bound by the parameters
    of rounds <= j, and a constraint between two played pairs uses those of
    the earlier one. The summary maps each parameter set P to the bitmask of
    pairs carrying it, plus the current parameter set and menu round.
    """

    def __init__(self, A, B, menus, budget=DEFAULT_BUDGET):
        self.A, self.B, self.menus, self.budget = A, B, menus, budget
        self.nA, self.nB = A.size, B.size
        self.params = []
        self._param_id = {}
        for opt in menus.options():
            self._pid(opt)
        self._set_compat = {}
        self.won, self.lost = {}, {}
        self.moves = [[i * self.nB + j for j in range(self.nB)] for i in range(self.nA)]
        self.moves += [[i * self.nB + j for i in range(self.nA)] for j in range(self.nB)]

    def _pid(self, opt):
        if opt not in self._param_id:
            self._param_id[opt] = len(self.params)
            self.params.append(opt)
        return self._param_id[opt]

    def compat_for(self, pset):
        c = self._set_compat.get(pset)
        if c is None:
            full = (1 << (self.nA * self.nB)) - 1
            c = [full] * (self.nA * self.nB)
            for t in pset:
                s, k = self.params[t]
                ct = function_compat(self.A, self.B, s, k)
                c = [x & y for x, y in zip(c, ct)]
            self._set_compat[pset] = c
        return c

    def start_state(self, start):
        tiers = {}
        cur = frozenset()
        for a, b, s, k in start:
            cur = cur | {self._pid((Fraction(s), int(k)))}
            p = self.A.carrier.index(a) * self.nB + self.B.carrier.index(b)
            tiers[cur] = tiers.get(cur, 0) | 1 << p
        return (tuple(sorted(tiers.items(), key=lambda kv: sorted(kv[0]))), cur, 0)

    def state_passes(self, state):
        tiers = state[0]
        for pset, mask in tiers:
            comp = self.compat_for(pset)
            m = mask
            while m:
                low = m & -m
                p = low.bit_length() - 1
                # pairs of the same tier and of later (superset) tiers
                for pset2, mask2 in tiers:
                    if pset <= pset2 and mask2 & ~comp[p]:
                        return False
                m ^= low
        return True

    def extend(self, state, t, p):
        """Child state after I picks option t and the pair p is played, or None."""
        tiers, cur, rnd = state
        new = cur | {t}
        for pset, mask in tiers:
            if mask & ~self.compat_for(pset)[p]:
                return None
        d = dict(tiers)
        d[new] = d.get(new, 0) | 1 << p
        nxt = min(rnd + 1, len(self.menus.rounds) - 1)
        return (tuple(sorted(d.items(), key=lambda kv: sorted(kv[0]))), new, nxt)

    def options_at(self, state):
        return [self._param_id[o] for o in self.menus.at(state[2])]

    def ii_wins(self, state, c):
        if c <= 0:
            return True
        if c <= self.won.get(state, 0):
            return True
        if c >= self.lost.get(state, 1 << 30):
            return False
        if len(self.won) + len(self.lost) > self.budget:
            raise StateSpaceTooLarge(f"more than {self.budget} memoized positions")
        result = True
        for t in self.options_at(state):
            for answers in self.moves:
                if not any(self._answer_ok(state, t, p, c) for p in answers):
                    result = False
                    break
            if not result:
                break
        (self.won if result else self.lost)[state] = c
        return result

    def _answer_ok(self, state, t, p, c):
        child = self.extend(state, t, p)
        return child is not None and self.ii_wins(child, c - 1)

    @property
    def explored(self):
        return len(self.won.keys() | self.lost.keys())

    def i_move(self, state, c):
        for t in self.options_at(state):
            for x, answers in enumerate(self.moves):
                if not any(self._answer_ok(state, t, p, c) for p in answers):
                    return t, x
        return None

    def ii_answer(self, state, c, t, x):
        for p in self.moves[x]:
            if self._answer_ok(state, t, p, c):
                return p
        return None


def _uniform_single(cfg):
    opts = cfg.menus.options()
    return len(opts) == 1 and not cfg.start


def solve_function_game(cfg, strategy=True, budget=DEFAULT_BUDGET, **banach_opts):
    """Exact winner relative to the declared menus."""
    A, B = cfg.A, cfg.B
    if A.vocabulary is Vocabulary.LB:
        return _solve_generic_function(cfg, strategy, budget, banach_opts)
    if _uniform_single(cfg) and not strategy:
        (s, k), = cfg.menus.options()
        core = pair_game(A.size, B.size, function_compat(A, B, s, k), budget)
        ok = core.ii_wins(0, cfg.clock)
        return GameResult("II" if ok else "I", {}, core.explored, cfg.clock)
    game = FunctionGame(A, B, cfg.menus, budget)
    st = game.start_state(cfg.start)
    ok = game.state_passes(st) and game.ii_wins(st, cfg.clock)
    res = GameResult("II" if ok else "I", {}, game.explored, cfg.clock)
    if strategy and game.state_passes(st):
        res.strategy = _extract_function_strategy(game, st, cfg.clock, ok)
    return res


def function_ii_wins(A, B, s, clock, menus, start=(), budget=DEFAULT_BUDGET):
    return solve_function_game(FunctionGameConfig(A, B, s, clock, menus, start),
                               strategy=False, budget=budget).winner == "II"


def _function_pos(game, state):
    tiers, cur, rnd = state
    out = []
    for pset, mask in tiers:
        ps = tuple(sorted((format_rational(game.params[t][0]), game.params[t][1]) for t in pset))
        out.append((_labels_of_mask(game.A, game.B, mask), ps))
    return tuple(out)


def _extract_function_strategy(game, state, clock, ii_wins):
    strat = {}
    stack = [(state, clock)]
    seen = set()
    core = game
    while stack:
        st, c = stack.pop()
        if (st, c) in seen or c == 0:
            continue
        seen.add((st, c))
        pos = _function_pos(game, st)
        if not ii_wins:
            t, x = game.i_move(st, c)
            s, k = game.params[t]
            strat[(pos, c)] = _move_label(game.A, game.B, core, x) + (format_rational(s), k)
            for p in game.moves[x]:
                child = game.extend(st, t, p)
                if child is not None:
                    stack.append((child, c - 1))
        else:
            for t in game.options_at(st):
                s, k = game.params[t]
                for x in range(len(game.moves)):
                    p = game.ii_answer(st, c, t, x)
                    key = (pos, c, _move_label(game.A, game.B, core, x) + (format_rational(s), k))
                    strat[key] = _answer_label(game.A, game.B, core, x, p)
                    stack.append((game.extend(st, t, p), c - 1))
    return strat


def _solve_generic_function(cfg, strategy, budget, banach_opts):
    """Literal search over ordered positions; used for normed structures."""
    A, B = cfg.A, cfg.B
    moves = [("A", a) for a in A.labels] + [("B", b) for b in B.labels]
    memo = {}

    def answers(mv):
        side, x = mv
        return [(x, b) for b in B.labels] if side == "A" else [(a, x) for a in A.labels]

    def ok(pos):
        return function_win_check(A, B, pos, **banach_opts)

    def ii(pos, c):
        if c == 0:
            return True
        key = (pos, c)
        if key in memo:
            return memo[key]
        if len(memo) > budget:
            raise StateSpaceTooLarge(f"more than {budget} memoized positions")
        rnd = len(pos) - len(cfg.start)
        res = True
        for s, k in cfg.menus.at(rnd):
            for mv in moves:
                if not any(ok(pos + ((a, b, s, k),)) and ii(pos + ((a, b, s, k),), c - 1)
                           for a, b in answers(mv)):
                    res = False
                    break
            if not res:
                break
        memo[key] = res
        return res

    start = tuple(cfg.start)
    won = ok(start) and ii(start, cfg.clock)
    return GameResult("II" if won else "I", {}, len(memo), cfg.clock)


# -- interactive play -----------------------------------------------------------------

@dataclass
class Transcript:
    rounds: List[dict] = field(default_factory=list)
    winner: Optional[str] = None
    violation: Optional[str] = None

    def lines(self):
        out = []
        for r in self.rounds:
            params = f" s={r['s']} k={r['k']}" if "s" in r else ""
            out.append(f"round {r['round']}: I plays {r['side']} {r['point']}{params}; "
                       f"II answers {r['answer']}; {r['check']}")
        if self.violation:
            out.append(f"violation: {self.violation}")
        out.append(f"winner: {self.winner}")
        return out

    def to_json(self):
        return {"rounds": self.rounds, "violation": self.violation, "winner": self.winner}


def describe_violation(v, eps=None):
    if v is None:
        return None
    if len(v) == 5:
        kind, p, q, da, db = v
        bound = f"{format_rational(da)} + 2*{format_rational(eps)}" if kind == "d" else \
            f"{format_rational(da)} - 2*{format_rational(eps)}"
        rel = ">" if kind == "d" else "<"
        return (f"{kind}-constraint: d_B({p[1]},{q[1]}) = {format_rational(db)} {rel} {bound} "
                f"where d_A({p[0]},{q[0]}) = {format_rational(da)}")
    if len(v) == 6:
        kind, r, p, q, da, db = v
        return (f"{kind}-constraint of round {r}: d_A({p[0]},{q[0]}) = {format_rational(da)}, "
                f"d_B({p[1]},{q[1]}) = {format_rational(db)}")
    return f"norm constraint: {v!r}"


def play_interactive(cfg, human_role, move_source):
    """Run one play; the engine follows the solver, the human supplies tokens.

    Human I tokens: ``A <point>`` or ``B <point>``, optionally followed by
    ``<s> <k>`` in function games; ``stop`` ends the play. Human II tokens:
    a point name. ``quit`` or running out of tokens aborts.
    """
    if human_role not in ("I", "II"):
        raise ParseError("role must be I or II")
    tokens = iter(move_source)
    relation = isinstance(cfg, RelationGameConfig)
    A, B = cfg.A, cfg.B
    transcript = Transcript()

    def next_token():
        try:
            tok = next(tokens)
        except StopIteration:
            raise Abort("move source ended before the play finished") from None
        tok = tok.strip()
        if tok == "quit":
            raise Abort("play aborted")
        return tok

    if relation:
        core = _relation_core(A, B, cfg.eps)
        state = _mask_of(A, B, cfg.start_pairs)
        passes0 = core.passes(state)
    else:
        if A.vocabulary is Vocabulary.LB:
            raise UnsupportedVocabulary("interactive play supports metric structures")
        core = FunctionGame(A, B, cfg.menus)
        state = core.start_state(cfg.start)
        passes0 = core.state_passes(state)
    if not passes0:
        transcript.winner = "I"
        transcript.violation = "start position violates the winning condition"
        return transcript

    played = list(cfg.start_pairs) if relation else [tuple(x) for x in cfg.start]
    for rnd in range(cfg.clock):
        c = cfg.clock - rnd
        t = None
        if relation:
            opts = None
        else:
            opts = core.options_at(state)
        if human_role == "I":
            tok = next_token()
            if tok == "stop":
                break
            parts = tok.split()
            if len(parts) not in (2, 4) or parts[0] not in ("A", "B"):
                raise IllegalMove(f"expected 'A <point>' or 'B <point>', got {tok!r}")
            side, point = parts[0], parts[1]
            S = A if side == "A" else B
            if point not in S.labels:
                raise IllegalMove(f"no point {point!r} in structure {side}", point=point)
            x = S.labels.index(point) + (0 if side == "A" else A.size)
            if not relation:
                if len(parts) == 4:
                    opt = (parse_rational(parts[2]), int(parts[3]))
                    if opt not in core._param_id or core._param_id[opt] not in opts:
                        raise IllegalMove(f"({parts[2]}, {parts[3]}) is not on this round's menu")
                    t = core._param_id[opt]
                else:
                    t = opts[0]
            p = core.ii_answer(state, c, x) if relation else core.ii_answer(state, c, t, x)
            if p is None:
                p = core.moves[x][0]
        else:
            if relation:
                x = core.i_move(state, c)
                if x is None:
                    x = 0
            else:
                mv = core.i_move(state, c)
                t, x = mv if mv is not None else (opts[0], 0)
            side, point = _move_label(A, B, core, x)
            tok = next_token()
            other = B if side == "A" else A
            if tok not in other.labels:
                raise IllegalMove(f"no point {tok!r} in structure {'B' if side == 'A' else 'A'}",
                                  point=tok)
            j = other.labels.index(tok)
            p = x * core.nB + j if side == "A" else j * core.nB + (x - core.nA)
        side, point = _move_label(A, B, core, x)
        answer = _answer_label(A, B, core, x, p)
        pair = (A.labels[p // core.nB], B.labels[p % core.nB])
        rec = {"round": rnd, "side": side, "point": point, "answer": answer}
        if relation:
            played.append(pair)
            viol = relation_violation(A, B, played, cfg.eps)
            desc = describe_violation(viol, cfg.eps)
            state = state | 1 << p
        else:
            s, k = core.params[t]
            rec["s"], rec["k"] = format_rational(s), k
            played.append(pair + (s, k))
            viol = function_violation(A, B, played)
            desc = describe_violation(viol)
            child = core.extend(state, t, p)
            state = child
        rec["check"] = "ok" if viol is None else "violated"
        transcript.rounds.append(rec)
        if viol is not None:
            transcript.violation = desc
            transcript.winner = "I"
            return transcript
    transcript.winner = "II"
    return transcript
