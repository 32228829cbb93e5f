"""Brute-force distance oracles, gluing, and the game-based distance bracket."""

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import FrozenSet, Tuple

from .errors import (
    DistortionTooLarge,
    EmptySet,
    NotFullCorrespondence,
    ParseError,
    StateSpaceTooLarge,
)
from .games import (
    FunctionGameConfig,
    default_menus,
    function_compat,
    function_saturation_clock,
    pair_game,
    relation_compat,
    relation_saturation_clock,
    solve_function_game,
)
from .structures import (
    FiniteMetricSpace,
    Vocabulary,
    distance_breakpoints,
    metric_space,
)

BRUTE_FORCE_BUDGET = 5 * 5


class NoBijection:
    """Marker: the spaces have different sizes."""

    def __repr__(self):
        return "NoBijection"

    def __str__(self):
        return "NoBijection"


NO_BIJECTION = NoBijection()


@dataclass(frozen=True)
class Correspondence:
    pairs: FrozenSet[Tuple[str, str]]
    dom_full: bool
    ran_full: bool

    @classmethod
    def between(cls, A, B, pairs):
        pairs = frozenset(tuple(p) for p in pairs)
        if not pairs:
            raise EmptySet("a correspondence needs at least one pair")
        for a, b in pairs:
            _carrier(A).index(a)
            _carrier(B).index(b)
        return cls(pairs, {a for a, _ in pairs} == set(_carrier(A).labels),
                   {b for _, b in pairs} == set(_carrier(B).labels))

    @property
    def full(self):
        return self.dom_full and self.ran_full


def _carrier(S):
    return S if isinstance(S, FiniteMetricSpace) else S.carrier


def correspondence_distortion(A, B, R):
    """Largest pairwise discrepancy |d_A(a,a') - d_B(b,b')| over R."""
    if not isinstance(R, Correspondence):
        R = Correspondence.between(A, B, R)
    if not R.full:
        missing = "domain" if not R.dom_full else "range"
        raise NotFullCorrespondence(f"relation does not cover the {missing}")
    ca, cb = _carrier(A), _carrier(B)
    idx = [(ca.index(a), cb.index(b)) for a, b in sorted(R.pairs)]
    return max((abs(ca.d[i][i2] - cb.d[j][j2]) for (i, j) in idx for (i2, j2) in idx),
               default=Fraction(0))


def _partner_sets(nB):
    subsets = [tuple(j for j in range(nB) if m >> j & 1) for m in range(1, 1 << nB)]
    # small partner sets first: they tend to give small distortion early
    subsets.sort(key=len)
    return subsets


def _common_scale(ca, cb, *extra):
    """Both matrices (and extra scalars) over one integer denominator."""
    den_a, ma = ca.scaled
    den_b, mb = cb.scaled
    den = math.lcm(den_a, den_b, *(Fraction(x).denominator for x in extra))
    fa, fb = den // den_a, den // den_b
    ma = [[x * fa for x in row] for row in ma]
    mb = [[x * fb for x in row] for row in mb]
    return den, ma, mb, [int(Fraction(x) * den) for x in extra]


def _extend_cost(ma, mb, i, js, chosen, cur, cap):
    """Distortion after giving point i the partners js, or None once it exceeds cap."""
    worst = cur
    for j in js:
        mbj = mb[j]
        for j2 in js:
            if mbj[j2] > worst:
                worst = mbj[j2]
        mai = ma[i]
        for i2, js2 in enumerate(chosen):
            dai = mai[i2]
            for j2 in js2:
                x = dai - mbj[j2]
                if x < 0:
                    x = -x
                if x > worst:
                    worst = x
        if cap is not None and worst > cap:
            return None
    return worst


def _min_distortion(ca, cb):
    """Least distortion over full correspondences, by branch and bound.

    Every point of A picks a nonempty set of partners; B coverage is checked
    at the leaves. Partial distortion only grows, so branches reaching the best
    value so far are cut.
    """
    nA, nB = ca.size, cb.size
    den, ma, mb, _ = _common_scale(ca, cb)
    subsets = _partner_sets(nB)
    full_b = (1 << nB) - 1
    best = [None, None]

    def rec(i, chosen, covered, cur):
        if i == nA:
            if covered == full_b and (best[0] is None or cur < best[0]):
                best[0], best[1] = cur, list(chosen)
            return
        for js in subsets:
            cap = None if best[0] is None else best[0] - 1
            worst = _extend_cost(ma, mb, i, js, chosen, cur, cap)
            if worst is None:
                continue
            chosen.append(js)
            m = covered
            for j in js:
                m |= 1 << j
            rec(i + 1, chosen, m, worst)
            chosen.pop()

    rec(0, [], 0, 0)
    pairs = {(ca.labels[i], cb.labels[j]) for i, js in enumerate(best[1]) for j in js}
    return Fraction(best[0], den), pairs


def gh_bruteforce(A, B, budget=BRUTE_FORCE_BUDGET, witness=False):
    """Half the least distortion of a full correspondence."""
    ca, cb = _carrier(A), _carrier(B)
    if ca.size * cb.size > budget:
        raise StateSpaceTooLarge(
            f"{ca.size} x {cb.size} points exceed the brute-force budget of {budget} pairs")
    dist, pairs = _min_distortion(ca, cb)
    value = dist / 2
    return (value, pairs) if witness else value


def correspondences_within(A, B, bound):
    """All full correspondences of distortion at most bound."""
    ca, cb = _carrier(A), _carrier(B)
    nA, nB = ca.size, cb.size
    den, ma, mb, _ = _common_scale(ca, cb)
    cap = math.floor(Fraction(bound) * den)
    subsets = _partner_sets(nB)
    full_b = (1 << nB) - 1
    out = []

    def rec(i, chosen, covered, cur):
        if i == nA:
            if covered == full_b:
                out.append(frozenset((ca.labels[x], cb.labels[j])
                                     for x, js in enumerate(chosen) for j in js))
            return
        for js in subsets:
            worst = _extend_cost(ma, mb, i, js, chosen, cur, cap)
            if worst is None:
                continue
            chosen.append(js)
            m = covered
            for j in js:
                m |= 1 << j
            rec(i + 1, chosen, m, worst)
            chosen.pop()

    rec(0, [], 0, 0)
    return out


def minimal_correspondences(A, B):
    """The least distortion and every full correspondence attaining it."""
    best, _ = _min_distortion(_carrier(A), _carrier(B))
    return best, correspondences_within(A, B, best)


def lipschitz_bruteforce(A, B, witness=False):
    """Least bi-Lipschitz factor of a bijection, or NO_BIJECTION."""
    ca, cb = _carrier(A), _carrier(B)
    if ca.size != cb.size:
        return (NO_BIJECTION, None) if witness else NO_BIJECTION
    best, best_f = None, None
    n = ca.size
    for perm in itertools.permutations(range(n)):
        worst = Fraction(1)
        for i in range(n):
            for i2 in range(i + 1, n):
                da, db = ca.d[i][i2], cb.d[perm[i]][perm[i2]]
                worst = max(worst, db / da, da / db)
                if best is not None and worst >= best:
                    break
            if best is not None and worst >= best:
                break
        if best is None or worst < best:
            best, best_f = worst, perm
    f = {ca.labels[i]: cb.labels[best_f[i]] for i in range(n)}
    return (best, f) if witness else best


def hausdorff(M, S1, S2):
    c = _carrier(M)
    S1, S2 = list(S1), list(S2)
    if not S1 or not S2:
        raise EmptySet("Hausdorff distance needs two nonempty subsets")
    i1 = [c.index(x) for x in S1]
    i2 = [c.index(x) for x in S2]
    one = max(min(c.d[a][b] for b in i2) for a in i1)
    two = max(min(c.d[a][b] for a in i1) for b in i2)
    return max(one, two)


def glue(A, B, R, eps):
    """Metric gluing of A and B along R with offset eps, quotiented to a metric.

    Returns the glued space and the two embeddings as label maps.
    """
    eps = Fraction(eps)
    ca, cb = _carrier(A), _carrier(B)
    if not isinstance(R, Correspondence):
        R = Correspondence.between(A, B, R)
    if not R.full:
        raise NotFullCorrespondence("gluing needs a full correspondence")
    idx = sorted((ca.index(a), cb.index(b)) for a, b in R.pairs)
    den, ma, mb, (e,) = _common_scale(ca, cb, eps)
    for (i, j), (i2, j2) in itertools.product(idx, repeat=2):
        if abs(ma[i][i2] - mb[j][j2]) > 2 * e:
            raise DistortionTooLarge(
                f"|d_A({ca.labels[i]},{ca.labels[i2]}) - d_B({cb.labels[j]},{cb.labels[j2]})| "
                f"= {Fraction(abs(ma[i][i2] - mb[j][j2]), den)} exceeds 2*{eps}",
                witness=(ca.labels[i], ca.labels[i2], cb.labels[j], cb.labels[j2]))
    nA, nB = ca.size, cb.size
    n = nA + nB
    d = [[0] * n for _ in range(n)]
    for i in range(nA):
        d[i][:nA] = ma[i]
    for j in range(nB):
        d[nA + j][nA:] = mb[j]
    for i in range(nA):
        for j in range(nB):
            x = min(ma[i][i2] + mb[j][j2] for i2, j2 in idx) + e
            d[i][nA + j] = d[nA + j][i] = x
    labels = [("A", x) for x in ca.labels] + [("B", y) for y in cb.labels]
    # identify points at distance zero; keep the first of each class
    rep = list(range(n))
    for p in range(n):
        for q in range(p):
            if d[p][q] == 0 and rep[q] == q:
                rep[p] = q
                break
    keep = [p for p in range(n) if rep[p] == p]
    names = []
    for p in keep:
        side, x = labels[p]
        members = [labels[q] for q in range(n) if rep[q] == p]
        names.append("=".join(f"{s}.{y}" for s, y in members))
    glued = metric_space(names, [[Fraction(d[p][q], den) for q in keep] for p in keep])
    pos = {p: keep.index(rep[p]) for p in range(n)}
    emb_a = {x: names[pos[i]] for i, x in enumerate(ca.labels)}
    emb_b = {y: names[pos[nA + j]] for j, y in enumerate(cb.labels)}
    return glued, emb_a, emb_b


# -- game distance ------------------------------------------------------------------

def _relation_ii_wins_saturated(A, B, eps):
    core = pair_game(A.size, B.size, relation_compat(A, B, eps))
    return core.ii_wins(0, relation_saturation_clock(A, B))


def _function_ii_wins_saturated(A, B, s):
    menus = default_menus(A, B, s)
    clock = function_saturation_clock(A, B, menus)
    cfg = FunctionGameConfig(A, B, s, clock, menus)
    return solve_function_game(cfg, strategy=False).winner == "II"


def game_distance(A, B, semantics, resolution=Fraction(1, 16)):
    """Bracket [lo, hi] of the least precision at which II wins the saturated game.

    ``lo`` is a precision where II loses (or the lower end of the scale when
    II already wins there) and ``hi`` one where II wins; hi is None when II
    never wins (multiplicative games between spaces of different sizes).
    """
    resolution = Fraction(resolution)
    if resolution <= 0:
        raise ParseError("resolution must be positive")
    additive = semantics in ("additive", Vocabulary.LM_CORR)
    if not additive and semantics not in ("multiplicative", Vocabulary.LM_ISO):
        raise ParseError(f"unknown semantics {semantics!r}")
    voc = Vocabulary.LM_CORR if additive else Vocabulary.LM_ISO
    A, B = A.with_vocabulary(voc), B.with_vocabulary(voc)
    wins = _relation_ii_wins_saturated if additive else _function_ii_wins_saturated
    floor = Fraction(0) if additive else Fraction(1)
    if wins(A, B, floor):
        return (floor, floor)
    if not additive and A.size != B.size:
        return (floor, None)
    bps = distance_breakpoints(A, B)
    # II wins once the precision reaches the largest breakpoint
    hi = max(bps + [floor])
    if not wins(A, B, hi):
        raise StateSpaceTooLarge("no winning precision found on the breakpoint scale")
    lo = floor
    while hi - lo > resolution:
        mid = (lo + hi) / 2
        if wins(A, B, mid):
            hi = mid
        else:
            lo = mid
    inside = [b for b in bps if lo < b <= hi]
    if len(inside) == 1 and wins(A, B, inside[0]):
        return (inside[0], inside[0])
    return (lo, hi)
