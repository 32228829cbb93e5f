"""Normed-configuration checks: coefficient menus and exact vertex enumeration.

Vertex enumeration is exact over Fractions and meant for dimension <= 4.
"""

import itertools
from fractions import Fraction

from .errors import SemanticsMismatch, UnsupportedVocabulary

POLYHEDRAL = ("l1", "linf", "wl1", "wlinf")


def solve_exact(rows, rhs):
    """Solve a square system by Gaussian elimination; None if singular."""
    n = len(rows)
    m = [list(r) + [b] for r, b in zip(rows, rhs)]
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            return None
        m[col], m[piv] = m[piv], m[col]
        inv = 1 / m[col][col]
        m[col] = [x * inv for x in m[col]]
        for r in range(n):
            if r != col and m[r][col] != 0:
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return tuple(m[r][n] for r in range(n))


def vertices(ineqs, dim):
    """Vertices of the bounded polytope {x : a.x <= b for (a, b) in ineqs}."""
    out = set()
    for combo in itertools.combinations(ineqs, dim):
        x = solve_exact([a for a, _ in combo], [b for _, b in combo])
        if x is None:
            continue
        if all(sum(ai * xi for ai, xi in zip(a, x)) <= b for a, b in ineqs):
            out.add(x)
    return sorted(out)


def dual_functionals(cfg):
    """Linear functionals whose max over the list is the (polyhedral) norm."""
    if cfg.norm not in POLYHEDRAL:
        raise UnsupportedVocabulary(f"exact vertex mode needs a polyhedral norm, not {cfg.norm}")
    n = cfg.dim
    w = cfg.weights
    if cfg.norm in ("linf", "wlinf"):
        out = []
        for j in range(n):
            for sign in (1, -1):
                out.append(tuple(sign * w[j] if t == j else Fraction(0) for t in range(n)))
        return out
    return [tuple(sg * w[t] for t, sg in enumerate(signs))
            for signs in itertools.product((1, -1), repeat=n)]


def combine(cfg, coeffs, labels):
    vec = [Fraction(0)] * cfg.dim
    for c, lab in zip(coeffs, labels):
        p = cfg.point(lab)
        for t in range(cfg.dim):
            vec[t] += c * p[t]
    return vec


def _image_rows(cfg, labels):
    # row t of the linear map c -> sum c_i * point_i, coordinate t
    return [[cfg.point(lab)[t] for lab in labels] for t in range(cfg.dim)]


def _compose(func, rows):
    # functional on coordinates pulled back to coefficient space
    m = len(rows[0]) if rows else 0
    return tuple(sum(func[t] * rows[t][i] for t in range(len(func))) for i in range(m))


def box(m, k):
    k = Fraction(k)
    out = []
    for i in range(m):
        e = tuple(Fraction(1) if t == i else Fraction(0) for t in range(m))
        out.append((e, k))
        out.append((tuple(-x for x in e), k))
    return out


def coefficient_vertex_set(A, labels, k):
    """Vertices of the k-box and of the pieces of {c : ||sum c a|| <= 1} and >= 1.

    Over these finitely many coefficient vectors the P-side preservation check
    is exact (a convex function peaks at a vertex of the polytope).
    """
    cfg = A.carrier
    m = len(labels)
    rows = _image_rows(cfg, labels)
    funcs = [_compose(f, rows) for f in dual_functionals(cfg)]
    cube = box(m, k)
    out = set(vertices(cube, m))
    out.update(vertices(cube + [(f, Fraction(1)) for f in funcs], m))
    for f in funcs:
        out.update(vertices(cube + [(tuple(-x for x in f), Fraction(-1))], m))
    return sorted(out)


def sqrt_le_sum(x2, y2, e):
    """Exact test sqrt(x2) <= sqrt(y2) + e for nonnegative rationals."""
    if e < 0:
        raise ValueError("e must be nonnegative")
    lhs = x2 - y2 - e * e
    if lhs <= 0:
        return True
    return lhs * lhs <= 4 * e * e * y2


def _rational_lattice(k, denom):
    vals = set()
    for q in range(1, denom + 1):
        for p in range(-k * q, k * q + 1):
            vals.add(Fraction(p, q))
    return sorted(vals)


def norm_term_pairs(pairs, max_arity, first=0):
    """Index tuples (with repetition) over played pairs from ``first`` on."""
    idx = range(first, len(pairs))
    for m in range(1, max_arity + 1):
        yield from itertools.product(idx, repeat=m)


def lb_function_violation(A, B, played, params, mode="lattice", denom=1, max_arity=None):
    """First violated (round, P/Q, tuple, coefficients) of the LB win condition, or None.

    ``played`` lists (a, b) labels; ``params[i]`` = (s_i, k_i) for round i.
    """
    ca, cb = A.carrier, B.carrier
    for i, (s, k) in enumerate(params):
        s = Fraction(s)
        arity = k if max_arity is None else min(k, max_arity)
        for tup in norm_term_pairs(played, arity, first=i):
            la = [played[j][0] for j in tup]
            lb = [played[j][1] for j in tup]
            for c in _coefficients(A, la, k, mode, denom):
                ta, tb = combine(ca, c, la), combine(cb, c, lb)
                na, nb = ca.norm_squared(ta), cb.norm_squared(tb)
                if na <= 1 and not nb <= s * s:
                    return (i, "P", tup, c)
                if na >= 1 and not s * s * nb >= 1:
                    return (i, "Q", tup, c)
            if mode == "vertex":
                hit = _q_side_exact(A, B, la, lb, k, s)
                if hit is not None:
                    return (i, "Q", tup, hit)
    return None


def _coefficients(A, labels, k, mode, denom):
    m = len(labels)
    if mode == "vertex":
        return coefficient_vertex_set(A, labels, k)
    if mode != "lattice":
        raise SemanticsMismatch(f"unknown coefficient mode {mode!r}")
    grid = _rational_lattice(k, denom)
    return itertools.product(grid, repeat=m)


def _q_side_exact(A, B, la, lb, k, s):
    """Min of ||sum c b|| over {c in box : ||sum c a|| >= 1} vs 1/s, via a lifted LP."""
    ca, cb = A.carrier, B.carrier
    m = len(la)
    fa = [_compose(f, _image_rows(ca, la)) for f in dual_functionals(ca)]
    fb = [_compose(f, _image_rows(cb, lb)) for f in dual_functionals(cb)]
    zero = Fraction(0)
    cube = [(a + (zero,), b) for a, b in box(m, k)]
    # any t above k * sum ||b_i|| is never binding at the minimum
    tbound = k * sum(sum(w * abs(x) for w, x in zip(cb.weights, cb.point(lab)))
                     for lab in lb) + 1
    lifted = cube + [(tuple(f) + (Fraction(-1),), zero) for f in fb]
    lifted.append((tuple(zero for _ in range(m)) + (Fraction(1),), tbound))
    for f in fa:
        piece = lifted + [(tuple(-x for x in f) + (zero,), Fraction(-1))]
        for v in vertices(piece, m + 1):
            if s * v[-1] < 1:
                return v[:-1]
    return None


def lbb_relation_violation(A, B, pairs, eps, mode="lattice", denom=2, max_arity=2):
    """First (tuple, lambda) with | ||sum l a|| - ||sum l b|| | > eps, or None."""
    ca, cb = A.carrier, B.carrier
    eps = Fraction(eps)
    for tup in norm_term_pairs(pairs, max_arity):
        la = [pairs[j][0] for j in tup]
        lb = [pairs[j][1] for j in tup]
        for lam in _unit_sum_coefficients(len(tup), mode, denom, A, B, la, lb):
            na = ca.norm_squared(combine(ca, lam, la))
            nb = cb.norm_squared(combine(cb, lam, lb))
            if not sqrt_le_sum(nb, na, eps) or not sqrt_le_sum(na, nb, eps):
                return (tup, lam)
    return None


def _unit_sum_coefficients(m, mode, denom, A, B, la, lb):
    if mode == "lattice":
        grid = _rational_lattice(1, denom)
        for lam in itertools.product(grid, repeat=m):
            if sum(abs(x) for x in lam) == 1:
                yield lam
        return
    # exact: vertices of every linearity cell of both norms on each orthant face
    fa = [_compose(f, _image_rows(A.carrier, la)) for f in dual_functionals(A.carrier)]
    fb = [_compose(f, _image_rows(B.carrier, lb)) for f in dual_functionals(B.carrier)]
    seen = set()
    for signs in itertools.product((1, -1), repeat=m):
        face = []
        for i, sg in enumerate(signs):
            e = tuple(Fraction(-sg) if t == i else Fraction(0) for t in range(m))
            face.append((e, Fraction(0)))
        simplex = tuple(Fraction(sg) for sg in signs)
        face.append((simplex, Fraction(1)))
        face.append((tuple(-x for x in simplex), Fraction(-1)))
        for ga in fa:
            for gb in fb:
                cell = list(face)
                cell += [(tuple(o - g for o, g in zip(other, ga)), Fraction(0)) for other in fa]
                cell += [(tuple(o - g for o, g in zip(other, gb)), Fraction(0)) for other in fb]
                for v in vertices(cell, m):
                    if v not in seen:
                        seen.add(v)
                        yield v
