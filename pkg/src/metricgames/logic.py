"""Approximation calculus over negation-free formulae.

Formula nodes are immutable and may be shared, so big formulae are DAGs.
Everything that walks a formula memoizes on node identity.
"""

import math
from fractions import Fraction

import numpy as np

from .atoms import DGeq, DLeq, PNorm, QNorm, is_distance_atom
from .errors import (
    ParseError,
    SemanticsMismatch,
    UnboundVariable,
    UnsupportedVocabulary,
    VocabularyMismatch,
)
from .structures import (
    Additive,
    FiniteMetricSpace,
    Multiplicative,
    Vocabulary,
    atom_vocabulary_ok,
    eval_atomic,
    format_rational,
    parse_rational,
)

ONE = Fraction(1)
ZERO = Fraction(0)


class Formula:
    __slots__ = ("_hash", "_free", "_key")

    def __eq__(self, other):
        if self is other:
            return True
        return type(self) is type(other) and self._fields() == other._fields()

    def __hash__(self):
        try:
            return self._hash
        except AttributeError:
            h = hash((type(self).__name__, self._fields()))
            object.__setattr__(self, "_hash", h)
            return h

    def __setattr__(self, name, value):
        raise AttributeError("formulae are immutable")

    def __repr__(self):
        return f"{type(self).__name__}{self._fields()!r}"

    @property
    def free_vars(self):
        """Free variables as a frozenset."""
        try:
            return self._free
        except AttributeError:
            f = self._compute_free()
            object.__setattr__(self, "_free", f)
            return f

    @property
    def sort_key(self):
        try:
            return self._key
        except AttributeError:
            k = self._compute_key()
            object.__setattr__(self, "_key", k)
            return k


class Atom(Formula):
    __slots__ = ("atom",)

    def __init__(self, atom):
        object.__setattr__(self, "atom", atom)

    def _fields(self):
        return (self.atom,)

    def _compute_free(self):
        return frozenset(self.atom.variables)

    def _compute_key(self):
        a = self.atom
        if is_distance_atom(a):
            return (0, type(a).__name__, a.u, a.v, a.r)
        r = -1 if a.r is None else a.r
        return (0, type(a).__name__, a.vars, a.coeffs, r)


class _Junction(Formula):
    __slots__ = ("parts",)

    def __init__(self, parts=()):
        object.__setattr__(self, "parts", tuple(parts))

    def _fields(self):
        return self.parts

    def _compute_free(self):
        out = set()
        for p in self.parts:
            out |= p.free_vars
        return frozenset(out)

    def _compute_key(self):
        return (self._rank, tuple(p.sort_key for p in self.parts))


class And(_Junction):
    __slots__ = ()
    _rank = 1


class Or(_Junction):
    __slots__ = ()
    _rank = 2


class _Quantifier(Formula):
    __slots__ = ("var", "body")

    def __init__(self, var, body):
        object.__setattr__(self, "var", var)
        object.__setattr__(self, "body", body)

    def _fields(self):
        return (self.var, self.body)

    def _compute_free(self):
        return self.body.free_vars - {self.var}

    def _compute_key(self):
        return (self._rank, self.var, self.body.sort_key)


class Exists(_Quantifier):
    __slots__ = ()
    _rank = 3


class Forall(_Quantifier):
    __slots__ = ()
    _rank = 4


TRUE = And(())
FALSE = Or(())


def conj(parts):
    """Conjunction with canonically ordered, deduplicated parts."""
    return And(_canonical(parts))


def disj(parts):
    return Or(_canonical(parts))


def _canonical(parts):
    seen = {}
    for p in parts:
        seen.setdefault(p, p)
    return sorted(seen.values(), key=lambda p: p.sort_key)


def atoms_of(F):
    """Atom occurrences of F in left-to-right order (expands shared nodes)."""
    out = []

    def walk(G):
        if isinstance(G, Atom):
            out.append(G.atom)
        elif isinstance(G, _Junction):
            for p in G.parts:
                walk(p)
        else:
            walk(G.body)

    walk(F)
    return out


def thresholds_of(F):
    seen, out = set(), set()

    def walk(G):
        if id(G) in seen:
            return
        seen.add(id(G))
        if isinstance(G, Atom):
            if G.atom.r is not None:
                out.add(G.atom.r)
        elif isinstance(G, _Junction):
            for p in G.parts:
                walk(p)
        else:
            walk(G.body)

    walk(F)
    return out


# -- Appr and neg -------------------------------------------------------------

def appr(phi, p):
    """Approximate an atomic formula by precision p."""
    if isinstance(p, Additive):
        e = p.eps
        if isinstance(phi, DLeq):
            return DLeq(phi.r + 2 * e, phi.u, phi.v)
        if isinstance(phi, DGeq):
            return DGeq(max(phi.r - 2 * e, ZERO), phi.u, phi.v)
        if phi.r is None:
            raise SemanticsMismatch("P/Q atoms take multiplicative precision")
        if isinstance(phi, PNorm):
            return PNorm(phi.coeffs, phi.vars, min(phi.r + e, ONE))
        return QNorm(phi.coeffs, phi.vars, max(phi.r - e, ZERO))
    if isinstance(p, Multiplicative):
        s = p.s
        if isinstance(phi, DLeq):
            return DLeq(phi.r * s, phi.u, phi.v)
        if isinstance(phi, DGeq):
            return DGeq(phi.r / s, phi.u, phi.v)
        if phi.r is not None:
            raise SemanticsMismatch("bounded P_r/Q_r atoms take additive precision")
        if isinstance(phi, PNorm):
            return PNorm(tuple(c / s for c in phi.coeffs), phi.vars)
        return QNorm(tuple(c * s for c in phi.coeffs), phi.vars)
    raise SemanticsMismatch(f"not a precision: {p!r}")


def check_semantics(vocabulary, p):
    vocabulary = Vocabulary(vocabulary)
    if vocabulary.additive != isinstance(p, Additive):
        raise SemanticsMismatch(
            f"{vocabulary.value} uses {'additive' if vocabulary.additive else 'multiplicative'}"
            " precision")


def _map_atoms(F, fn):
    memo = {}

    def go(G):
        key = id(G)
        if key in memo:
            return memo[key]
        if isinstance(G, Atom):
            out = fn(G.atom)
        elif isinstance(G, And):
            out = And(go(p) for p in G.parts)
        elif isinstance(G, Or):
            out = Or(go(p) for p in G.parts)
        elif isinstance(G, Exists):
            out = Exists(G.var, go(G.body))
        else:
            out = Forall(G.var, go(G.body))
        memo[key] = out
        return out

    return go(F)


def appr_formula(F, p):
    """Push appr to the atoms; connective shape is preserved."""
    return _map_atoms(F, lambda a: Atom(appr(a, p)))


def neg_atom(phi):
    if isinstance(phi, DLeq):
        return DGeq(phi.r, phi.u, phi.v)
    if isinstance(phi, DGeq):
        return DLeq(phi.r, phi.u, phi.v)
    if isinstance(phi, PNorm):
        return QNorm(phi.coeffs, phi.vars, phi.r)
    return PNorm(phi.coeffs, phi.vars, phi.r)


def weak_neg(F):
    """De Morgan dual with atomic swaps d<->D and P<->Q."""
    memo = {}

    def go(G):
        key = id(G)
        if key in memo:
            return memo[key]
        if isinstance(G, Atom):
            out = Atom(neg_atom(G.atom))
        elif isinstance(G, And):
            out = Or(go(p) for p in G.parts)
        elif isinstance(G, Or):
            out = And(go(p) for p in G.parts)
        elif isinstance(G, Exists):
            out = Forall(G.var, go(G.body))
        else:
            out = Exists(G.var, go(G.body))
        memo[key] = out
        return out

    return go(F)


def is_good(phi, k, vocabulary=None):
    """Membership in Good(k) for the isomorphism-semantics vocabularies."""
    if k < 1:
        raise ValueError("k must be at least 1")
    if vocabulary is not None and Vocabulary(vocabulary).additive:
        raise UnsupportedVocabulary(f"Good(k) is undefined for {Vocabulary(vocabulary).value}")
    if is_distance_atom(phi):
        return phi.r >= Fraction(1, k)
    if phi.r is not None:
        raise UnsupportedVocabulary("Good(k) is undefined for bounded P_r/Q_r atoms")
    return len(phi.vars) <= k and all(abs(c) <= k for c in phi.coeffs)


# -- evaluation ---------------------------------------------------------------

def carrier_points(S):
    return S.carrier.labels


def eval_formula(S, F, assignment=None):
    """Tarskian truth over the finite carrier, memoized on (node, assignment)."""
    assignment = dict(assignment or {})
    for var in F.free_vars:
        if var not in assignment:
            raise UnboundVariable(f"variable {var!r} is not assigned", variable=var)
    points = carrier_points(S)
    memo = {}
    checked = set()

    def go(G, env):
        key = (id(G), tuple(sorted((v, env[v]) for v in G.free_vars)))
        hit = memo.get(key)
        if hit is not None:
            return hit
        if isinstance(G, Atom):
            if id(G.atom) not in checked:
                if not atom_vocabulary_ok(S.vocabulary, G.atom):
                    raise VocabularyMismatch(
                        f"{type(G.atom).__name__} is not in vocabulary {S.vocabulary.value}")
                checked.add(id(G.atom))
            out = eval_atomic(S, G.atom, env)
        elif isinstance(G, And):
            out = all(go(p, env) for p in G.parts)
        elif isinstance(G, Or):
            out = any(go(p, env) for p in G.parts)
        else:
            inner = dict(env)
            test = any if isinstance(G, Exists) else all

            def bodies():
                for x in points:
                    inner[G.var] = x
                    yield go(G.body, inner)

            out = test(bodies())
        memo[key] = out
        return out

    return go(F, assignment)


def satisfaction_table(F, spaces, order=None):
    """Satisfaction sets of F on a batch of equal-size metric spaces.

    Returns ``(variables, table)`` where ``table[i, x_0, ..., x_{m-1}]`` says
    whether ``spaces[i]`` satisfies F with ``variables[j]`` assigned point
    index ``x_j``. Each DAG node is evaluated once for the whole batch.
    """
    return satisfaction_tables([F], spaces, order)[0]


class _ScaledDistances:
    """Distances as integers over one common denominator, for exact vector compares."""

    def __init__(self, carriers):
        den = 1
        for c in carriers:
            for row in c.d:
                for x in row:
                    den = math.lcm(den, Fraction(x).denominator)
        nums = [[[int(Fraction(x) * den) for x in row] for row in c.d] for c in carriers]
        top = max((abs(x) for m in nums for row in m for x in row), default=0)
        self.den = den
        self.exact_int = top < (1 << 30) and den < (1 << 30)
        if self.exact_int:
            self.arr = np.array(nums, dtype=np.int64)
        else:
            self.arr = np.array([[[Fraction(x) for x in row] for row in c.d] for c in carriers],
                                dtype=object)

    def compare(self, r, leq):
        r = Fraction(r)
        if self.exact_int and abs(r.numerator) < (1 << 30) and r.denominator < (1 << 30):
            # d <= r  iff  num * r.den <= r.num * den
            lhs = self.arr * r.denominator
            rhs = r.numerator * self.den
            return lhs <= rhs if leq else lhs >= rhs
        arr = self.arr if not self.exact_int else self.arr.astype(object) / self.den
        t = arr <= r if leq else arr >= r
        return np.asarray(t, dtype=bool)


def satisfaction_tables(roots, spaces, order=None):
    """satisfaction_table for several formulae sharing one memo."""
    carriers = [S.carrier if not isinstance(S, FiniteMetricSpace) else S for S in spaces]
    n = carriers[0].size
    if any(c.size != n for c in carriers) or not all(
            isinstance(c, FiniteMetricSpace) for c in carriers):
        raise VocabularyMismatch("satisfaction_table needs equal-size metric spaces")
    dist = _ScaledDistances(carriers)
    batch = len(carriers)
    order = order or _var_order
    atom_cache = {}
    memo = {}

    def align(vs, arr, target):
        # insert singleton axes so arr's variable axes line up with target
        if len(vs) == len(target):
            return arr
        shape = [batch]
        for v in target:
            shape.append(n if v in vs else 1)
        return arr.reshape(shape)

    def atom_table(a):
        key = (type(a), a.r, a.u == a.v)
        t = atom_cache.get(key)
        if t is None:
            t = dist.compare(a.r, isinstance(a, DLeq))
            if a.u == a.v:
                t = np.ascontiguousarray(np.diagonal(t, axis1=1, axis2=2))
            atom_cache[key] = t
        return t

    def go(G):
        hit = memo.get(id(G))
        if hit is not None:
            return hit
        if isinstance(G, Atom):
            a = G.atom
            if not is_distance_atom(a):
                raise VocabularyMismatch("satisfaction_table evaluates distance atoms only")
            t = atom_table(a)
            if a.u == a.v:
                out = ((a.u,), t)
            elif order(a.u) < order(a.v):
                out = ((a.u, a.v), t)
            else:
                out = ((a.v, a.u), np.swapaxes(t, 1, 2))
        elif isinstance(G, _Junction):
            target = tuple(sorted(G.free_vars, key=order))
            is_and = isinstance(G, And)
            full = (batch,) + (n,) * len(target)
            acc = None
            for p in G.parts:
                vs, arr = go(p)
                arr = align(vs, arr, target)
                if acc is None:
                    acc = np.broadcast_to(arr, full).copy()
                elif is_and:
                    acc &= arr
                else:
                    acc |= arr
            if acc is None:
                acc = np.full(full, is_and, dtype=bool)
            out = (target, acc)
        else:
            vs, arr = go(G.body)
            if G.var in vs:
                axis = 1 + vs.index(G.var)
                arr = arr.any(axis=axis) if isinstance(G, Exists) else arr.all(axis=axis)
                vs = vs[:axis - 1] + vs[axis:]
            out = (vs, arr)
        memo[id(G)] = out
        return out

    return [go(F) for F in roots]


def _var_order(v):
    # v0 < v1 < ... < v10; other names after, alphabetically
    if v[:1] == "v" and v[1:].isdigit():
        return (0, int(v[1:]), "")
    return (1, 0, v)


# -- strong negation ----------------------------------------------------------

def _negation_grid(F, structures):
    """Positive precisions at which neg(Appr(F, p)) decides not-F on every structure."""
    ds = {x for S in structures for row in S.carrier.d for x in row}
    rs = thresholds_of(F) | ds
    if structures[0].vocabulary.additive:
        marks = sorted({abs(d - r) / 2 for d in ds for r in rs})
        marks.append(marks[-1] + 1)  # past every gap; keeps the grid nonempty
        return [Additive((x + y) / 2) for x, y in zip(marks, marks[1:])]
    marks = {ONE}
    marks |= {d / r for d in ds for r in rs if d > 0 and r > 0}
    marks |= {r / d for d in ds for r in rs if d > 0 and r > 0}
    marks = sorted(m for m in marks if m >= 1)
    marks.append(2 * marks[-1])
    return [Multiplicative((x + y) / 2) for x, y in zip(marks, marks[1:])]


def _normalize_boundary_atoms(F, structures):
    """Replace atoms whose weak negation misbehaves at a truncation boundary.

    D_0 is valid, and under multiplicative precision d_0 never moves; both
    get an equivalent form on the given carriers.
    """
    pos = [x for S in structures for x in S.carrier.distances()]
    gap = min(pos) / 2 if pos else ONE
    multiplicative = not structures[0].vocabulary.additive

    def fix(a):
        if isinstance(a, DGeq) and a.r == 0:
            return TRUE
        if multiplicative and isinstance(a, DLeq) and a.r == 0:
            return Atom(DLeq(gap, a.u, a.v))
        return Atom(a)

    return _map_atoms(F, fix)


def strong_negation(F, A, B=None, *more):
    """Negation-free G with G true exactly where F is false, on each given structure.

    Every disjunct is sound on any structure; completeness needs the grid to
    reach below the gaps realized by the given ones.
    """
    structures = [S for S in (A, B) + more if S is not None]
    if any(S.vocabulary != A.vocabulary for S in structures):
        raise VocabularyMismatch("structures use different vocabularies")
    if not A.vocabulary.metric:
        raise UnsupportedVocabulary(
            f"{A.vocabulary.value} has no finite grid for the negation disjunction")
    G = _normalize_boundary_atoms(F, structures)
    return Or(weak_neg(appr_formula(G, p)) for p in _negation_grid(G, structures))


# -- JSON ---------------------------------------------------------------------

def atom_to_json(a):
    if isinstance(a, (DLeq, DGeq)):
        return {"op": "atom", "atom": "dleq" if isinstance(a, DLeq) else "dgeq",
                "r": format_rational(a.r), "vars": [a.u, a.v]}
    out = {"op": "atom", "atom": "p" if isinstance(a, PNorm) else "q",
           "vars": list(a.vars), "coeffs": [format_rational(c) for c in a.coeffs]}
    if a.r is not None:
        out["r"] = format_rational(a.r)
    return out


def formula_to_json(F, shared=False):
    """Serialize; with ``shared`` repeated nodes become {"op":"ref","id":n}."""
    if not shared:
        return _expand(F, {})
    counts = {}

    def count(G):
        counts[id(G)] = counts.get(id(G), 0) + 1
        if counts[id(G)] > 1:
            return
        if isinstance(G, _Junction):
            for p in G.parts:
                count(p)
        elif isinstance(G, _Quantifier):
            count(G.body)

    count(F)
    ids = {}
    defs = []

    def emit(G):
        if id(G) in ids:
            return {"op": "ref", "id": ids[id(G)]}
        node = _node_json(G, emit)
        if counts[id(G)] > 1 and not isinstance(G, Atom):
            ids[id(G)] = len(defs)
            defs.append(node)
            return {"op": "ref", "id": ids[id(G)]}
        return node

    root = emit(F)
    return {"op": "shared", "nodes": defs, "root": root}


def _node_json(G, rec):
    if isinstance(G, Atom):
        return atom_to_json(G.atom)
    if isinstance(G, _Junction):
        return {"op": "and" if isinstance(G, And) else "or", "args": [rec(p) for p in G.parts]}
    return {"op": "exists" if isinstance(G, Exists) else "forall", "var": G.var,
            "body": rec(G.body)}


def _expand(F, memo):
    return _node_json(F, lambda G: _expand(G, memo))


def atom_from_json(obj):
    kind = obj.get("atom")
    vars_ = obj.get("vars")
    if not isinstance(vars_, list) or not all(isinstance(v, str) for v in vars_):
        raise ParseError("atom needs a list of variable names in 'vars'")
    if kind in ("dleq", "dgeq"):
        if len(vars_) != 2:
            raise ParseError("distance atoms take exactly two variables")
        r = parse_rational(obj.get("r"))
        return (DLeq if kind == "dleq" else DGeq)(r, vars_[0], vars_[1])
    if kind in ("p", "q"):
        coeffs = tuple(parse_rational(c) for c in obj.get("coeffs", []))
        r = parse_rational(obj["r"]) if "r" in obj else None
        return (PNorm if kind == "p" else QNorm)(coeffs, tuple(vars_), r)
    raise ParseError(f"unknown atom kind {kind!r}")


def formula_from_json(obj):
    if isinstance(obj, dict) and obj.get("op") == "shared":
        nodes = obj.get("nodes", [])
        built = {}

        def resolve(o):
            if isinstance(o, dict) and o.get("op") == "ref":
                i = o.get("id")
                if i not in built:
                    if not isinstance(i, int) or not 0 <= i < len(nodes):
                        raise ParseError(f"dangling node reference {i!r}")
                    built[i] = _from_json(nodes[i], resolve)
                return built[i]
            return _from_json(o, resolve)

        return resolve(obj.get("root"))
    return _from_json(obj, lambda o: _from_json(o, None))


def _from_json(obj, rec):
    if rec is None:
        rec = lambda o: _from_json(o, None)  # noqa: E731
    if not isinstance(obj, dict):
        raise ParseError("formula node must be an object")
    op = obj.get("op")
    if op == "atom":
        return Atom(atom_from_json(obj))
    if op in ("and", "or"):
        args = obj.get("args", [])
        if not isinstance(args, list):
            raise ParseError("'args' must be a list")
        return (And if op == "and" else Or)(rec(a) for a in args)
    if op in ("exists", "forall"):
        if not isinstance(obj.get("var"), str):
            raise ParseError("quantifier needs a variable name in 'var'")
        return (Exists if op == "exists" else Forall)(obj["var"], rec(obj.get("body")))
    raise ParseError(f"unknown formula op {op!r}")


def formula_size(F):
    """Number of distinct DAG nodes."""
    seen = set()
    stack = [F]
    while stack:
        G = stack.pop()
        if id(G) in seen:
            continue
        seen.add(id(G))
        if isinstance(G, _Junction):
            stack.extend(G.parts)
        elif isinstance(G, _Quantifier):
            stack.append(G.body)
    return len(seen)


def ceil_mul(k, s):
    return math.ceil(k * Fraction(s))
