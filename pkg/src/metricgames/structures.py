"""Finite metric spaces, finite normed point configurations, and atomic truth.

All arithmetic is exact over ``fractions.Fraction``.
"""

import math
import re
from dataclasses import dataclass
from functools import cached_property
from enum import Enum
from fractions import Fraction
from typing import Dict, Optional, Tuple, Union

from .atoms import DGeq, DLeq, PNorm, QNorm
from .errors import (
    AsymmetricMatrix,
    NonPositiveDistance,
    NonzeroDiagonal,
    NormOverflow,
    ParseError,
    SemanticsMismatch,
    TriangleViolation,
    UnboundVariable,
    UnsupportedVocabulary,
    VocabularyMismatch,
)

_RATIONAL = re.compile(r"^\s*(-?\d+)\s*(?:/\s*(\d+)\s*)?$")


def parse_rational(value):
    """Parse "p/q", "p", an int or a Fraction. Floats are refused."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool) or isinstance(value, float):
        raise ParseError(f"rational expected as a string 'p/q', got {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        m = _RATIONAL.match(value)
        if m:
            den = int(m.group(2)) if m.group(2) is not None else 1
            if den == 0:
                raise ParseError(f"zero denominator in {value!r}")
            return Fraction(int(m.group(1)), den)
    raise ParseError(f"not a rational: {value!r}")


def format_rational(x):
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


class Vocabulary(str, Enum):
    LM_ISO = "lm_iso"
    LM_CORR = "lm_corr"
    LB = "lb"
    LBB = "lbb"

    @property
    def additive(self):
        return self in (Vocabulary.LM_CORR, Vocabulary.LBB)

    @property
    def metric(self):
        return self in (Vocabulary.LM_ISO, Vocabulary.LM_CORR)


@dataclass(frozen=True)
class Additive:
    eps: Fraction

    def __post_init__(self):
        object.__setattr__(self, "eps", Fraction(self.eps))
        if self.eps < 0:
            raise ParseError(f"additive precision {self.eps} is negative")

    def then(self, other):
        if not isinstance(other, Additive):
            raise SemanticsMismatch("cannot compose additive with multiplicative precision")
        return Additive(self.eps + other.eps)


@dataclass(frozen=True)
class Multiplicative:
    s: Fraction

    def __post_init__(self):
        object.__setattr__(self, "s", Fraction(self.s))
        if self.s < 1:
            raise ParseError(f"multiplicative precision {self.s} is below 1")

    def then(self, other):
        if not isinstance(other, Multiplicative):
            raise SemanticsMismatch("cannot compose multiplicative with additive precision")
        return Multiplicative(self.s * other.s)


Precision = Union[Additive, Multiplicative]


@dataclass(frozen=True)
class FiniteMetricSpace:
    labels: Tuple[str, ...]
    d: Tuple[Tuple[Fraction, ...], ...]

    @property
    def size(self):
        return len(self.labels)

    def index(self, label):
        try:
            return self.labels.index(label)
        except ValueError:
            raise UnboundVariable(f"no point named {label!r}", point=label) from None

    def dist(self, a, b):
        return self.d[self.index(a)][self.index(b)]

    def distances(self):
        """Sorted distinct positive distances."""
        return sorted({x for row in self.d for x in row if x > 0})

    @cached_property
    def scaled(self):
        """(den, integer matrix) with d[i][j] == matrix[i][j] / den."""
        return scale_to_integers(self.d)


def scale_to_integers(rows):
    rows = [[x if isinstance(x, (int, Fraction)) else Fraction(x) for x in row] for row in rows]
    den = math.lcm(*(x.denominator for row in rows for x in row)) if rows else 1
    return den, tuple(tuple(x.numerator * (den // x.denominator) for x in row) for row in rows)


NORMS = ("l1", "linf", "l2", "wl1", "wlinf")


@dataclass(frozen=True)
class NormedPointConfig:
    dim: int
    norm: str
    weights: Tuple[Fraction, ...]
    labels: Tuple[str, ...]
    vectors: Tuple[Tuple[Fraction, ...], ...]
    unit_ball: bool = False

    @property
    def size(self):
        return len(self.labels)

    def index(self, label):
        try:
            return self.labels.index(label)
        except ValueError:
            raise UnboundVariable(f"no point named {label!r}", point=label) from None

    def point(self, label):
        return self.vectors[self.index(label)]

    def norm_value(self, vec):
        """Exact norm for the polyhedral norms; L2 has no rational value in general."""
        if self.norm == "l1":
            return sum((abs(x) for x in vec), Fraction(0))
        if self.norm == "linf":
            return max((abs(x) for x in vec), default=Fraction(0))
        if self.norm == "wl1":
            return sum((w * abs(x) for w, x in zip(self.weights, vec)), Fraction(0))
        if self.norm == "wlinf":
            return max((w * abs(x) for w, x in zip(self.weights, vec)), default=Fraction(0))
        raise ValueError("l2 norm values are compared through squares")

    def norm_squared(self, vec):
        if self.norm == "l2":
            return sum((x * x for x in vec), Fraction(0))
        n = self.norm_value(vec)
        return n * n

    def norm_le(self, vec, r):
        if r < 0:
            return False
        return self.norm_squared(vec) <= r * r

    def norm_ge(self, vec, r):
        if r <= 0:
            return True
        return self.norm_squared(vec) >= r * r

    def norm_lt(self, vec, r):
        if r <= 0:
            return False
        return self.norm_squared(vec) < r * r


@dataclass(frozen=True)
class Structure:
    carrier: Union[FiniteMetricSpace, NormedPointConfig]
    vocabulary: Vocabulary

    def __post_init__(self):
        _check_carrier_vocabulary(self.carrier, self.vocabulary)

    @property
    def labels(self):
        return self.carrier.labels

    @property
    def size(self):
        return self.carrier.size

    def with_vocabulary(self, vocabulary):
        return Structure(self.carrier, Vocabulary(vocabulary))


def _check_carrier_vocabulary(carrier, vocabulary):
    vocabulary = Vocabulary(vocabulary)
    if vocabulary.metric and not isinstance(carrier, FiniteMetricSpace):
        raise VocabularyMismatch(f"{vocabulary.value} needs a metric space carrier")
    if not vocabulary.metric and not isinstance(carrier, NormedPointConfig):
        raise VocabularyMismatch(f"{vocabulary.value} needs a normed point configuration")
    if vocabulary is Vocabulary.LBB and not carrier.unit_ball:
        raise VocabularyMismatch("lbb needs a unit-ball configuration")


def check_metric(labels, d):
    """Raise the first violated metric invariant, naming witnesses by label."""
    n = len(labels)
    if len(set(labels)) != n:
        raise ParseError("point names must be distinct")
    if len(d) != n or any(len(row) != n for row in d):
        raise ParseError(f"distance matrix must be {n}x{n}")
    for i in range(n):
        if d[i][i] != 0:
            raise NonzeroDiagonal(f"d({labels[i]},{labels[i]}) = {format_rational(d[i][i])}",
                                  point=labels[i])
    for i in range(n):
        for j in range(i + 1, n):
            if d[i][j] != d[j][i]:
                raise AsymmetricMatrix(
                    f"d({labels[i]},{labels[j]}) = {format_rational(d[i][j])} but "
                    f"d({labels[j]},{labels[i]}) = {format_rational(d[j][i])}",
                    i=labels[i], j=labels[j])
            if d[i][j] <= 0:
                raise NonPositiveDistance(
                    f"d({labels[i]},{labels[j]}) = {format_rational(d[i][j])} is not positive",
                    i=labels[i], j=labels[j])
    _, m = scale_to_integers(d)
    for i in range(n):
        mi = m[i]
        for j in range(n):
            mij, mj = mi[j], m[j]
            for k in range(n):
                if mi[k] > mij + mj[k]:
                    raise TriangleViolation(
                        f"({labels[i]},{labels[j]},{labels[k]}): d({labels[i]},{labels[k]}) = "
                        f"{format_rational(d[i][k])} > {format_rational(d[i][j])} + "
                        f"{format_rational(d[j][k])}",
                        i=labels[i], j=labels[j], k=labels[k])


def metric_space(labels, rows, vocabulary=Vocabulary.LM_CORR):
    """Build and validate a metric structure from Python values."""
    labels = tuple(str(x) for x in labels)
    d = tuple(tuple(parse_rational(x) for x in row) for row in rows)
    check_metric(labels, d)
    return Structure(FiniteMetricSpace(labels, d), Vocabulary(vocabulary))


def normed_config(points, norm="linf", weights=None, unit_ball=False, vocabulary=None):
    """Build and validate a normed configuration from {name: coords}."""
    if norm not in NORMS:
        raise ParseError(f"unknown norm {norm!r}; expected one of {', '.join(NORMS)}")
    labels = tuple(str(k) for k in points)
    vectors = tuple(tuple(parse_rational(x) for x in points[k]) for k in points)
    if not vectors:
        raise ParseError("a normed configuration needs at least one point")
    dim = len(vectors[0])
    if dim < 1 or any(len(v) != dim for v in vectors):
        raise ParseError("all points must share one positive dimension")
    if norm in ("wl1", "wlinf"):
        if weights is None or len(weights) != dim:
            raise ParseError(f"{norm} needs {dim} weights")
        weights = tuple(parse_rational(w) for w in weights)
        if any(w <= 0 for w in weights):
            raise ParseError("weights must be positive")
    else:
        weights = tuple(Fraction(1) for _ in range(dim))
    cfg = NormedPointConfig(dim, norm, weights, labels, vectors, bool(unit_ball))
    if unit_ball:
        for name, vec in zip(labels, vectors):
            if not cfg.norm_le(vec, Fraction(1)):
                raise NormOverflow(f"point {name} has norm above 1", point=name)
    if vocabulary is None:
        vocabulary = Vocabulary.LBB if unit_ball else Vocabulary.LB
    return Structure(cfg, Vocabulary(vocabulary))


def validate_structure(raw, vocabulary=None):
    """Parse a JSON-shaped structure description into a validated Structure."""
    if not isinstance(raw, dict) or "kind" not in raw:
        raise ParseError("structure description must be an object with a 'kind'")
    vocabulary = vocabulary or raw.get("vocabulary")
    kind = raw["kind"]
    if kind == "metric_space":
        try:
            labels, rows = raw["points"], raw["d"]
        except KeyError as e:
            raise ParseError(f"metric_space needs field {e.args[0]!r}") from None
        return metric_space(labels, rows, vocabulary or Vocabulary.LM_CORR)
    if kind == "normed":
        try:
            points = raw["points"]
            norm = raw["norm"]
        except KeyError as e:
            raise ParseError(f"normed needs field {e.args[0]!r}") from None
        s = normed_config(points, norm, raw.get("weights"), raw.get("unit_ball", False),
                          vocabulary)
        if "dim" in raw and raw["dim"] != s.carrier.dim:
            raise ParseError(f"declared dim {raw['dim']} but points have dim {s.carrier.dim}")
        return s
    raise ParseError(f"unknown structure kind {kind!r}")


def structure_to_json(S):
    c = S.carrier
    if isinstance(c, FiniteMetricSpace):
        return {"kind": "metric_space", "points": list(c.labels),
                "d": [[format_rational(x) for x in row] for row in c.d],
                "vocabulary": S.vocabulary.value}
    out = {"kind": "normed", "dim": c.dim, "norm": c.norm,
           "points": {n: [format_rational(x) for x in v] for n, v in zip(c.labels, c.vectors)},
           "unit_ball": c.unit_ball, "vocabulary": S.vocabulary.value}
    if c.norm in ("wl1", "wlinf"):
        out["weights"] = [format_rational(w) for w in c.weights]
    return out


def _lookup(assignment, var):
    try:
        return assignment[var]
    except KeyError:
        raise UnboundVariable(f"variable {var!r} is not assigned", variable=var) from None


def atom_vocabulary_ok(vocabulary, phi):
    if isinstance(phi, (DLeq, DGeq)):
        return vocabulary.metric
    if isinstance(phi, (PNorm, QNorm)):
        if vocabulary is Vocabulary.LB:
            return phi.r is None
        if vocabulary is Vocabulary.LBB:
            return phi.r is not None
    return False


def term_vector(cfg, phi, assignment):
    vec = [Fraction(0)] * cfg.dim
    for c, var in zip(phi.coeffs, phi.vars):
        p = cfg.point(_lookup(assignment, var))
        for t in range(cfg.dim):
            vec[t] += c * p[t]
    return vec


def eval_atomic(S, phi, assignment):
    """Exact truth of an atomic formula under a variable -> point-label map."""
    if not atom_vocabulary_ok(S.vocabulary, phi):
        raise VocabularyMismatch(
            f"{type(phi).__name__} is not in vocabulary {S.vocabulary.value}")
    c = S.carrier
    if isinstance(phi, DLeq):
        return c.dist(_lookup(assignment, phi.u), _lookup(assignment, phi.v)) <= phi.r
    if isinstance(phi, DGeq):
        return c.dist(_lookup(assignment, phi.u), _lookup(assignment, phi.v)) >= phi.r
    vec = term_vector(c, phi, assignment)
    r = Fraction(1) if phi.r is None else phi.r
    if isinstance(phi, PNorm):
        return c.norm_le(vec, r)
    return c.norm_ge(vec, r)


def _require_metric_pair(A, B):
    if A.vocabulary != B.vocabulary:
        raise VocabularyMismatch(
            f"structures use different vocabularies ({A.vocabulary.value}, {B.vocabulary.value})")
    if not A.vocabulary.metric:
        raise UnsupportedVocabulary(f"{A.vocabulary.value} has no finite breakpoint grid")


def distance_breakpoints(A, B):
    """Thresholds at which some atomic comparison between A and B changes truth."""
    _require_metric_pair(A, B)
    da = {x for row in A.carrier.d for x in row}
    db = {x for row in B.carrier.d for x in row}
    if A.vocabulary.additive:
        return sorted({abs(x - y) / 2 for x in da for y in db})
    out = {Fraction(1)}
    for x in da:
        for y in db:
            if x > 0 and y > 0:
                out.add(x / y)
                out.add(y / x)
    return sorted(out)


def good_saturation_bound(A, B, factor=None):
    """Least k past which Good(k) adds nothing on these carriers.

    Without ``factor`` this is the threshold bound: every realized positive
    distance is at least 1/k. With ``factor`` s it is the bound at which each
    closed-form constraint ``dB <= s*max(1/k, dA)``, ``dA >= 1/k => dB >= dA/s``
    has reached its limiting truth value for all distance pairs.
    """
    if not (A.vocabulary.metric and B.vocabulary.metric):
        raise UnsupportedVocabulary("coefficient menus of normed vocabularies are unbounded")
    pos_a = A.carrier.distances()
    pos_b = B.carrier.distances()
    if factor is None:
        pos = pos_a + pos_b
        return max(1, math.ceil(1 / min(pos))) if pos else 1
    s = Fraction(factor)
    k = 1
    if pos_a:
        k = max(k, math.ceil(1 / pos_a[0]))
    if pos_b:
        # dA = 0 against dB > 0: dB <= s/k must have become false
        k = max(k, math.floor(s / pos_b[0]) + 1)
    return k
