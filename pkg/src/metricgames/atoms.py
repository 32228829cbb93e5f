"""Atomic formulae of the metric and normed vocabularies."""

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple

from .errors import ParseError


@dataclass(frozen=True)
class DLeq:
    """d(u, v) <= r."""

    r: Fraction
    u: str
    v: str

    def __post_init__(self):
        if self.r < 0:
            raise ParseError(f"distance threshold {self.r} is negative", r=self.r)

    @property
    def variables(self):
        return (self.u, self.v)


@dataclass(frozen=True)
class DGeq:
    """d(u, v) >= r."""

    r: Fraction
    u: str
    v: str

    def __post_init__(self):
        if self.r < 0:
            raise ParseError(f"distance threshold {self.r} is negative", r=self.r)

    @property
    def variables(self):
        return (self.u, self.v)


def _check_term(coeffs, variables, r):
    if len(coeffs) != len(variables):
        raise ParseError("term has different numbers of coefficients and variables")
    if r is not None:
        if not 0 <= r <= 1:
            raise ParseError(f"bounded-norm threshold {r} outside [0, 1]", r=r)
        if sum(abs(c) for c in coeffs) != 1:
            raise ParseError("bounded-norm term coefficients must have absolute sum 1")


@dataclass(frozen=True)
class PNorm:
    """||sum c_i v_i|| <= 1, or <= r when a threshold is present."""

    coeffs: Tuple[Fraction, ...]
    vars: Tuple[str, ...]
    r: Optional[Fraction] = None

    def __post_init__(self):
        _check_term(self.coeffs, self.vars, self.r)

    @property
    def variables(self):
        return self.vars


@dataclass(frozen=True)
class QNorm:
    """||sum c_i v_i|| >= 1, or >= r when a threshold is present."""

    coeffs: Tuple[Fraction, ...]
    vars: Tuple[str, ...]
    r: Optional[Fraction] = None

    def __post_init__(self):
        _check_term(self.coeffs, self.vars, self.r)

    @property
    def variables(self):
        return self.vars


AtomicFormula = (DLeq, DGeq, PNorm, QNorm)


def is_distance_atom(phi):
    return isinstance(phi, (DLeq, DGeq))


def is_norm_atom(phi):
    return isinstance(phi, (PNorm, QNorm))
