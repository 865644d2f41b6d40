"""Exact and certified values.

Most norms here are square roots of rationals.  :class:`Surd` keeps the
radicand and compares by squaring, so equality checks stay exact.  Norms
with irrational exponents are carried as mpmath intervals.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt
from typing import Any, Optional, Union

from mpmath import iv, mp, mpf, nstr

iv.dps = 40
mp.dps = 40


def _rational_sqrt(q: Fraction) -> Optional[Fraction]:
    if q < 0:
        return None
    n, d = q.numerator, q.denominator
    rn, rd = isqrt(n), isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def fmt_fraction(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class Surd:
    """sqrt(sq) for a non-negative rational sq."""

    sq: Fraction

    def __post_init__(self):
        object.__setattr__(self, "sq", Fraction(self.sq))
        if self.sq < 0:
            raise ValueError("negative radicand")

    @classmethod
    def of(cls, r) -> "Surd":
        if isinstance(r, Surd):
            return r
        r = Fraction(r)
        if r < 0:
            raise ValueError("Surd.of expects a non-negative rational")
        return cls(r * r)

    @property
    def rational(self) -> Optional[Fraction]:
        return _rational_sqrt(self.sq)

    def __float__(self):
        return float(mp.sqrt(mpf(self.sq.numerator) / self.sq.denominator))

    def to_mpf(self):
        return mp.sqrt(mpf(self.sq.numerator) / self.sq.denominator)

    def to_iv(self):
        return iv.sqrt(iv.mpf(self.sq.numerator) / self.sq.denominator)

    def _key(self, other):
        if isinstance(other, Surd):
            return other.sq
        if isinstance(other, (int, Fraction)):
            other = Fraction(other)
            if other < 0:
                return None
            return other * other
        return NotImplemented

    def __eq__(self, other):
        k = self._key(other)
        if k is NotImplemented:
            return NotImplemented
        return k is not None and self.sq == k

    def __hash__(self):
        return hash(("surd", self.sq))

    def __lt__(self, other):
        k = self._key(other)
        if k is NotImplemented:
            return NotImplemented
        return k is not None and self.sq < k

    def __le__(self, other):
        return self == other or self < other

    def __gt__(self, other):
        k = self._key(other)
        if k is NotImplemented:
            return NotImplemented
        return k is None or self.sq > k

    def __ge__(self, other):
        return self == other or self > other

    def __mul__(self, other):
        if isinstance(other, Surd):
            return Surd(self.sq * other.sq)
        other = Fraction(other)
        return Surd(self.sq * other * other) if other >= 0 else NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Surd):
            return Surd(self.sq / other.sq)
        other = Fraction(other)
        return Surd(self.sq / (other * other))

    def __str__(self):
        r = self.rational
        if r is not None:
            return fmt_fraction(r)
        return f"sqrt({fmt_fraction(self.sq)})"

    def __repr__(self):
        return f"Surd({self})"


Value = Union[Surd, Any]  # Surd for exact values, mpf for certified interval endpoints


def value_str(v) -> str:
    if isinstance(v, Surd):
        return str(v)
    if isinstance(v, Fraction):
        return fmt_fraction(v)
    return nstr(mpf(v), 30)


def value_float(v) -> float:
    if isinstance(v, (Surd, Fraction, int)):
        return float(v)
    return float(mpf(v))


def value_mpf(v):
    if isinstance(v, Surd):
        return v.to_mpf()
    if isinstance(v, Fraction):
        return mpf(v.numerator) / v.denominator
    return mpf(v)


@dataclass
class NormResult:
    lower: Value
    upper: Value
    exact: bool
    witness: dict = field(default_factory=dict)

    @property
    def value(self):
        """The exact value, or the midpoint of the certified interval."""
        if self.exact:
            return self.lower
        return (value_mpf(self.lower) + value_mpf(self.upper)) / 2

    @property
    def width(self):
        if self.exact:
            return 0.0
        return float(value_mpf(self.upper) - value_mpf(self.lower))

    def contains(self, v, tol: float = 0.0) -> bool:
        x = value_mpf(v)
        return value_mpf(self.lower) - tol <= x <= value_mpf(self.upper) + tol

    def to_json(self):
        return {
            "lower": value_str(self.lower),
            "upper": value_str(self.upper),
            "exact": self.exact,
            "witness": self.witness,
        }


def parse_value(text: str):
    """Inverse of value_str for exact values: "3/2" or "sqrt(1/3)"."""
    text = text.strip()
    if text.startswith("sqrt(") and text.endswith(")"):
        return Surd(Fraction(text[5:-1]))
    return Surd.of(Fraction(text))
