"""Finite subsets of N, finite windows of infinite sets, and ordinals below w^w.

A finite set is represented as a plain strictly increasing ``tuple`` of
positive ints.  Tuples compare lexicographically, hash cheaply and are
immutable, which is everything the combinatorics needs.  Use
:func:`finset` at trust boundaries to validate.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import total_ordering
from typing import Iterable, Sequence, Tuple

from .errors import EmptyBase, IndexBeyondHorizon, OutOfRange

FinSet = Tuple[int, ...]

EMPTY: FinSet = ()


def finset(elems: Iterable[int]) -> FinSet:
    s = tuple(int(e) for e in elems)
    for a, b in zip(s, s[1:]):
        if a >= b:
            raise ValueError(f"not strictly increasing: {s}")
    if s and s[0] < 1:
        raise ValueError(f"elements must be positive: {s}")
    return s


def parse_finset(text: str) -> FinSet:
    text = text.strip().strip("{}")
    if not text:
        return EMPTY
    return finset(int(t) for t in text.split(","))


def format_finset(s: Sequence[int]) -> str:
    return ",".join(str(e) for e in s)


def is_initial_segment(s: FinSet, t: FinSet) -> bool:
    """s ⊑ t."""
    return len(s) <= len(t) and t[: len(s)] == s


def initial_segment(s: FinSet, k: int) -> FinSet:
    if k < 0 or k > len(s):
        raise OutOfRange(f"k={k} outside 0..{len(s)}")
    return s[:k]


def set_quotient(s1: FinSet, s2: FinSet) -> FinSet:
    """s2 restricted to {1, ..., max s1}."""
    if not s1:
        raise EmptyBase("quotient by the empty set")
    top = s1[-1]
    return tuple(e for e in s2 if e <= top)


def successive(s: FinSet, t: FinSet) -> bool:
    """s < t: every element of s is below every element of t."""
    return not s or not t or s[-1] < t[0]


@dataclass(frozen=True)
class Window:
    """The first ``horizon`` elements of an infinite set L ⊆ N.

    ``L(n)`` for n past the horizon raises instead of guessing.
    """

    elems: FinSet

    def __post_init__(self):
        object.__setattr__(self, "elems", finset(self.elems))

    @property
    def horizon(self) -> int:
        return len(self.elems)

    @classmethod
    def identity(cls, horizon: int) -> "Window":
        return cls(tuple(range(1, horizon + 1)))

    @classmethod
    def evens(cls, horizon: int) -> "Window":
        return cls(tuple(range(2, 2 * horizon + 1, 2)))

    @classmethod
    def odds(cls, horizon: int) -> "Window":
        return cls(tuple(range(1, 2 * horizon, 2)))

    @classmethod
    def arithmetic(cls, start: int, step: int, horizon: int) -> "Window":
        return cls(tuple(start + step * i for i in range(horizon)))

    def __call__(self, n: int) -> int:
        if n < 1:
            raise OutOfRange(f"window positions start at 1, got {n}")
        if n > self.horizon:
            raise IndexBeyondHorizon(f"L({n}) requested but horizon is {self.horizon}")
        return self.elems[n - 1]

    def __contains__(self, value: int) -> bool:
        return value in self._positions

    @property
    def _positions(self):
        cache = self.__dict__.get("_pos_cache")
        if cache is None:
            cache = {v: i + 1 for i, v in enumerate(self.elems)}
            object.__setattr__(self, "_pos_cache", cache)
        return cache

    def position(self, value: int) -> int:
        """L^{-1}(value); KeyError-free: raises OutOfRange when value ∉ L-prefix."""
        try:
            return self._positions[value]
        except KeyError:
            raise OutOfRange(f"{value} is not among the known elements of the window") from None

    def positions(self, s: FinSet) -> FinSet:
        return tuple(self.position(v) for v in s)

    def apply(self, s: FinSet) -> FinSet:
        return apply_set(self, s)

    def covers(self, n: int) -> bool:
        """True when every element of L that is ≤ n is known."""
        return bool(self.elems) and self.elems[-1] >= n

    def upto(self, n: int) -> FinSet:
        if not self.covers(n):
            raise IndexBeyondHorizon(
                f"window ends at {self.elems[-1] if self.elems else None}; elements up to {n} unknown"
            )
        return tuple(v for v in self.elems if v <= n)

    def prefix(self, n: int) -> "Window":
        if n > self.horizon:
            raise IndexBeyondHorizon(f"prefix of length {n} beyond horizon {self.horizon}")
        return Window(self.elems[:n])

    def even_positions(self) -> "Window":
        """L(2N) = {L(2), L(4), ...}."""
        return Window(self.elems[1::2])

    def odd_positions(self) -> "Window":
        """L(2N-1) = {L(1), L(3), ...}."""
        return Window(self.elems[0::2])

    def compose(self, inner: "Window") -> "Window":
        """L(N) for N = inner, i.e. the window of L(inner(1)), L(inner(2)), ..."""
        return Window(tuple(self(n) for n in inner.elems if n <= self.horizon))

    def to_json(self):
        return list(self.elems)


def apply_set(L: Window, s: FinSet) -> FinSet:
    if s and s[-1] > L.horizon:
        raise IndexBeyondHorizon(f"max(s)={s[-1]} exceeds horizon {L.horizon}")
    return tuple(L.elems[n - 1] for n in s)


_WINDOW_SPEC = re.compile(r"^(identity|evens|odds)[:](\d+)$")


def parse_window(text) -> Window:
    """Accepts a list of ints, ``"2,4,6"``, or ``identity:N`` / ``evens:N`` / ``odds:N``."""
    if isinstance(text, Window):
        return text
    if isinstance(text, (list, tuple)):
        return Window(tuple(text))
    text = text.strip()
    m = _WINDOW_SPEC.match(text)
    if m:
        kind, h = m.group(1), int(m.group(2))
        return getattr(Window, kind)(h)
    return Window(parse_finset(text))


@total_ordering
@dataclass(frozen=True)
class OrdinalCNF:
    """An ordinal below w^w: sum of w^e * c over strictly decreasing exponents."""

    terms: Tuple[Tuple[int, int], ...] = ()

    def __post_init__(self):
        terms = tuple((int(e), int(c)) for e, c in self.terms)
        for e, c in terms:
            if e < 0 or c <= 0:
                raise ValueError(f"bad CNF term w^{e}*{c}")
        for (e1, _), (e2, _) in zip(terms, terms[1:]):
            if e1 <= e2:
                raise ValueError(f"exponents must strictly decrease: {terms}")
        object.__setattr__(self, "terms", terms)

    @classmethod
    def of(cls, n: int) -> "OrdinalCNF":
        if n < 0:
            raise ValueError("negative ordinal")
        return cls(((0, n),)) if n else cls()

    @classmethod
    def omega_power(cls, e: int, c: int = 1) -> "OrdinalCNF":
        return cls(((e, c),))

    @property
    def is_finite(self) -> bool:
        return all(e == 0 for e, _ in self.terms)

    @property
    def is_successor(self) -> bool:
        return bool(self.terms) and self.terms[-1][0] == 0

    @property
    def is_limit(self) -> bool:
        return bool(self.terms) and self.terms[-1][0] > 0

    def __int__(self):
        if not self.is_finite:
            raise ValueError(f"{self} is infinite")
        return self.terms[0][1] if self.terms else 0

    def __add__(self, other):
        if isinstance(other, int):
            other = OrdinalCNF.of(other)
        if not isinstance(other, OrdinalCNF):
            return NotImplemented
        return ord_add(self, other)

    def __radd__(self, other):
        if isinstance(other, int):
            return ord_add(OrdinalCNF.of(other), self)
        return NotImplemented

    def __eq__(self, other):
        if isinstance(other, int):
            return other >= 0 and self == OrdinalCNF.of(other)
        if isinstance(other, OrdinalCNF):
            return self.terms == other.terms
        return NotImplemented

    def __hash__(self):
        return hash(self.terms)

    def __lt__(self, other):
        if isinstance(other, int):
            other = OrdinalCNF.of(other)
        if not isinstance(other, OrdinalCNF):
            return NotImplemented
        for (e1, c1), (e2, c2) in zip(self.terms, other.terms):
            if e1 != e2:
                return e1 < e2
            if c1 != c2:
                return c1 < c2
        return len(self.terms) < len(other.terms)

    def predecessor(self) -> "OrdinalCNF":
        if not self.is_successor:
            raise ValueError(f"{self} has no predecessor")
        *head, (_, c) = self.terms
        return OrdinalCNF(tuple(head) + (((0, c - 1),) if c > 1 else ()))

    def fundamental(self, n: int) -> "OrdinalCNF":
        """n-th element of the canonical sequence converging to a limit ordinal.

        For xi = beta + w^e (e >= 1) the sequence is beta + w^(e-1) * n.
        """
        if not self.is_limit:
            raise ValueError(f"{self} is not a limit ordinal")
        *head, (e, c) = self.terms
        head = list(head)
        if c > 1:
            head.append((e, c - 1))
        if n > 0:
            head.append((e - 1, n))
        return OrdinalCNF(tuple(head))

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.terms:
            if e == 0:
                parts.append(str(c))
                continue
            base = "w" if e == 1 else f"w^{e}"
            parts.append(base if c == 1 else f"{base}*{c}")
        return "+".join(parts)

    def __repr__(self):
        return f"OrdinalCNF({self})"


def ord_add(a: OrdinalCNF, b: OrdinalCNF) -> OrdinalCNF:
    if not b.terms:
        return a
    lead = b.terms[0][0]
    kept = [(e, c) for e, c in a.terms if e > lead]
    same = [c for e, c in a.terms if e == lead]
    first = (lead, b.terms[0][1] + (same[0] if same else 0))
    return OrdinalCNF(tuple(kept) + (first,) + b.terms[1:])


_TERM = re.compile(r"^(?:(?:w|ω)(?:\^(\d+))?(?:\*(\d+))?|(\d+))$")


def parse_ordinal(text) -> OrdinalCNF:
    """Parse ``w^2*3+w+4`` (``ω`` accepted for ``w``); plain naturals for finite ordinals."""
    if isinstance(text, OrdinalCNF):
        return text
    if isinstance(text, int):
        return OrdinalCNF.of(text)
    text = str(text).replace(" ", "")
    if not text:
        raise ValueError("empty ordinal")
    acc = OrdinalCNF()
    for part in text.split("+"):
        m = _TERM.match(part)
        if not m:
            raise ValueError(f"cannot parse ordinal term {part!r}")
        if m.group(3) is not None:
            term = OrdinalCNF.of(int(m.group(3)))
        else:
            e = int(m.group(1)) if m.group(1) else 1
            c = int(m.group(2)) if m.group(2) else 1
            term = OrdinalCNF.omega_power(e, c)
        acc = ord_add(acc, term)
    return acc
