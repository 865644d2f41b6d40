"""Space descriptors and sparse vectors over FinSet coordinates."""

from __future__ import annotations

import ast
import operator
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Dict, Iterator, Optional, Tuple

from ..errors import BadIndex, BadParameters
from ..families import Family, family_from_json, in_schreier
from ..setcore import FinSet, OrdinalCNF, finset

_S1 = OrdinalCNF.of(1)


def in_schreier_hat(t: FinSet) -> bool:
    """t ∈ Ŝ = {s: |s| ≤ min s} ∪ {∅}."""
    return in_schreier(_S1, t)


def phi_key(s: FinSet):
    """Basis order: by max (∅ first), then lexicographically."""
    return (s[-1] if s else 0, s)


class SpaceDesc:
    kind = "abstract"

    def check_index(self, s: FinSet) -> None:
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError

    def coordinates(self, top: int) -> Iterator[FinSet]:
        """Legal coordinates with max ≤ top, in basis (phi) order."""
        raise NotImplementedError

    def __eq__(self, other):
        return isinstance(other, SpaceDesc) and self.to_json() == other.to_json()

    def __hash__(self):
        return hash(repr(self.to_json()))

    def __repr__(self):
        return f"Space({self.to_json()})"


def _family_coords(F: Family, top: int):
    from ..families import members

    return iter(sorted((s for s in members(F, top) if s), key=phi_key))


class XiPlegmaL1(SpaceDesc):
    """sup Σ|x(s_i)| over plegma tuples (s_i) in F with l ≤ s_1(1)."""

    kind = "xi_plegma_l1"

    def __init__(self, family: Family):
        self.family = family

    def check_index(self, s):
        if not s or not self.family.contains(s):
            raise BadIndex(f"{list(s)} is not a member of the family")

    def coordinates(self, top):
        return _family_coords(self.family, top)

    def to_json(self):
        return {"kind": self.kind, "family": self.family.to_json()}


class XiPlegmaL2L1(XiPlegmaL1):
    """(Σ_i (Σ_j |x(t^i_j)|)²)^{1/2} over disjoint plegma tuples in F."""

    kind = "xi_plegma_l2l1"


class FrakX(SpaceDesc):
    """Coordinates [N]^{k+1}; ℓ²-sums of ℓ¹-norms over disjoint allowable sets."""

    kind = "frak_x"

    def __init__(self, k: int):
        if k < 1:
            raise BadParameters("frak_x needs k ≥ 1")
        self.k = k

    def check_index(self, s):
        if len(s) != self.k + 1:
            raise BadIndex(f"{list(s)} does not have {self.k + 1} elements")

    def coordinates(self, top):
        return iter(sorted(combinations(range(1, top + 1), self.k + 1), key=phi_key))

    def to_json(self):
        return {"kind": self.kind, "k": self.k}


class QP(SpaceDesc):
    """max(‖x‖_(1), ‖x‖_{q,p}) on [N]^k with base norm ℓ¹ or Tsirelson on each C_l."""

    kind = "qp"

    def __init__(self, k: int, q, p, base: str = "l1"):
        self.k = int(k)
        self.q = Fraction(q)
        self.p = Fraction(p)
        self.base = base
        if self.k < 1:
            raise BadParameters("qp needs k ≥ 1")
        if not (1 < self.q < self.p):
            raise BadParameters("qp needs 1 < q < p")
        if base not in ("l1", "tsirelson"):
            raise BadParameters("qp base must be 'l1' or 'tsirelson'")

    def check_index(self, s):
        if len(s) != self.k:
            raise BadIndex(f"{list(s)} does not have {self.k} elements")

    def coordinates(self, top):
        return iter(sorted(combinations(range(1, top + 1), self.k), key=phi_key))

    def to_json(self):
        return {
            "kind": self.kind,
            "k": self.k,
            "q": _frac_str(self.q),
            "p": _frac_str(self.p),
            "base": self.base,
        }


def c_l_position(s: FinSet) -> int:
    """1-based position of s in C_l = {t: |t| = |s|, min t = min s}, ordered by (max, lex)."""
    k, l = len(s), s[0]
    if k == 1:
        return 1
    top = s[-1]
    # members with smaller max: {l} ∪ (k-1)-subsets of (l, top)
    before = comb(top - 1 - l, k - 1)
    # lex rank of the middle part among (k-2)-subsets of (l, top)
    mid = s[1:-1]
    lo = l + 1
    rank = 0
    r = len(mid)
    for i, v in enumerate(mid):
        for w in range(lo, v):
            rank += comb(top - 1 - w, r - i - 1)
        lo = v + 1
    return before + rank + 1


class SchreierHash(SpaceDesc):
    """Coordinates Ŝ; ℓ²-sums over incomparable ℋ-tuples."""

    kind = "schreier_hash"

    def check_index(self, s):
        if not in_schreier_hat(s):
            raise BadIndex(f"{list(s)} is not in the Schreier closure")

    def coordinates(self, top):
        from ..families import Schreier, closure

        return iter(sorted(closure(Schreier(_S1), top), key=phi_key))

    def to_json(self):
        return {"kind": self.kind}


class Tsirelson(SpaceDesc):
    kind = "tsirelson"

    def check_index(self, s):
        if len(s) != 1:
            raise BadIndex(f"tsirelson coordinates are singletons, got {list(s)}")

    def coordinates(self, top):
        return ((n,) for n in range(1, top + 1))

    def to_json(self):
        return {"kind": self.kind}


# ---------------------------------------------------------------- closed-form rules for mixed_w

_OPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Pow: operator.pow,
    ast.FloorDiv: operator.floordiv,
}


def _eval_rule(node, j: int) -> int:
    if isinstance(node, ast.Expression):
        return _eval_rule(node.body, j)
    if isinstance(node, ast.Constant) and isinstance(node.value, int):
        return node.value
    if isinstance(node, ast.Name) and node.id == "j":
        return j
    if isinstance(node, ast.BinOp) and type(node.op) in _OPS:
        return _OPS[type(node.op)](_eval_rule(node.left, j), _eval_rule(node.right, j))
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
        return -_eval_rule(node.operand, j)
    raise BadParameters("rules may use integers, j, + - * // and ^ only")


@dataclass(frozen=True)
class Rule:
    """An integer sequence j ↦ expr(j), e.g. ``4^(j+1)``."""

    text: str
    tree: object = field(compare=False, repr=False, default=None)

    def __post_init__(self):
        try:
            tree = ast.parse(self.text.replace("^", "**"), mode="eval")
        except SyntaxError as exc:
            raise BadParameters(f"cannot parse rule {self.text!r}") from exc
        object.__setattr__(self, "tree", tree)
        self(1)

    def __call__(self, j: int) -> int:
        v = _eval_rule(self.tree, j)
        if not isinstance(v, int):
            raise BadParameters(f"rule {self.text!r} is not integer valued")
        return v


class MixedW(SpaceDesc):
    """Norming set with weighted type I functionals and ℓ²-combinations of distinct weights.

    ``m`` must be geometric (m_{j+1}/m_j constant) so the tail Σ_{j≥J} 1/m_j²
    has a closed form.
    """

    kind = "mixed_w"
    CHECK_UPTO = 40

    def __init__(self, m: str = "4^(j+1)", n: str = "2^((j+1)^2)"):
        self.m = Rule(m)
        self.n = Rule(n)
        self._validate()

    def _validate(self):
        ms = [self.m(j) for j in range(1, self.CHECK_UPTO + 2)]
        ns = [self.n(j) for j in range(1, self.CHECK_UPTO + 2)]
        if ms[0] < 1 or ns[0] < 1:
            raise BadParameters("m_j and n_j must be positive")
        if any(a >= b for a, b in zip(ms, ms[1:])) or any(a >= b for a, b in zip(ns, ns[1:])):
            raise BadParameters("m_j and n_j must be strictly increasing")
        ratio = Fraction(ms[1], ms[0])
        if any(Fraction(b, a) != ratio for a, b in zip(ms, ms[1:])):
            raise BadParameters("m rule must be geometric for exact tails")
        self.ratio = ratio
        report = self.constraints()
        bad = [k for k, v in report.items() if not v["ok"]]
        if bad:
            raise BadParameters(f"mixed_w parameters violate: {', '.join(bad)}")

    def sum_inv_m(self) -> Fraction:
        """Σ_{j≥1} 1/m_j in closed form."""
        return Fraction(1, self.m(1)) / (1 - 1 / self.ratio)

    def tail_inv_m2(self, J: int) -> Fraction:
        """Σ_{j≥J} 1/m_j²."""
        return Fraction(1, self.m(J) ** 2) / (1 - 1 / self.ratio**2)

    def constraints(self) -> dict:
        s = self.sum_inv_m()
        upto = self.CHECK_UPTO
        j0 = next(
            (
                j
                for j in range(1, 11)
                if all(self.n(i) >= self.m(i) ** 2 for i in range(j, upto + 1))
            ),
            None,
        )
        ratio_ok = all(self.n(j + 1) > self.m(j) * self.n(j) for j in range(1, upto + 1))
        return {
            "sum_inv_m": {"value": _frac_str(s), "ok": s <= Fraction(1, 10)},
            "growth": {"j0": j0, "ok": j0 is not None},
            "ratio": {"checked_upto": upto, "ok": ratio_ok},
        }

    def first_level_covering(self, size: int) -> int:
        """Smallest j with n_j ≥ size."""
        j = 1
        while self.n(j) < size:
            j += 1
        return j

    def check_index(self, s):
        if len(s) != 1:
            raise BadIndex(f"mixed_w coordinates are singletons, got {list(s)}")

    def coordinates(self, top):
        return ((n,) for n in range(1, top + 1))

    def to_json(self):
        return {"kind": self.kind, "m": self.m.text, "n": self.n.text}


def _frac_str(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def space_from_json(d: dict) -> SpaceDesc:
    kind = d["kind"]
    if kind == "xi_plegma_l1":
        return XiPlegmaL1(family_from_json(d["family"]))
    if kind == "xi_plegma_l2l1":
        return XiPlegmaL2L1(family_from_json(d["family"]))
    if kind == "frak_x":
        return FrakX(int(d["k"]))
    if kind == "qp":
        return QP(int(d["k"]), Fraction(str(d["q"])), Fraction(str(d["p"])), d.get("base", "l1"))
    if kind == "schreier_hash":
        return SchreierHash()
    if kind == "mixed_w":
        return MixedW(d.get("m", "4^(j+1)"), d.get("n", "2^((j+1)^2)"))
    if kind == "tsirelson":
        return Tsirelson()
    raise BadParameters(f"unknown space kind {kind!r}")


# ---------------------------------------------------------------- vectors

def parse_coeff(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    if isinstance(c, float):
        raise BadParameters("coefficients must be exact: pass a string like '0.5' or '1/2'")
    return Fraction(str(c).strip())


class SpaceVec:
    """Finitely supported vector with exact rational coefficients."""

    def __init__(self, space: SpaceDesc, entries: Optional[Dict[FinSet, Fraction]] = None, check: bool = True):
        self.space = space
        clean: Dict[FinSet, Fraction] = {}
        for s, c in (entries or {}).items():
            s = finset(s)
            c = parse_coeff(c)
            if check:
                space.check_index(s)
            if c != 0:
                clean[s] = clean.get(s, Fraction(0)) + c
                if clean[s] == 0:
                    del clean[s]
        self.entries = dict(sorted(clean.items(), key=lambda kv: phi_key(kv[0])))

    @property
    def support(self) -> Tuple[FinSet, ...]:
        return tuple(self.entries)

    def __len__(self):
        return len(self.entries)

    def abs_entries(self) -> Dict[FinSet, Fraction]:
        return {s: abs(c) for s, c in self.entries.items()}

    def max_abs(self) -> Fraction:
        return max((abs(c) for c in self.entries.values()), default=Fraction(0))

    def l1(self) -> Fraction:
        return sum((abs(c) for c in self.entries.values()), Fraction(0))

    def restrict(self, coords) -> "SpaceVec":
        coords = set(coords)
        return SpaceVec(self.space, {s: c for s, c in self.entries.items() if s in coords}, check=False)

    def __add__(self, other: "SpaceVec") -> "SpaceVec":
        if other.space != self.space:
            raise BadParameters("adding vectors from different spaces")
        out = dict(self.entries)
        for s, c in other.entries.items():
            out[s] = out.get(s, Fraction(0)) + c
        return SpaceVec(self.space, out, check=False)

    def scale(self, a) -> "SpaceVec":
        a = Fraction(a)
        return SpaceVec(self.space, {s: a * c for s, c in self.entries.items()}, check=False)

    def __eq__(self, other):
        return isinstance(other, SpaceVec) and self.space == other.space and self.entries == other.entries

    def __repr__(self):
        return f"SpaceVec({self.space.kind}, {{{', '.join(f'{list(s)}: {c}' for s, c in self.entries.items())}}})"

    def to_json(self):
        return {
            "space": self.space.to_json(),
            "entries": [{"set": list(s), "coeff": _frac_str(c)} for s, c in self.entries.items()],
        }


def basis_vector(space: SpaceDesc, s: FinSet, coeff=1) -> SpaceVec:
    return SpaceVec(space, {tuple(s): Fraction(coeff)})


def vector_from_json(d: dict) -> SpaceVec:
    space = space_from_json(d["space"])
    entries: Dict[FinSet, Fraction] = {}
    for e in d["entries"]:
        s = finset(e["set"])
        if s in entries:
            raise BadIndex(f"coordinate {list(s)} listed twice")
        entries[s] = parse_coeff(e["coeff"])
    return SpaceVec(space, entries)
