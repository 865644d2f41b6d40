"""Finite estimators around spreading models.

Nothing here asserts that a sequence generates a spreading model; the
limit is infinite.  Profiles and sampled constants are reported as computed.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from math import comb
from typing import Dict, List, Optional, Sequence, Tuple

from mpmath import mpf, nstr

from .errors import (
    BadIndex,
    BadParameters,
    BudgetExhausted,
    EmptyRestriction,
    HorizonRequired,
    NoTupleAtStep,
)
from .families import F_OMEGA, Family, KSubsets, family_from_json, family_to_json
from .norms.evaluators import norm
from .norms.spaces import FrakX, SchreierHash, SpaceDesc, SpaceVec, space_from_json, vector_from_json
from .norms.values import NormResult, Surd, fmt_fraction, value_mpf, value_str
from .ramsey import members_within
from .setcore import FinSet, Window

DEFAULT_SAMPLES = 64


# ---------------------------------------------------------------- sequences

class SeqDesc:
    kind = "abstract"
    family: Family
    space: SpaceDesc

    def vector(self, s: FinSet) -> SpaceVec:
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError


class Basis(SeqDesc):
    """x_s = e_s."""

    kind = "basis"

    def __init__(self, space: SpaceDesc, family: Family):
        self.space = space
        self.family = family

    def vector(self, s):
        s = tuple(s)
        if not self.family.contains(s):
            raise BadIndex(f"{list(s)} is not a member of the sequence's family")
        return SpaceVec(self.space, {s: Fraction(1)})

    def to_json(self):
        return {"kind": self.kind, "space": self.space.to_json(), "family": family_to_json(self.family)}


class CumulativeChain(SeqDesc):
    """x_s = Σ_{∅⊏t⊑s} e_t over the maximal Schreier sets."""

    kind = "cumulative_chain"

    def __init__(self):
        self.space = SchreierHash()
        self.family = F_OMEGA

    def vector(self, s):
        s = tuple(s)
        if not self.family.contains(s):
            raise BadIndex(f"{list(s)} is not a maximal Schreier set")
        return SpaceVec(self.space, {s[:i]: Fraction(1) for i in range(1, len(s) + 1)})

    def to_json(self):
        return {"kind": self.kind}


class ExplicitTable(SeqDesc):
    """A finite table s ↦ x_s; lookups outside it need a longer horizon."""

    kind = "explicit"

    def __init__(self, space: SpaceDesc, family: Family, table: Dict[FinSet, SpaceVec]):
        self.space = space
        self.family = family
        for s, v in table.items():
            if v.space != space:
                raise BadParameters(f"table vector at {list(s)} lives in another space")
        self.table = dict(table)

    def vector(self, s):
        s = tuple(s)
        if s not in self.table:
            raise HorizonRequired(f"no table entry for {list(s)}")
        return self.table[s]

    def to_json(self):
        return {
            "kind": self.kind,
            "space": self.space.to_json(),
            "family": family_to_json(self.family),
            "table": [
                {"set": list(s), "entries": v.to_json()["entries"]} for s, v in sorted(self.table.items())
            ],
        }


def seq_from_json(d: dict) -> SeqDesc:
    kind = d["kind"]
    if kind == "basis":
        return Basis(space_from_json(d["space"]), family_from_json(d["family"]))
    if kind == "cumulative_chain":
        return CumulativeChain()
    if kind == "explicit":
        space = space_from_json(d["space"])
        table = {
            tuple(row["set"]): vector_from_json({"space": d["space"], "entries": row["entries"]})
            for row in d["table"]
        }
        return ExplicitTable(space, family_from_json(d["family"]), table)
    raise BadParameters(f"unknown sequence kind {kind!r}")


def combine(seq: SeqDesc, coeffs: Sequence[Fraction], sets: Sequence[FinSet]) -> SpaceVec:
    out = SpaceVec(seq.space, {})
    for a, s in zip(coeffs, sets):
        out = out + seq.vector(s).scale(a)
    return out


# ---------------------------------------------------------------- plegma tuples inside a window

class _Budget(Exception):
    pass


def plegma_tuple_in(
    F: Family,
    M: Window,
    l: int,
    min_first: int,
    rng: Optional[random.Random] = None,
    budget: int = 200_000,
) -> Optional[Tuple[FinSet, ...]]:
    """A plegma l-tuple of members of F inside M with s_1(1) ≥ min_first.

    Elements are placed column by column (s_1(1) < … < s_l(1) < s_1(2) < …),
    which is exactly the plegma condition.  Without ``rng`` the result is the
    least tuple in that reading order; with ``rng`` each placement starts a
    random 0–2 positions later.  Returns None when the horizon has no tuple;
    raises BudgetExhausted if the search gives up.
    """
    elems = M.elems
    start = next((i for i, v in enumerate(elems) if v >= min_first), len(elems))
    sets: List[List[int]] = [[] for _ in range(l)]
    done = [False] * l
    nodes = [0]

    def next_slot(j):
        # the next unfinished set after j in column-major order
        for step in range(1, l + 1):
            cand = (j + step) % l
            if not done[cand]:
                return cand
        return None

    def rec(pos, j):
        nodes[0] += 1
        if nodes[0] > budget:
            raise _Budget
        if all(done):
            return True
        if j is None:
            return False
        positions = list(range(pos, len(elems)))
        if rng is not None and positions:
            off = min(rng.randrange(3), len(positions) - 1)
            positions = positions[off:] + positions[:off]
        for p in positions:
            sets[j].append(elems[p])
            t = tuple(sets[j])
            if F.in_closure(t):
                if F.contains(t):
                    done[j] = True
                    if rec(p + 1, next_slot(j)):
                        return True
                    done[j] = False
                if _extendable(F, t) and rec(p + 1, next_slot(j)):
                    return True
            sets[j].pop()
        return False

    if start >= len(elems):
        return None
    try:
        ok = rec(start, 0)
    except _Budget:
        raise BudgetExhausted(f"plegma tuple search exceeded {budget} nodes") from None
    return tuple(tuple(s) for s in sets) if ok else None


def _extendable(F: Family, t: FinSet) -> bool:
    # thin families: a member is never a proper initial segment of another
    return not F.contains(t) or "thin" not in F.structural()


# ---------------------------------------------------------------- profiles

def _diff_str(a, b) -> str:
    if isinstance(a, Surd) and isinstance(b, Surd):
        if a == b:
            return "0"
        ra, rb = a.rational, b.rational
        if ra is not None and rb is not None:
            return fmt_fraction(rb - ra)
    return nstr(value_mpf(b) - value_mpf(a), 20)


@dataclass
class SMProfile:
    coeffs: List[Fraction]
    steps: List[Tuple[int, Tuple[FinSet, ...], NormResult]]
    seed: Optional[int] = None

    @property
    def values(self):
        return [r.lower for _, _, r in self.steps]

    @property
    def delta_trace(self) -> List[str]:
        v = self.values
        return [_diff_str(a, b) for a, b in zip(v, v[1:])]

    def to_json(self):
        return {
            "coeffs": [fmt_fraction(a) for a in self.coeffs],
            "steps": [
                {
                    "n": n,
                    "tuple": [list(s) for s in tup],
                    "value": value_str(r.lower),
                    "upper": value_str(r.upper),
                    "exact": r.exact,
                }
                for n, tup, r in self.steps
            ],
            "delta_trace": self.delta_trace,
            "seed": self.seed,
        }


def sm_profile(seq: SeqDesc, a: Sequence, M: Window, steps: int, budget: int = 200_000) -> SMProfile:
    """‖Σ a_j x_{s_j}‖ along the least plegma l-tuple with s_1(1) ≥ M(n), n = l..steps."""
    a = [Fraction(c) for c in a]
    l = len(a)
    if l < 1 or l > steps:
        raise BadParameters("need 1 ≤ len(a) ≤ steps")
    out = []
    for n in range(l, steps + 1):
        try:
            floor = M(n)
        except IndexError:
            raise NoTupleAtStep(f"window horizon {M.horizon} is shorter than step {n}") from None
        tup = plegma_tuple_in(seq.family, M, l, floor, budget=budget)
        if tup is None:
            raise NoTupleAtStep(f"no plegma {l}-tuple with s_1(1) ≥ {floor} inside the window")
        out.append((n, tup, norm(combine(seq, a, tup))))
    return SMProfile(a, out)


# ---------------------------------------------------------------- ℓ^p constants

def coefficient_grid(n: int) -> List[Tuple[Fraction, ...]]:
    """All ±1 patterns, the unit vectors and the uniform vector (deduplicated, in that order)."""
    grid: List[Tuple[Fraction, ...]] = []
    for signs in product((1, -1), repeat=n):
        grid.append(tuple(Fraction(s) for s in signs))
    for i in range(n):
        grid.append(tuple(Fraction(int(i == j)) for j in range(n)))
    grid.append(tuple(Fraction(1, n) for _ in range(n)))
    seen, out = set(), []
    for g in grid:
        if g not in seen:
            seen.add(g)
            out.append(g)
    return out


def _lp_denominator(a, p: Fraction):
    if p == 1:
        return Surd.of(sum((abs(c) for c in a), Fraction(0)))
    if p == 2:
        return Surd(sum((c * c for c in a), Fraction(0)))
    return sum((mpf(abs(c)) ** mpf(p) for c in a), mpf(0)) ** (1 / mpf(p))


def _ratio(v, den):
    if isinstance(v, Surd) and isinstance(den, Surd):
        return v / den
    return value_mpf(v) / value_mpf(den)


def _less(a, b) -> bool:
    if isinstance(a, Surd) and isinstance(b, Surd):
        return a < b
    return value_mpf(a) < value_mpf(b)


SAMPLE_BUDGET = 5_000


def sample_tuples(F: Family, M: Window, n: int, samples: int, seed: int, budget: int = 200_000):
    floor = M(n)
    first = plegma_tuple_in(F, M, n, floor, budget=budget)
    if first is None:
        raise NoTupleAtStep(f"no plegma {n}-tuple with s_1(1) ≥ {floor} inside the window")
    rng = random.Random(seed)
    out = [first]
    seen = {first}
    for _ in range(samples):
        try:
            tup = plegma_tuple_in(F, M, n, floor, rng=rng, budget=SAMPLE_BUDGET)
        except BudgetExhausted:
            continue  # a random walk that strayed; the sample is simply dropped
        if tup is not None and tup not in seen:
            seen.add(tup)
            out.append(tup)
    return out


@dataclass
class LpConstants:
    c_lower: object
    C_upper: object
    witnesses: dict = field(default_factory=dict)
    seed: int = 0
    tuples: int = 0

    def to_json(self):
        return {
            "c_lower": value_str(self.c_lower),
            "C_upper": value_str(self.C_upper),
            "witnesses": self.witnesses,
            "seed": self.seed,
            "tuples_sampled": self.tuples,
        }


def lp_constants(
    seq: SeqDesc,
    p,
    n: int,
    M: Window,
    budget: int = 200_000,
    samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
    grid: Optional[List[Sequence]] = None,
) -> LpConstants:
    """Worst lower and best upper ratio ‖Σ a_j x_{s_j}‖ / ‖a‖_p over sampled tuples and a grid.

    Lower ratios use the certified lower end of each norm, upper ratios the upper end.
    """
    p = Fraction(p)
    if p < 1:
        raise BadParameters("p must be at least 1")
    tuples = sample_tuples(seq.family, M, n, samples, seed, budget)
    grid = [tuple(Fraction(c) for c in g) for g in (grid or coefficient_grid(n))]
    lo = hi = None
    wit: dict = {}
    for tup in tuples:
        for a in grid:
            den = _lp_denominator(a, p)
            if isinstance(den, Surd) and den == 0:
                continue
            res = norm(combine(seq, a, tup))
            r_lo, r_hi = _ratio(res.lower, den), _ratio(res.upper, den)
            if lo is None or _less(r_lo, lo):
                lo = r_lo
                wit["lower"] = {"tuple": [list(s) for s in tup], "coeffs": [fmt_fraction(c) for c in a]}
            if hi is None or _less(hi, r_hi):
                hi = r_hi
                wit["upper"] = {"tuple": [list(s) for s in tup], "coeffs": [fmt_fraction(c) for c in a]}
    return LpConstants(lo, hi, wit, seed, len(tuples))


# ---------------------------------------------------------------- Cesàro averages

@dataclass
class CesaroResult:
    vector: SpaceVec
    result: NormResult
    lower_bound: Optional[Fraction] = None

    def bound_holds(self) -> bool:
        if self.lower_bound is None:
            return True
        lo = self.result.lower
        if isinstance(lo, Surd):
            return lo >= self.lower_bound
        return value_mpf(lo) >= value_mpf(self.lower_bound)

    def to_json(self):
        out = {"vector": self.vector.to_json(), "norm": self.result.to_json()}
        if self.lower_bound is not None:
            out["lower_bound"] = fmt_fraction(self.lower_bound)
            out["bound_holds"] = self.bound_holds()
        return out


def _first(M: Window, n: int) -> Tuple[int, ...]:
    if M.horizon < n:
        raise HorizonRequired(f"window horizon {M.horizon} is shorter than {n}")
    return M.elems[:n]


def cesaro_norm(k: int, M: Window, n: int, budget: int = 20_000) -> CesaroResult:
    """y_n = C((k+2)n, k+1)^{-1} Σ e_s over [M|(k+2)n]^{k+1} in 𝔛_{k+1}, with the bound n^{k+1}/C((k+2)n, k+1).

    The packing search is seeded with the allowable block F_2×…×F_{k+2},
    F_i the M-positions ((i−1)n, in], which attains the bound by itself.
    """
    if k < 1 or n < 1:
        raise BadParameters("need k ≥ 1 and n ≥ 1")
    pool = _first(M, (k + 2) * n)
    total = comb((k + 2) * n, k + 1)
    coeff = Fraction(1, total)
    space = FrakX(k)
    y = SpaceVec(space, {s: coeff for s in combinations(pool, k + 1)}, check=False)
    blocks = [pool[(i - 1) * n : i * n] for i in range(2, k + 3)]
    seed_block = [tuple(c) for c in product(*blocks)]
    res = norm(y, budget=budget, hint=[seed_block])
    out = CesaroResult(y, res, Fraction(n ** (k + 1), total))
    assert out.bound_holds(), "norm fell below the analytic lower bound"
    return out


def k_cesaro_sum(seq: SeqDesc, M: Window, n: int, budget: int = 200_000) -> CesaroResult:
    """C(n,k)^{-1} Σ_{s ∈ [M|n]^k} x_s for a sequence indexed by [N]^k."""
    F = seq.family
    if not isinstance(F, KSubsets):
        raise BadParameters("k-Cesàro sums need a sequence indexed by k-subsets")
    pool = _first(M, n)
    sets = list(combinations(pool, F.k))
    if not sets:
        raise EmptyRestriction(f"[M|{n}]^{F.k} is empty")
    return _average(seq, sets, budget)


def f_cesaro_sum(F: Family, seq: SeqDesc, M: Window, n: int, budget: int = 200_000) -> CesaroResult:
    """|F↾(M|n)|^{-1} Σ_{s ∈ F↾(M|n)} x_s."""
    pool = _first(M, n)
    sets = [s for s in members_within(F, pool) if s]
    if not sets:
        raise EmptyRestriction(f"no member of the family inside the first {n} window elements")
    return _average(seq, sets, budget)


def _average(seq, sets, budget):
    w = Fraction(1, len(sets))
    v = combine(seq, [w] * len(sets), sets)
    return CesaroResult(v, norm(v, budget=budget))


# ---------------------------------------------------------------- ℓ¹ boosting

def _b_grid(kmax: int, den: int):
    """Coefficient vectors with Σ|b_i| = 1, entries multiples of 1/den, k = 1..kmax."""
    for k in range(1, kmax + 1):
        for parts in product(range(1, den + 1), repeat=k):
            if sum(parts) != den:
                continue
            for signs in product((1, -1), repeat=k - 1):
                yield (Fraction(parts[0], den),) + tuple(
                    Fraction(s * q, den) for s, q in zip(signs, parts[1:])
                )


@dataclass
class BoostResult:
    seq: ExplicitTable
    L: Window
    b: Tuple[Fraction, ...]
    eps_prime: Fraction
    estimate: object

    def to_json(self):
        return {
            "b": [fmt_fraction(c) for c in self.b],
            "eps_prime": fmt_fraction(self.eps_prime),
            "estimate": value_str(self.estimate),
            "L": list(self.L.elems),
            "sequence": self.seq.to_json(),
        }


def boost_l1(
    seq: SeqDesc,
    F: Family,
    M: Window,
    c,
    eps,
    budget: int = 2_000,
    kmax: int = 3,
    den: int = 4,
    samples: int = 8,
    seed: int = 0,
    table_n: int = 8,
) -> BoostResult:
    """Rescaled block combinations y_s with a sampled ℓ¹ lower constant near 1.

    With ε′ = εc/(2(3−2ε)) one has (c−ε′)/(c+2ε′) > 1−ε.  The search picks
    b (Σ|b_i| = 1) whose sampled estimate max‖Σ b_i x_{s_i}‖ is below c+ε′,
    then y_s = Σ_i b_i x_{t_i^s}/(c+2ε′), t_i^s the member of F that is an
    initial segment of {I_{n_j}(i)}_j, on the window L = {max I_n}.  The
    table holds the members inside the first ``table_n`` elements of L.
    """
    c, eps = Fraction(c), Fraction(eps)
    if not (0 < eps < 1):
        raise BadParameters("eps must lie in (0, 1)")
    if not (0 < c <= 1):
        raise BadParameters("c must lie in (0, 1]")
    ep = eps * c / (2 * (3 - 2 * eps))
    target = Surd.of(c + ep)
    tried = 0
    chosen = None
    for b in _b_grid(kmax, den):
        if tried >= budget:
            break
        tried += 1
        k = len(b)
        try:
            tuples = sample_tuples(seq.family, M, k, samples, seed)
        except NoTupleAtStep:
            continue
        est = None
        for tup in tuples:
            v = norm(combine(seq, b, tup)).upper
            if est is None or _less(est, v):
                est = v
        if _less(est, target):
            chosen = (b, est)
            break
    if chosen is None:
        raise BudgetExhausted(f"no coefficient vector below c+ε′ among {tried} tried")
    b, est = chosen
    k = len(b)
    blocks = []
    n = 1
    while (n + 1) * k <= M.horizon:
        blocks.append(tuple(M((n * k) + i) for i in range(1, k + 1)))
        n += 1
    if not blocks:
        raise HorizonRequired("window too short for a single block")
    L = Window(tuple(blk[-1] for blk in blocks))
    scale = 1 / (c + 2 * ep)
    table: Dict[FinSet, SpaceVec] = {}
    for s in members_within(F, L.elems[:table_n]):
        if not s:
            continue
        idx = [L.position(v) for v in s]
        parts = []
        for i in range(k):
            cand = tuple(blocks[p - 1][i] for p in idx)
            t = _member_prefix(F, cand)
            if t is None:
                break
            parts.append(t)
        else:
            table[s] = combine(seq, b, parts).scale(scale)
    return BoostResult(ExplicitTable(seq.space, F, table), L, b, ep, est)


def _member_prefix(F: Family, u: FinSet) -> Optional[FinSet]:
    for j in range(1, len(u) + 1):
        if F.contains(u[:j]):
            return u[:j]
    return None
