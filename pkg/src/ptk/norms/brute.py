"""Independent oracles: exhaustive enumeration of norming functionals.

Nothing here calls the evaluators or the packing solver.  Predicates are
recoded from the definitions, and the recursive norms recurse over arbitrary
subsets, not consecutive runs.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Dict, List, Sequence, Tuple

from mpmath import mp, mpf

from ..errors import SupportTooLarge
from .spaces import (
    QP,
    FrakX,
    MixedW,
    SchreierHash,
    SpaceVec,
    Tsirelson,
    XiPlegmaL1,
    XiPlegmaL2L1,
    c_l_position,
)
from .values import NormResult, Surd

MAX_SUPPORT = 8


def brute_force_norm(x: SpaceVec) -> NormResult:
    if len(x) > MAX_SUPPORT:
        raise SupportTooLarge(f"brute force needs support ≤ {MAX_SUPPORT}, got {len(x)}")
    if not x.entries:
        return NormResult(Surd(0), Surd(0), True, {"kind": "zero"})
    sp = x.space
    ab = {s: abs(c) for s, c in x.entries.items()}
    if isinstance(sp, XiPlegmaL2L1):
        return _exact(_best_partition(ab, _plegma, square=True, allow_skip=False))
    if isinstance(sp, XiPlegmaL1):
        best = max(
            sum((ab[s] for s in sub), Fraction(0))
            for sub in _subsets(list(ab))
            if sub and len(sub) <= min(sub)[0] and _plegma(sub)
        )
        return _exact(Surd.of(best))
    if isinstance(sp, FrakX):
        return _exact(_best_partition(ab, _allowable, square=True, allow_skip=False))
    if isinstance(sp, SchreierHash):
        return _exact(_best_partition(ab, _h_tuple, square=True, allow_skip=True, compatible=_incomparable))
    if isinstance(sp, Tsirelson):
        return _exact(Surd.of(tsirelson_brute(tuple(sorted((s[0], v) for s, v in ab.items())))))
    if isinstance(sp, MixedW):
        return _mixed_w_brute(sp, tuple(sorted((s[0], v) for s, v in ab.items())))
    if isinstance(sp, QP):
        v = _qp_brute(sp, ab)
        eps = v * mpf("1e-30")
        return NormResult(v - eps, v + eps, False, {"kind": "brute"})
    raise TypeError(sp)


def _exact(v) -> NormResult:
    return NormResult(v, v, True, {"kind": "brute"})


def _subsets(xs):
    for r in range(len(xs) + 1):
        yield from combinations(xs, r)


# ---------------------------------------------------------------- predicates from the definitions

def _plegma(sets: Sequence[Tuple[int, ...]]) -> bool:
    sets = sorted(sets)
    l = len(sets)
    for i in range(l):
        for j in range(l):
            si, sj = sets[i], sets[j]
            if i < j:
                for k in range(min(len(si), len(sj))):
                    if not si[k] < sj[k]:
                        return False
            if i != j:
                for k in range(min(len(si), len(sj) - 1)):
                    if not si[k] < sj[k + 1]:
                        return False
    return True


def _allowable(sets) -> bool:
    """Search for the blocks F_1 < … < F_{k+1} directly."""
    width = len(sets[0])
    cols = [sorted({s[i] for s in sets}) for i in range(width)]
    top = max(c[-1] for c in cols)
    for m in range(max(len(c) for c in cols), cols[0][0] + 1):
        if _fill(cols, 0, m, m - 1, top + width * m):
            return True
    return False


def _fill(cols, i, m, below, limit) -> bool:
    if i == len(cols):
        return True
    col = cols[i]
    if col[0] <= below:
        return False
    hi = cols[i + 1][0] if i + 1 < len(cols) else limit
    free = [v for v in range(below + 1, hi) if v not in col]
    need = m - len(col)
    for extra in combinations(free, need):
        block = sorted(col + list(extra))
        if block[-1] < hi and _fill(cols, i + 1, m, block[-1], limit):
            return True
    return False


def _h_tuple(sets) -> bool:
    if len(sets) == 1:
        return True
    m = len(sets[0])
    if m == 0 or any(len(s) != m for s in sets):
        return False
    return len(sets) - 1 <= m and _plegma(sets)


def _incomparable(a, b) -> bool:
    short, long_ = (a, b) if len(a) <= len(b) else (b, a)
    return long_[: len(short)] != short


# ---------------------------------------------------------------- partitions

def _set_partitions(items: List):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        yield [[first]] + part
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1 :]


def _best_partition(ab: Dict, ok, square: bool, allow_skip: bool, compatible=None) -> Surd:
    coords = list(ab)
    best = Fraction(0)
    pools = _subsets(coords) if allow_skip else [tuple(coords)]
    for pool in pools:
        if compatible is not None and not all(
            compatible(a, b) for a, b in combinations(pool, 2)
        ):
            continue
        for part in _set_partitions(list(pool)):
            if all(ok(sorted(b)) for b in part):
                val = sum((sum((ab[s] for s in b), Fraction(0)) ** 2 for b in part), Fraction(0))
                best = max(best, val)
    return Surd(best)


# ---------------------------------------------------------------- recursive norms

def _successive_choices(items):
    """Pairs (E, rest): E a nonempty subset of items, rest = items strictly above max E."""
    n = len(items)
    for t in range(n):
        below = items[:t]
        for r in range(len(below) + 1):
            for sub in combinations(below, r):
                yield sub + (items[t],), items[t + 1 :]


@lru_cache(maxsize=None)
def _tail_sum(items, r, fn_name, params):
    """max Σ ‖E_q‖ over at most r successive nonempty subsets of items."""
    if r <= 0 or not items:
        return Fraction(0) if fn_name == "ts" else (mpf(0), Fraction(0))
    fn = _NORMS[fn_name]
    best = _tail_sum(items[1:], r, fn_name, params)  # the least element unused
    for E, rest in _successive_choices(items):
        if E[0] != items[0]:
            continue
        v = _add(fn(E, params), _tail_sum(rest, r - 1, fn_name, params))
        best = _max(best, v)
    return best


def _add(a, b):
    if isinstance(a, Fraction):
        return a + b
    exact = a[1] + b[1] if a[1] is not None and b[1] is not None else None
    return (a[0] + b[0], exact)


def _max(a, b):
    if isinstance(a, Fraction):
        return max(a, b)
    if abs(a[0] - b[0]) < mpf("1e-30"):
        return a if a[1] is not None else b
    return a if a[0] > b[0] else b


@lru_cache(maxsize=None)
def _ts(items, params=None) -> Fraction:
    best = max(v for _, v in items)
    if len(items) == 1:
        return best
    for E, rest in _successive_choices(items):
        if E == items:
            continue  # ½‖x‖ never attains the max
        d = E[0][0]
        if d < 1:
            continue
        total = _ts(E) + _tail_sum(rest, d - 1, "ts", None)
        best = max(best, total / 2)
    return best


def tsirelson_brute(items) -> Fraction:
    return _ts(tuple(items))


_SPACES: Dict[str, MixedW] = {}


def _key(sp: MixedW) -> str:
    k = repr(sorted(sp.to_json().items()))
    _SPACES[k] = sp
    return k


def _mpf(q: Fraction):
    return mpf(q.numerator) / q.denominator


def _levels(items, key):
    """P_j = m_j‖x‖_j for j = 1..J, with J the first level whose n_J ≥ |items|.

    Each P_j is (mpf, exact Fraction or None).  The whole support as a single
    piece is skipped: for two or more coordinates two pieces already beat it.
    """
    sp = _SPACES[key]
    J = sp.first_level_covering(len(items))
    out = []
    for j in range(1, J + 1):
        pj = (mpf(0), Fraction(0))
        for E, rest in _successive_choices(items):
            if E == items:
                continue
            cand = _add(_mw(E, key), _tail_sum(rest, sp.n(j) - 1, "mw", key))
            pj = _max(pj, cand)
        out.append(pj)
    return out, J


def _levels_sq(items, key):
    """Σ_j ‖x‖_j², the levels past J following the geometric tail exactly."""
    sp = _SPACES[key]
    ps, J = _levels(items, key)
    total = (mpf(0), Fraction(0))
    for j, pj in enumerate(ps, start=1):
        coef = Fraction(1, sp.m(j) ** 2) if j < J else sp.tail_inv_m2(J)
        total = _add(total, (pj[0] ** 2 * _mpf(coef), pj[1] ** 2 * coef if pj[1] is not None else None))
    return total


@lru_cache(maxsize=None)
def _mw(items, key):
    """(value, exact Fraction or None): exact only while the norm is rational."""
    mx = max(v for _, v in items)
    if len(items) == 1:
        return (_mpf(mx), mx)
    sq = _levels_sq(items, key)
    root = (mp.sqrt(sq[0]), Surd(sq[1]).rational if sq[1] is not None else None)
    return (_mpf(mx), mx) if _mpf(mx) >= root[0] - mpf("1e-30") else root


_NORMS = {"ts": lambda E, params: _ts(E), "mw": _mw}


def _mixed_w_brute(sp: MixedW, items) -> NormResult:
    key = _key(sp)
    mx = max(v for _, v in items)
    if len(items) == 1:
        return _exact(Surd.of(mx))
    sq = _levels_sq(items, key)
    if sq[1] is not None:
        return _exact(max(Surd.of(mx), Surd(sq[1])))
    val = max(_mpf(mx), mp.sqrt(sq[0]))
    eps = val * mpf("1e-30")
    return NormResult(val - eps, val + eps, False, {"kind": "brute"})


def mixed_w_levels_brute(x: SpaceVec) -> dict:
    """Level norms ‖x‖_j by enumeration, and Σ_j ‖x‖_j² including the tail."""
    sp: MixedW = x.space
    items = tuple(sorted((s[0], abs(c)) for s, c in x.entries.items()))
    key = _key(sp)
    ps, J = _levels(items, key)
    return {
        "levels": [(j, pj[1] / sp.m(j) if pj[1] is not None else pj[0] / sp.m(j)) for j, pj in enumerate(ps, 1)],
        "tail_from": J,
        "sum_sq": _levels_sq(items, key)[1],
    }


# ---------------------------------------------------------------- QP

def _qp_brute(sp: QP, ab: Dict) -> mpf:
    q, p = mpf(sp.q.numerator) / sp.q.denominator, mpf(sp.p.numerator) / sp.p.denominator
    by_min: Dict[int, List] = {}
    for s, v in ab.items():
        by_min.setdefault(s[0], []).append((c_l_position(s), v))
    one = mpf(0)
    for group in by_min.values():
        if sp.base == "l1":
            nl = sum((v for _, v in group), Fraction(0))
        else:
            nl = tsirelson_brute(tuple(sorted(group)))
        one += _mpf(nl) ** p
    one = one ** (1 / p)
    two = mpf(0)
    coords = list(ab)
    for pool in _subsets(coords):
        if len({s[0] for s in pool}) != len(pool):
            continue
        for part in _set_partitions(list(pool)):
            if all(_plegma(b) for b in part):
                val = sum((sum((_mpf(ab[s]) ** q for s in b), mpf(0)) ** (p / q) for b in part), mpf(0))
                two = max(two, val)
    two = two ** (1 / p)
    return max(one, two)
