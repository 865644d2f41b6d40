"""Exact and certified norm evaluation for every space kind."""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

from mpmath import iv, mpf

from ..errors import BadParameters, ToleranceUnreachable
from ..plegma import is_plegma
from ..setcore import FinSet, is_initial_segment
from .packing import pack
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
from .values import NormResult, Surd, fmt_fraction

METHODS = ("exact", "branch_bound", "brute")
QP_SLACK = mpf("1e-12")


def norm(
    x: SpaceVec,
    method: str = "exact",
    tol: float = 1e-9,
    budget: int = 2_000_000,
    strict: bool = False,
    hint: Optional[List[List[FinSet]]] = None,
) -> NormResult:
    """Norm of x with a certified interval.

    ``exact`` and ``branch_bound`` share the same solvers; ``brute`` runs the
    independent oracle.  If the interval is wider than ``tol`` the result is
    returned anyway, or ToleranceUnreachable is raised under ``strict``.
    ``hint`` lists candidate blocks of coordinates that seed the packing search.
    """
    if method not in METHODS:
        raise BadParameters(f"unknown method {method!r}")
    if method == "brute":
        from .brute import brute_force_norm

        res = brute_force_norm(x)
    else:
        res = _dispatch(x, budget, hint)
    if strict and res.width > tol:
        raise ToleranceUnreachable(f"interval width {res.width:.3g} exceeds tol {tol}", res)
    return res


def _dispatch(x: SpaceVec, budget: int, hint=None) -> NormResult:
    if not x.entries:
        return NormResult(Surd(0), Surd(0), True, {"kind": "zero"})
    sp = x.space
    if isinstance(sp, XiPlegmaL2L1):
        return _l2_packing(x, _plegma_block, budget, hint=hint)
    if isinstance(sp, XiPlegmaL1):
        return _xi_l1(x, budget)
    if isinstance(sp, FrakX):
        return _l2_packing(x, lambda sets: allowable(sets), budget, hint=hint)
    if isinstance(sp, SchreierHash):
        return _l2_packing(x, h_tuple, budget, conflict=comparable, hint=hint)
    if isinstance(sp, QP):
        return _qp(x, budget)
    if isinstance(sp, Tsirelson):
        return _tsirelson(x)
    if isinstance(sp, MixedW):
        return _mixed_w(x)
    raise BadParameters(f"no evaluator for {sp.kind}")


# ---------------------------------------------------------------- block predicates

def _plegma_block(sets: Sequence[FinSet]) -> bool:
    return is_plegma(sorted(sets))


def allowable(sets: Sequence[FinSet]) -> bool:
    """E ⊆ F_1×…×F_{k+1} with F_1<…<F_{k+1}, |F_i| = m ≤ min F_1.

    Taking m = max|A_i| (A_i the i-th coordinates) and padding each F_i with
    the smallest free numbers above F_{i-1} keeps every max F_i minimal, so
    the greedy choice succeeds whenever any choice does.
    """
    if not sets:
        return True
    width = len(sets[0])
    cols = [sorted({s[i] for s in sets}) for i in range(width)]
    m = max(len(c) for c in cols)
    if cols[0][0] < m:
        return False
    floor = m - 1  # every element of F_1 must be ≥ m
    for i, col in enumerate(cols):
        if col[0] <= floor:
            return False
        need = m - len(col)
        taken = set(col)
        top = col[-1]
        v = floor + 1
        while need:
            if v not in taken:
                top = max(top, v)
                need -= 1
            v += 1
        if i + 1 < width and top >= cols[i + 1][0]:
            return False
        floor = top
    return True


def h_tuple(sets: Sequence[FinSet]) -> bool:
    """Members of ℋ: plegma, equal sizes m, and m ≥ length − 1.  Singletons always qualify."""
    if len(sets) == 1:
        return True
    sizes = {len(s) for s in sets}
    if len(sizes) != 1:
        return False
    m = sizes.pop()
    return m >= 1 and m >= len(sets) - 1 and is_plegma(sorted(sets))


def comparable(a: FinSet, b: FinSet) -> bool:
    return is_initial_segment(a, b) or is_initial_segment(b, a)


# ---------------------------------------------------------------- packing-based norms

def _blocks_json(coords, blocks):
    return [[list(coords[i]) for i in sorted(b, key=lambda i: coords[i])] for b in blocks]


def _sup_fallback(x: SpaceVec, value, upper, exact, witness):
    mx = x.max_abs()
    if Surd.of(mx) > value:
        s = max(x.entries, key=lambda t: (abs(x.entries[t]), [-v for v in t]))
        return NormResult(Surd.of(mx), max(upper, Surd.of(mx)), exact, {"kind": "coordinate", "set": list(s)})
    return NormResult(value, upper, exact, witness)


def _l2_packing(x: SpaceVec, ok, budget, conflict=None, hint=None) -> NormResult:
    coords = list(x.entries)
    where = {s: i for i, s in enumerate(coords)}
    seed = None
    if hint:
        seed = [[where[tuple(s)] for s in b if tuple(s) in where] for b in hint]
        covered = {i for b in seed for i in b}
        seed = [b for b in seed if b] + [[i] for i in range(len(coords)) if i not in covered]
    w = [abs(x.entries[s]) for s in coords]
    conf = None
    if conflict is not None:
        conf = lambda i, j: conflict(coords[i], coords[j])
    res = pack(
        w,
        lambda items: ok([coords[i] for i in items]),
        lambda v: v * v,
        conflict=conf,
        hint=seed,
        budget=budget,
    )
    value = Surd(res.best)
    witness = {"kind": "l2_blocks", "blocks": _blocks_json(coords, res.blocks)}
    return _sup_fallback(x, value, Surd(res.upper), res.complete, witness)


def _xi_l1(x: SpaceVec, budget) -> NormResult:
    coords = list(x.entries)
    w = [abs(x.entries[s]) for s in coords]

    def ok(items):
        sets = sorted(coords[i] for i in items)
        return len(sets) <= sets[0][0] and is_plegma(sets)

    res = pack(w, ok, lambda v: v, max_blocks=1, budget=budget)
    witness = {"kind": "plegma_tuple", "blocks": _blocks_json(coords, res.blocks)}
    return _sup_fallback(x, Surd.of(res.best), Surd.of(res.upper), res.complete, witness)


# ---------------------------------------------------------------- QP

def _iv_pow(v, e: Fraction):
    return iv.mpf(v) ** (iv.mpf(e.numerator) / e.denominator)


def _iv_frac(q: Fraction):
    return iv.mpf(q.numerator) / q.denominator


def _iv_max(a, b):
    return iv.mpf([max(a.a, b.a), max(a.b, b.b)])


def qp_level_norms(x: SpaceVec) -> Dict[int, Fraction]:
    """‖P_l x‖_l for every l that meets the support (exact rationals)."""
    sp: QP = x.space
    groups: Dict[int, Dict[int, Fraction]] = {}
    for s, c in x.entries.items():
        groups.setdefault(s[0], {})[c_l_position(s)] = abs(c)
    out = {}
    for l, g in groups.items():
        if sp.base == "l1":
            out[l] = sum(g.values(), Fraction(0))
        else:
            out[l] = tsirelson_value(tuple(sorted(g.items())))
    return out


def _qp(x: SpaceVec, budget) -> NormResult:
    sp: QP = x.space
    q, p = sp.q, sp.p
    levels = qp_level_norms(x)
    one = sum((_iv_pow(_iv_frac(v), p) for v in levels.values()), iv.mpf(0)) ** (iv.mpf(1) / _iv_frac(p))

    coords = list(x.entries)
    qf, ratio = float(q), float(p / q)
    w = [float(abs(x.entries[s])) ** qf for s in coords]
    res = pack(
        w,
        lambda items: is_plegma(sorted(coords[i] for i in items)),
        lambda v: v**ratio,
        conflict=lambda i, j: coords[i][0] == coords[j][0],
        budget=budget,
    )
    total = iv.mpf(0)
    for b in res.blocks:
        inner = sum((_iv_pow(_iv_frac(abs(x.entries[coords[i]])), q) for i in b), iv.mpf(0))
        total += inner ** (_iv_frac(p) / _iv_frac(q))
    two = total ** (iv.mpf(1) / _iv_frac(p))
    two_hi = mpf(two.b) * (1 + QP_SLACK)
    if not res.complete:
        two_hi = max(two_hi, mpf(res.upper) ** (1 / mpf(p)) * (1 + QP_SLACK))
    two = iv.mpf([two.a, two_hi])
    val = _iv_max(one, two)
    witness = {
        "kind": "qp",
        "levels": {str(l): fmt_fraction(v) for l, v in sorted(levels.items())},
        "blocks": _blocks_json(coords, res.blocks),
        "branch": "(1)" if one.a > two.b else "(2)",
    }
    return NormResult(mpf(val.a), mpf(val.b), False, witness)


# ---------------------------------------------------------------- Tsirelson

def tsirelson_value(items: Tuple[Tuple[int, Fraction], ...]) -> Fraction:
    """Tsirelson norm of Σ v e_n over (n, v) items; exact."""
    return _tsirelson_dp(tuple((n, abs(v)) for n, v in sorted(items)))[0]


@lru_cache(maxsize=200_000)
def _tsirelson_dp(items):
    """(value, witness tree) on the contiguous run ``items``.

    Pieces may be taken as consecutive runs: enlarging a piece to the gap
    between its neighbours never lowers the sum (unconditional monotonicity).
    """
    n = len(items)
    best = max(v for _, v in items)
    tree = {"coord": items[[v for _, v in items].index(best)][0]}
    if n == 1:
        return best, tree
    # start at position a; cut the run items[a:] into d ≤ items[a][0] consecutive pieces
    for a in range(n):
        run = items[a:]
        cap = run[0][0]
        table = _piece_table(run, cap, exclude_whole=True)
        if table is None:
            continue
        total, cuts = table
        cand = total / 2
        if cand > best:
            best = cand
            pieces = [_tsirelson_dp(run[i:j])[1] for i, j in cuts]
            tree = {"weight": "1/2", "pieces": pieces}
    return best, tree


def _piece_table(run, cap, exclude_whole):
    """Max Σ ‖piece‖ over cuts of ``run`` into at most ``cap`` consecutive pieces."""
    n = len(run)
    if exclude_whole and n == 1:
        return None
    cap = min(cap, n)
    if exclude_whole and cap < 2:
        return None
    # f[d][j]: best split of run[:j] into exactly d pieces
    neg = None
    f = [[neg] * (n + 1) for _ in range(cap + 1)]
    back = [[None] * (n + 1) for _ in range(cap + 1)]
    f[0][0] = Fraction(0)
    for d in range(1, cap + 1):
        for j in range(1, n + 1):
            for i in range(d - 1, j):
                if f[d - 1][i] is None:
                    continue
                if exclude_whole and i == 0 and j == n:
                    continue
                v = f[d - 1][i] + _tsirelson_dp(run[i:j])[0]
                if f[d][j] is None or v > f[d][j]:
                    f[d][j] = v
                    back[d][j] = i
    best, bd = None, None
    for d in range(1, cap + 1):
        if f[d][n] is not None and (best is None or f[d][n] > best):
            best, bd = f[d][n], d
    if best is None:
        return None
    cuts = []
    j = n
    for d in range(bd, 0, -1):
        i = back[d][j]
        cuts.append((i, j))
        j = i
    return best, cuts[::-1]


def _tsirelson(x: SpaceVec) -> NormResult:
    items = tuple((s[0], abs(c)) for s, c in x.entries.items())
    v, tree = _tsirelson_dp(tuple(sorted(items)))
    return NormResult(Surd.of(v), Surd.of(v), True, {"kind": "tsirelson", "tree": tree})


# ---------------------------------------------------------------- mixed W

def _mixed_w(x: SpaceVec) -> NormResult:
    sp: MixedW = x.space
    items = tuple(sorted((s[0], abs(c)) for s, c in x.entries.items()))
    n = len(items)
    mx = max(v for _, v in items)
    if sp.n(1) >= n:
        # every level reaches all singletons: ‖x‖_j = ‖x‖_1/m_j
        l1 = sum((v for _, v in items), Fraction(0))
        tail = Surd(l1 * l1 * sp.tail_inv_m2(1))
        witness = {"kind": "mixed_w", "levels": "singletons", "l1": fmt_fraction(l1)}
        if Surd.of(mx) >= tail:
            return NormResult(Surd.of(mx), Surd.of(mx), True, {"kind": "coordinate", "value": fmt_fraction(mx)})
        return NormResult(tail, tail, True, witness)
    val, root = _mixed_w_iv(sp, items)
    if root.b < _iv_frac(mx).a:
        # the level part is certified below the largest coordinate
        return NormResult(Surd.of(mx), Surd.of(mx), True, {"kind": "coordinate", "value": fmt_fraction(mx)})
    return NormResult(mpf(val.a), mpf(val.b), False, {"kind": "mixed_w", "levels": "interval_dp"})


def _mixed_w_iv(sp: MixedW, items):
    if sp.n(1) < 2:
        raise BadParameters("mixed_w evaluation needs n_1 ≥ 2")
    n = len(items)
    memo: Dict[Tuple[int, int], object] = {}
    roots: Dict[Tuple[int, int], object] = {}

    def val(i, j):
        key = (i, j)
        if key in memo:
            return memo[key]
        run = items[i:j]
        mx = _iv_frac(max(v for _, v in run))
        if j - i == 1:
            memo[key] = mx
            return mx
        L = j - i
        J = sp.first_level_covering(L)
        l1 = _iv_frac(sum((v for _, v in run), Fraction(0)))
        total = l1 * l1 * _iv_frac(sp.tail_inv_m2(J))
        for lvl in range(1, J):
            pj = best_split(i, j, min(sp.n(lvl), L))
            total += (pj / sp.m(lvl)) ** 2
        roots[key] = iv.sqrt(total)
        out = _iv_max(mx, roots[key])
        memo[key] = out
        return out

    def best_split(i, j, cap):
        # at least two consecutive pieces, at most cap
        f = {(0, i): iv.mpf(0)}
        for d in range(1, cap + 1):
            for b in range(i + 1, j + 1):
                cand = None
                for a in range(i, b):
                    prev = f.get((d - 1, a))
                    if prev is None or (a == i and b == j):
                        continue
                    v = prev + val(a, b)
                    cand = v if cand is None else _iv_max(cand, v)
                if cand is not None:
                    f[(d, b)] = cand
        out = None
        for d in range(2, cap + 1):
            v = f.get((d, j))
            if v is not None:
                out = v if out is None else _iv_max(out, v)
        return out

    return val(0, n), roots[(0, n)]
