"""Bounded, deterministic searches standing in for the Ramsey-type statements.

A search either returns a certificate that re-validates by direct
recomputation, or reports exhaustion of its budget.  Exhaustion carries
no mathematical conclusion.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, List, Optional, Sequence, Tuple

from .errors import BadParameters, WrongArity
from .families import Family, closure
from .plegma import PlegmaGraph, _extend, is_plegma
from .setcore import EMPTY, FinSet, Window


@dataclass(frozen=True)
class Coloring:
    name: str
    arity: int
    palette: int
    fn: Callable[[Tuple[FinSet, ...]], int] = field(compare=False, repr=False)

    def __call__(self, tup) -> int:
        c = self.fn(tup)
        if not 0 <= c < self.palette:
            raise BadParameters(f"color {c} outside palette {self.palette}")
        return c


def _union(tup):
    return sorted(x for s in tup for x in s)


def _poly_hash(xs, p):
    h = 0
    for x in xs:
        h = (h * 1_000_003 + x) % p
    return h


def coloring_by_name(name: str, arity: int = 2) -> Coloring:
    if name == "const":
        return Coloring(name, arity, 1, lambda tup: 0)
    if name == "parity-min":
        return Coloring(name, arity, 2, lambda tup: _union(tup)[0] % 2)
    if name == "parity-max":
        return Coloring(name, arity, 2, lambda tup: _union(tup)[-1] % 2)
    if name == "parity-size":
        return Coloring(name, arity, 2, lambda tup: len(_union(tup)) % 2)
    if name.startswith("hash-mod:"):
        p = int(name.split(":", 1)[1])
        if p < 1:
            raise BadParameters("hash-mod needs a positive modulus")
        return Coloring(name, arity, p, lambda tup: _poly_hash(_union(tup), p))
    raise BadParameters(f"unknown coloring {name!r}")


@dataclass
class SearchOutcome:
    status: str  # "found" | "exhausted"
    witness: Optional[Tuple[int, ...]]
    checked: int
    color: Optional[int] = None

    def to_json(self):
        return {
            "status": self.status,
            "witness": list(self.witness) if self.witness is not None else None,
            "checked": self.checked,
            "color": self.color,
        }


def members_within(F: Family, pool: Sequence[int]) -> List[FinSet]:
    """Members of F contained in the finite set ``pool``."""
    pool = sorted(pool)
    out = []

    def rec(t, start):
        if F.contains(t):
            out.append(t)
        for i in range(start, len(pool)):
            u = t + (pool[i],)
            if F.in_closure(u):
                rec(u, i + 1)

    if F.in_closure(EMPTY):
        rec(EMPTY, 0)
    return out


def plegma_tuples_within(F: Family, pool: Sequence[int], l: int):
    ms = [s for s in members_within(F, pool) if s]
    if l == 1:
        return [(s,) for s in ms]
    g = PlegmaGraph(ms)
    out: list = []
    for s in ms:
        _extend([s], g.successors(s), g, l, out)
    return out


class _Budget(Exception):
    pass


def _dfs_branch(first: int, elems: Tuple[int, ...], target: int, budget: int, new_items):
    """Lexicographic DFS over target-subsets of ``elems`` starting with ``first``.

    ``new_items(chosen)`` returns the colors of the items created by the last
    element, or None if the node is infeasible.
    """
    counter = [0]
    idx0 = elems.index(first)

    def rec(chosen: List[int], start: int, color):
        counter[0] += 1
        if counter[0] > budget:
            raise _Budget
        colors = new_items(chosen)
        for c in colors:
            if color is None:
                color = c
            elif c != color:
                return None
        if len(chosen) == target:
            return tuple(chosen), color
        need = target - len(chosen)
        for i in range(start, len(elems) - need + 1):
            chosen.append(elems[i])
            res = rec(chosen, i + 1, color)
            chosen.pop()
            if res is not None:
                return res
        return None

    try:
        res = rec([first], idx0 + 1, None)
    except _Budget:
        return None, budget, True
    return res, counter[0], False


def _run_branches(elems, target, budget, new_items, threads):
    if target > len(elems):
        raise BadParameters(f"target {target} exceeds window size {len(elems)}")
    if target == 0:
        return SearchOutcome("found", (), 0)
    firsts = elems[: len(elems) - target + 1]

    def task(f):
        return _dfs_branch(f, elems, target, budget, new_items)

    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            results = list(ex.map(task, firsts))
    else:
        results = []
        for f in firsts:
            results.append(task(f))
            if results[-1][0] is not None:
                break
    checked = 0
    for res, count, _ in results:
        checked += count
        if res is not None:
            witness, color = res
            return SearchOutcome("found", witness, checked, color)
    return SearchOutcome("exhausted", None, checked)


def find_monochromatic(
    F: Family,
    l: int,
    c: Coloring,
    M: Window,
    target: int,
    budget: int = 1_000_000,
    threads: int = 1,
) -> SearchOutcome:
    """L ⊆ M of size ``target`` with Plm_l(F↾L) monochromatic.

    Each first-element branch gets the full budget, so the outcome does not
    depend on the thread count.
    """
    if target > M.horizon:
        raise BadParameters("target exceeds the window")

    def new_items(chosen):
        x = chosen[-1]
        return [c(t) for t in plegma_tuples_within(F, chosen, l) if any(x in s for s in t)]

    return _run_branches(M.elems, target, budget, new_items, threads)


def find_homogeneous_partition(
    F: Family,
    piece: Coloring,
    M: Window,
    target: int,
    budget: int = 1_000_000,
    threads: int = 1,
) -> SearchOutcome:
    """L ⊆ M of size ``target`` with every member of F↾L in one piece."""
    if target > M.horizon:
        raise BadParameters("target exceeds the window")

    def new_items(chosen):
        x = chosen[-1]
        return [piece((s,)) for s in members_within(F, chosen) if s and s[-1] == x]

    return _run_branches(M.elems, target, budget, new_items, threads)


def validate_monochromatic(F: Family, l: int, c: Coloring, L: Sequence[int]) -> bool:
    return len({c(t) for t in plegma_tuples_within(F, L, l)}) <= 1


def validate_partition(F: Family, piece: Coloring, L: Sequence[int]) -> bool:
    return len({piece((s,)) for s in members_within(F, L) if s}) <= 1


def find_plegma_in_dense(A: Sequence[FinSet], l: int):
    """Lexicographically least plegma l-tuple inside A, or None (exact)."""
    A = sorted(set(tuple(a) for a in A))
    if A:
        k = len(A[0])
        if k == 0 or any(len(a) != k for a in A):
            raise WrongArity("all members of A must have the same positive size")
    if l == 1:
        return (A[0],) if A else None
    g = PlegmaGraph(A)
    for s in A:
        out: list = []
        _first([s], g.successors(s), g, l, out)
        if out:
            return out[0]
    return None


def _first(chosen, cands, g, l, out):
    if len(chosen) == l:
        out.append(tuple(chosen))
        return True
    for v in cands:
        chosen.append(v)
        succ = set(g.successors(v))
        if _first(chosen, [w for w in cands if w in succ], g, l, out):
            return True
        chosen.pop()
    return False


def brute_plegma_in_dense(A: Sequence[FinSet], l: int):
    for combo in combinations(sorted(set(map(tuple, A))), l):
        if is_plegma(combo):
            return combo
    return None


def find_shift_embedding(
    F: Family,
    G: Family,
    M: Window,
    N: int,
    size: int = 6,
    budget: int = 1_000_000,
) -> SearchOutcome:
    """Prefix L = (l_1 < ... < l_size) of elements of M below N with F̂(L) ⊆ Ĝ.

    Only sets whose image lies in [1..N] are constrained, and closures are used
    for both families.
    """
    pool = tuple(v for v in M.elems if v <= N)
    size = min(size, len(pool))
    by_top: dict = {}
    for t in _closure_positions(F, size):
        if t:
            by_top.setdefault(t[-1], []).append(t)

    def new_items(chosen):
        j = len(chosen)
        for t in by_top.get(j, ()):
            if not G.in_closure(tuple(chosen[p - 1] for p in t)):
                return [0, 1]  # two colors: rejects the node
        return []

    if size == 0:
        return SearchOutcome("found", (), 0)
    return _run_branches(pool, size, budget, new_items, 1)


def _closure_positions(F: Family, size: int) -> List[FinSet]:
    return closure(F, size)


def validate_shift_embedding(F: Family, G: Family, L: Sequence[int]) -> bool:
    L = tuple(L)
    return all(
        G.in_closure(tuple(L[p - 1] for p in t)) for t in _closure_positions(F, len(L))
    )
