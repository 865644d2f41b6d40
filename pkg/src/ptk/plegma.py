"""Plegma tuples, plegma paths and plegma-preserving maps."""

from __future__ import annotations

from collections import defaultdict, deque
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from .errors import (
    EmptyMember,
    HorizonRequired,
    IndexBeyondHorizon,
    NotAPlegmaUnion,
    NotInSkippedRestriction,
    NotMember,
    OutOfRange,
)
from .families import Family, Restrict, members
from .setcore import FinSet, Window

PlegmaTuple = Tuple[FinSet, ...]


def plegma_pair(a: FinSet, b: FinSet) -> bool:
    """(a, b) is plegma: a(k) < b(k) and a(k) < b(k+1) and b(k) < a(k+1)."""
    na, nb = len(a), len(b)
    for k in range(min(na, nb)):
        if a[k] >= b[k]:
            return False
    # clause (ii) with (i, j) = (1, 2): a(k) < b(k+1) follows from clause (i)
    # clause (ii) with (i, j) = (2, 1): b(k) < a(k+1)
    for k in range(min(nb, na - 1)):
        if b[k] >= a[k + 1]:
            return False
    return True


def is_plegma(sets: Sequence[FinSet]) -> bool:
    sets = [tuple(s) for s in sets]
    if any(not s for s in sets):
        raise EmptyMember("plegma tuples have nonempty members")
    for i in range(len(sets)):
        for j in range(i + 1, len(sets)):
            if not plegma_pair(sets[i], sets[j]):
                return False
    return True


def _safe_pair(a, b) -> bool:
    return bool(a) and bool(b) and plegma_pair(a, b)


class PlegmaGraph:
    """Members of F within [1..N] with edges the plegma pairs; adjacency on demand."""

    def __init__(self, nodes: Sequence[FinSet]):
        self.nodes = list(nodes)
        self.by_min: Dict[int, List[FinSet]] = defaultdict(list)
        for s in self.nodes:
            if s:
                self.by_min[s[0]].append(s)
        self._mins = sorted(self.by_min)
        self._cache: Dict[FinSet, List[FinSet]] = {}

    def successors(self, u: FinSet) -> List[FinSet]:
        got = self._cache.get(u)
        if got is not None:
            return got
        if not u:
            return []
        # v(1) lies strictly between u(1) and u(2)
        hi = u[1] if len(u) > 1 else float("inf")
        out = []
        for m in self._mins:
            if m <= u[0]:
                continue
            if m >= hi:
                break
            out.extend(v for v in self.by_min[m] if plegma_pair(u, v))
        out.sort()
        self._cache[u] = out
        return out


def enumerate_plm(F: Family, l: int, N: int) -> Iterator[PlegmaTuple]:
    """All plegma l-tuples of members of F within [1..N], lexicographic on concatenation."""
    if l < 1:
        raise OutOfRange("arity must be at least 1")
    ms = [s for s in members(F, N) if s]
    g = PlegmaGraph(ms)
    found: List[PlegmaTuple] = []
    for s in ms:
        _extend([s], g.successors(s), g, l, found)
    found.sort(key=lambda tup: (tuple(x for s in tup for x in s), tuple(len(s) for s in tup)))
    return iter(found)


def _extend(chosen: List[FinSet], cands: List[FinSet], g: PlegmaGraph, l: int, out: List[PlegmaTuple]):
    if len(chosen) == l:
        out.append(tuple(chosen))
        return
    # the next member must be a plegma successor of every chosen member
    for v in cands:
        chosen.append(v)
        if len(chosen) == l:
            out.append(tuple(chosen))
        else:
            succ = set(g.successors(v))
            _extend(chosen, [w for w in cands if w in succ], g, l, out)
        chosen.pop()


def union_map(tup: Sequence[FinSet]) -> FinSet:
    return tuple(sorted(x for s in tup for x in s))


def tuple_from_union(F: Family, u: FinSet, l: int) -> PlegmaTuple:
    """Inverse of the union map on plegma l-tuples of a thin family."""
    u = tuple(u)
    if l < 1:
        raise OutOfRange("arity must be at least 1")
    rest = list(u)
    parts: List[FinSet] = []
    for m in range(l):
        cols = l - m
        picked: List[int] = []
        s = None
        j = 0
        while j * cols < len(rest):
            picked.append(rest[j * cols])
            j += 1
            if F.contains(tuple(picked)):
                s = tuple(picked)
                break
        if s is None:
            raise NotAPlegmaUnion(f"component {m + 1} never reaches a member of the family")
        parts.append(s)
        taken = set(s)
        rest = [x for x in rest if x not in taken]
    tup = tuple(parts)
    if rest or union_map(tup) != u or not is_plegma(tup):
        raise NotAPlegmaUnion(f"{list(u)} is not the union of a plegma {l}-tuple")
    return tup


# ---------------------------------------------------------------- skipped restriction and paths

def is_skipped(L: Window, s: FinSet) -> bool:
    """Every gap of s contains an element of L (s ⊆ L assumed)."""
    for a, b in zip(s, s[1:]):
        try:
            if L.position(b) - L.position(a) < 2:
                return False
        except OutOfRange:
            return False
    return True


def in_skipped_restriction(F: Family, L: Window, s: FinSet) -> bool:
    try:
        return bool(s) and Restrict(F, L).contains(s) and is_skipped(L, s)
    except HorizonRequired:
        return False


def skipped_restriction(F: Family, L: Window, N: int) -> List[FinSet]:
    return [s for s in members(Restrict(F, L), N) if s and is_skipped(L, s)]


def _L(L: Window, n: int) -> int:
    try:
        return L(n)
    except (IndexBeyondHorizon, OutOfRange) as exc:
        raise HorizonRequired(f"path construction: {exc}") from None


def _member_prefix(F: Family, u: FinSet) -> Optional[FinSet]:
    for k in range(1, len(u) + 1):
        if F.contains(u[:k]):
            return u[:k]
        if not F.in_closure(u[:k]):
            return None
    return None


def _path_from(F: Family, L: Window, t: FinSet, s: FinSet) -> List[FinSet]:
    """Path of length |t| from t (in the closure) to s, all later entries in F↾↾L."""
    if len(t) == 1:
        return [t, s]
    pos = L.positions(t)
    t0 = tuple(_L(L, n - 1) for n in pos[1:])
    sub = _path_from(F, L, t0, s)
    s1 = sub[1]
    m = L.positions(s1)
    k = len(t0)
    u = t0 + tuple(_L(L, m[j] - 1) for j in range(k, len(m)))
    s0 = _member_prefix(F, u)
    if s0 is None or len(s0) <= k:
        raise HorizonRequired(f"no member of the family extends {list(t0)} inside {list(u)}")
    return [t, s0] + sub[1:]


def _check_endpoints(F: Family, L: Window, s0: FinSet, s: FinSet):
    for x in (s0, s):
        if not in_skipped_restriction(F, L, x):
            raise NotInSkippedRestriction(f"{list(x)} is not in the skipped restriction")
    if not (s0[-1] < s[0]):
        raise NotInSkippedRestriction("path endpoints must satisfy s0 < s")


def plegma_path(F: Family, L: Window, s0: FinSet, s: FinSet) -> List[FinSet]:
    """A plegma path of length |s0| from s0 to s inside F↾↾L (shift-back construction)."""
    s0, s = tuple(s0), tuple(s)
    _check_endpoints(F, L, s0, s)
    path = _path_from(F, L, s0, s)
    for a, b in zip(path, path[1:]):
        assert plegma_pair(a, b), (a, b)
    return path


def three_plegma_path(F: Family, L: Window, s0: FinSet, s: FinSet) -> List[FinSet]:
    """Length 2|s0| path with every consecutive triple plegma, endpoints in F↾↾L(2N)."""
    s0, s = tuple(s0), tuple(s)
    even = L.even_positions()
    _check_endpoints(F, even, s0, s)
    base = _path_from(F, even, s0, s)
    out = [base[0]]
    for sj in base[1:]:
        shifted = tuple(_L(L, L.position(v) - 1) for v in sj)
        tilde = _member_prefix(F, shifted)
        if tilde is None:
            raise HorizonRequired(f"no member of the family is an initial segment of {list(shifted)}")
        out.extend([tilde, sj])
    return out


def bfs_distance(F: Family, N: int, s0: FinSet, s: FinSet) -> Optional[int]:
    """Shortest plegma-path length from s0 to s among members within [1..N]; None if unreachable."""
    s0, s = tuple(s0), tuple(s)
    ms = members(F, N)
    present = set(ms)
    for x in (s0, s):
        if x not in present:
            raise NotMember(f"{list(x)} is not a member within [1..{N}]")
    if s0 == s:
        return 0
    g = PlegmaGraph(ms)
    dist = {s0: 0}
    queue = deque([s0])
    while queue:
        u = queue.popleft()
        for v in g.successors(u):
            if v not in dist:
                dist[v] = dist[u] + 1
                if v == s:
                    return dist[v]
                queue.append(v)
    return None


# ---------------------------------------------------------------- maps

LEVELS = ("none", "preserving", "monotone", "canonical")


def check_plegma_map(phi: Dict[FinSet, FinSet], F: Family, N: int) -> dict:
    """Classify phi over all plegma pairs of members within [1..N]."""
    ms = [s for s in members(F, N) if s]
    for s in ms:
        if s not in phi:
            raise NotMember(f"map undefined at {list(s)}")
    g = PlegmaGraph(ms)
    fail = {"preserving": None, "monotone": None, "canonical": None}
    for s in ms:
        if len(phi[s]) > len(s) and fail["canonical"] is None:
            fail["canonical"] = [list(s)]
    for a in ms:
        for b in g.successors(a):
            fa, fb = phi[a], phi[b]
            fwd = _safe_pair(fa, fb)
            if fail["preserving"] is None and not fwd and not _safe_pair(fb, fa):
                fail["preserving"] = [list(a), list(b)]
            if fail["monotone"] is None and not fwd:
                fail["monotone"] = [list(a), list(b)]
            if fail["canonical"] is None and (not fwd or len(fa) > len(fb)):
                fail["canonical"] = [list(a), list(b)]
    if fail["preserving"] is not None:
        return {"verdict": "none", "witness": fail["preserving"]}
    if fail["monotone"] is not None:
        return {"verdict": "preserving", "witness": fail["monotone"]}
    if fail["canonical"] is not None:
        return {"verdict": "monotone", "witness": fail["canonical"]}
    return {"verdict": "canonical", "witness": None}
