"""Weighted set packing by depth-first branch and bound.

Items carry non-negative weights.  A solution is a family of disjoint
blocks, each valid under ``block_ok``, and the objective is Σ g(W_b) for a
convex increasing g with g(0) = 0, where W_b is the block weight.  When
``conflict`` is given, items may also be left out, and no two chosen items
may conflict.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence


@dataclass
class PackResult:
    best: object
    blocks: List[List[int]]
    upper: object
    complete: bool
    nodes: int


class _OutOfBudget(Exception):
    pass


def pack(
    weights: Sequence,
    block_ok: Callable[[List[int]], bool],
    g: Callable,
    conflict: Optional[Callable[[int, int], bool]] = None,
    max_blocks: Optional[int] = None,
    hint: Optional[List[List[int]]] = None,
    budget: int = 2_000_000,
) -> PackResult:
    """Maximise Σ g(W_b).  Item indices refer to ``weights``.

    ``block_ok(items)`` must be hereditary: subsets of valid blocks are valid.
    ``hint`` seeds the incumbent and is ignored if invalid.
    """
    n = len(weights)
    zero = weights[0] * 0 if n else 0
    order = sorted(range(n), key=lambda i: (-weights[i], i))
    suffix = [zero] * (n + 1)
    for pos in range(n - 1, -1, -1):
        suffix[pos] = suffix[pos + 1] + weights[order[pos]]
    can_skip = conflict is not None or max_blocks is not None

    def score(blocks):
        return sum((g(sum((weights[i] for i in b), zero)) for b in blocks), g(zero))

    def valid(blocks):
        seen = [i for b in blocks for i in b]
        if len(set(seen)) != len(seen) or any(not block_ok(sorted(b)) for b in blocks):
            return False
        if max_blocks is not None and len(blocks) > max_blocks:
            return False
        if conflict is None:
            return len(seen) == n
        return all(not conflict(a, b) for x, a in enumerate(seen) for b in seen[x + 1 :])

    best_val = g(zero)
    best_blocks: List[List[int]] = []
    if hint and valid(hint) and score(hint) > best_val:
        best_val, best_blocks = score(hint), [sorted(b) for b in hint]
    greedy = _greedy(order, weights, block_ok, conflict, max_blocks, zero)
    if greedy is not None and score(greedy) > best_val:
        best_val, best_blocks = score(greedy), greedy

    blocks: List[List[int]] = []
    loads: List = []
    chosen: List[int] = []
    stack_bounds: List = []
    nodes = [0]

    def rec(pos, current):
        nonlocal best_val, best_blocks
        nodes[0] += 1
        if nodes[0] > budget:
            raise _OutOfBudget
        if pos == n:
            if current > best_val:
                best_val = current
                best_blocks = [sorted(b) for b in blocks]
            return
        wmax = max(loads, default=zero)
        bound = current + g(wmax + suffix[pos]) - g(wmax)
        if not bound > best_val:
            return
        stack_bounds.append(bound)
        i = order[pos]
        w = weights[i]
        ok = conflict is None or all(not conflict(i, j) for j in chosen)
        if ok:
            chosen.append(i)
            for b in range(len(blocks)):
                blocks[b].append(i)
                if block_ok(sorted(blocks[b])):
                    old = loads[b]
                    loads[b] = old + w
                    rec(pos + 1, current - g(old) + g(old + w))
                    loads[b] = old
                blocks[b].pop()
            if max_blocks is None or len(blocks) < max_blocks:
                blocks.append([i])
                loads.append(w)
                rec(pos + 1, current + g(w))
                blocks.pop()
                loads.pop()
            chosen.pop()
        if can_skip:
            rec(pos + 1, current)
        stack_bounds.pop()

    try:
        rec(0, g(zero))
    except _OutOfBudget:
        upper = max([best_val] + stack_bounds)
        return PackResult(best_val, best_blocks, upper, False, nodes[0])
    return PackResult(best_val, best_blocks, best_val, True, nodes[0])


def _greedy(order, weights, block_ok, conflict, max_blocks, zero):
    blocks: List[List[int]] = []
    chosen: List[int] = []
    for i in order:
        if conflict is not None and any(conflict(i, j) for j in chosen):
            continue
        placed = False
        for b in blocks:
            if block_ok(sorted(b + [i])):
                b.append(i)
                placed = True
                break
        if not placed:
            if max_blocks is not None and len(blocks) >= max_blocks:
                continue
            blocks.append([i])
        chosen.append(i)
    if conflict is None and max_blocks is None and len(chosen) != len(order):
        return None
    return [sorted(b) for b in blocks]
