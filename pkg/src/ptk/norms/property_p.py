"""Bounded search for property 𝒫 violations: k blocks of norm ≥ δ summing to norm ≤ 1."""

from __future__ import annotations

from fractions import Fraction
from typing import List, Optional

from .evaluators import norm
from .spaces import SpaceDesc, SpaceVec, phi_key
from .values import Surd, value_mpf, value_str


def _at_most_one(v) -> bool:
    if isinstance(v, Surd):
        return v <= 1
    return value_mpf(v) <= 1


def property_p_witness(
    space: SpaceDesc,
    delta,
    k: int,
    budget: int = 20_000,
    max_n: Optional[int] = None,
) -> dict:
    """Search δ-multiples of basis vectors, successive in the basis order.

    Basis vectors are 1-norming in every space here, so each block has norm
    exactly δ.  Norms only grow as coordinates are added, so a branch is cut
    as soon as its partial sum exceeds 1.  ``none`` means nothing was found
    within the budget and the horizon ``max_n`` (default k + 4).
    """
    delta = Fraction(delta)
    if max_n is None:
        max_n = k + 4
    coords = sorted(space.coordinates(max_n), key=phi_key)
    chosen: List = []
    nodes = [0]

    def fits(extra) -> bool:
        nodes[0] += 1
        x = SpaceVec(space, {t: delta for t in chosen + [extra]}, check=False)
        return _at_most_one(norm(x).upper)

    def rec(cands) -> Optional[List]:
        # every candidate already fits with ``chosen``; a coordinate that fails
        # at some node fails in the whole subtree
        if len(chosen) == k:
            return list(chosen)
        for i, c in enumerate(cands):
            if nodes[0] >= budget:
                return None
            chosen.append(c)
            rest = [d for d in cands[i + 1 :] if nodes[0] < budget and fits(d)]
            if len(rest) >= k - len(chosen):
                got = rec(rest)
                if got is not None:
                    return got
            elif len(chosen) == k:
                return list(chosen)
            chosen.pop()
        return None

    found = None
    if k >= 1 and delta > 0:
        got = rec([c for c in coords if fits(c)])
        if got is not None:
            found = SpaceVec(space, {t: delta for t in got}, check=False)
    out = {"max_n": max_n, "status": "found" if found is not None else "none", "checked": nodes[0], "delta": str(delta), "k": k}
    if found is not None:
        res = norm(found)
        out["blocks"] = [{"set": list(s), "coeff": str(delta)} for s in found.entries]
        out["norm"] = value_str(res.upper)
    return out
