from itertools import combinations

import pytest

from ptk.errors import DuplicateMember, HorizonRequired, NotVeryLargeAtHorizon
from ptk.families import (
    F_OMEGA,
    Closure,
    DirectSum,
    Explicit,
    KSubsets,
    Schreier,
    closure,
    family_from_json,
    family_to_json,
    initial_segment_in,
    is_very_large,
    members,
    order,
    order_with_note,
    predicates,
    transform,
)
from ptk.setcore import OrdinalCNF, Window, ord_add, parse_ordinal


def _all_sets(N):
    for r in range(N + 1):
        yield from combinations(range(1, N + 1), r)


def _in_s(level, s):
    """S_level membership (finite level) by trying every split into successive pieces."""
    if not s:
        return True
    if level == 0:
        return len(s) <= 1
    if level == 1:
        return len(s) <= s[0]

    def split(rest, pieces):
        if not rest:
            return True
        if pieces == 0:
            return False
        return any(_in_s(level - 1, rest[:i]) and split(rest[i:], pieces - 1) for i in range(1, len(rest) + 1))

    return split(s, s[0])


def _maximal_in_s(level, s, N):
    return bool(s) and _in_s(level, s) and not _in_s(level, s + (s[-1] + 1,))


def test_members_examples():
    assert members(F_OMEGA, 4) == [(1,), (2, 3), (2, 4)]
    assert members(KSubsets(2), 3) == [(1, 2), (1, 3), (2, 3)]
    assert members(DirectSum(KSubsets(1), KSubsets(1)), 3) == [(1, 2), (1, 3), (2, 3)]


@pytest.mark.parametrize("level", [1, 2])
def test_schreier_members_match_definition(level):
    N = 10
    want = [s for s in _all_sets(N) if _maximal_in_s(level, s, N)]
    assert members(Schreier(OrdinalCNF.of(level)), N) == sorted(want)


def test_order_examples():
    assert order(KSubsets(2)) == OrdinalCNF.of(2)
    assert order(F_OMEGA) == parse_ordinal("w")
    assert order(Schreier(OrdinalCNF.of(2))) == parse_ordinal("w^2")
    assert order(Explicit([(1,), (2, 3)])) == OrdinalCNF.of(2)


def test_order_of_empty_family_is_flagged():
    o, note = order_with_note(Explicit([]))
    assert o == -1 and "-1" in note


def test_order_of_restriction_carries_note():
    o, note = order_with_note(transform(F_OMEGA, "restrict", window="evens:12"))
    assert o == parse_ordinal("w") and note


def test_direct_sum_order():
    syms = [KSubsets(1), KSubsets(3), F_OMEGA, Schreier(OrdinalCNF.of(2))]
    for G in syms:
        for F in syms:
            assert order(DirectSum(G, F)) == ord_add(order(F), order(G))


def test_closure_examples():
    assert closure(Explicit([(2, 4)]), 4) == [(), (2,), (2, 4)]
    assert set(closure(F_OMEGA, 3)) == {(), (1,), (2,), (3,), (2, 3)}
    assert closure(Explicit([]), 3) == []


def test_predicates_examples():
    rep = predicates(F_OMEGA, 8)
    assert rep["thin"]["verdict"] == "yes" and rep["regular_thin"]["verdict"] == "yes"
    rep = predicates(Explicit([(1,), (1, 2)]), 3)
    assert rep["thin"] == {"verdict": "no", "witness": [[1], [1, 2]]}
    rep = predicates(KSubsets(2), 6)
    assert rep["thin"]["verdict"] == "yes" and rep["spreading"]["verdict"] == "yes"


def test_explicit_rejects_duplicates():
    with pytest.raises(DuplicateMember):
        Explicit([(1, 2), (1, 2)])


def test_transform_examples():
    d = transform(F_OMEGA, "derived_at", n=2)
    assert [s for s in members(d, 6) if s[0] >= 3] == [(3,), (4,), (5,), (6,)]
    p = transform(KSubsets(2), "preimage", window="evens:10")
    assert members(p, 3) == [(1, 2), (1, 3), (2, 3)]
    # F_ω/_L with L the identity: the empty quotient (s = {1}) is the least member
    q = transform(F_OMEGA, "quotient", window="identity:12")
    assert q.contains(())


def test_section_and_shift():
    sec = transform(F_OMEGA, "section", t=(3,))
    assert members(sec, 5) == [(3, 4, 5)]
    sh = transform(KSubsets(1), "shift", window="evens:5")
    assert members(sh, 10) == [(2,), (4,), (6,), (8,), (10,)]


def test_restriction_needs_horizon():
    r = transform(KSubsets(2), "restrict", window="evens:3")
    with pytest.raises(HorizonRequired):
        members(r, 10)


@pytest.mark.parametrize("F", [KSubsets(2), KSubsets(3), F_OMEGA, Schreier(OrdinalCNF.of(2))])
def test_closure_commutes_with_restriction(F):
    L = Window.odds(6)
    N = 11
    lhs = set(closure(transform(F, "restrict", window=L), N))
    rhs = {t for t in closure(F, N) if all(v in L for v in t)}
    assert lhs == rhs
    # maximal elements of the restricted closure are the restricted members,
    # up to sets cut short by the window's end
    maximal = {t for t in rhs if not any(u != t and u[: len(t)] == t for u in rhs)}
    restricted = set(members(transform(F, "restrict", window=L), N))
    assert restricted <= maximal
    assert all(t and t[-1] == L(L.horizon) for t in maximal - restricted)


@pytest.mark.parametrize("F", [KSubsets(2), F_OMEGA])
def test_preimage_keeps_order(F):
    assert order(transform(F, "preimage", window="odds:20")) == order(F)


def test_initial_segment_in_examples():
    assert initial_segment_in(F_OMEGA, Window.arithmetic(3, 2, 10)) == (3, 5, 7)
    assert initial_segment_in(KSubsets(2), Window.identity(5)) == (1, 2)
    assert initial_segment_in(F_OMEGA, Window.identity(5)) == (1,)
    with pytest.raises(NotVeryLargeAtHorizon):
        initial_segment_in(KSubsets(4), Window.identity(3))


def test_is_very_large_examples():
    assert is_very_large(F_OMEGA, Window.identity(12))["verdict"] == "yes"
    assert is_very_large(Explicit([(1,)]), Window.identity(5))["verdict"] == "no"
    assert is_very_large(KSubsets(3), Window.identity(2))["verdict"] == "unknown-at-horizon"


def test_family_json_round_trip():
    docs = [
        {"kind": "k_subsets", "k": 2},
        {"kind": "schreier", "xi": "w"},
        {"kind": "explicit", "sets": [[1], [2, 3]]},
        {"kind": "restrict", "base": {"kind": "k_subsets", "k": 1}, "window": [2, 4, 6]},
        {"kind": "direct_sum", "left": {"kind": "k_subsets", "k": 1}, "right": {"kind": "schreier", "xi": "1"}},
        {"kind": "derived_at", "base": {"kind": "schreier", "xi": "1"}, "n": 2},
        {"kind": "section", "base": {"kind": "schreier", "xi": "1"}, "t": [1, 3]},
        {"kind": "quotient", "base": {"kind": "schreier", "xi": "1"}, "window": list(range(1, 13))},
        {"kind": "closure", "base": {"kind": "k_subsets", "k": 2}},
    ]
    for d in docs:
        F = family_from_json(d)
        assert family_to_json(family_from_json(family_to_json(F))) == family_to_json(F)
        assert members(family_from_json(family_to_json(F)), 6) == members(F, 6)


def test_closure_family_is_hereditary():
    C = Closure(F_OMEGA)
    ms = set(members(C, 7))
    assert all(s[:k] in ms for s in ms for k in range(len(s)))
