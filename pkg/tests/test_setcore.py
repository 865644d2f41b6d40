import random
from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ptk.errors import EmptyBase, IndexBeyondHorizon, OutOfRange
from ptk.setcore import (
    OrdinalCNF,
    Window,
    apply_set,
    format_finset,
    initial_segment,
    is_initial_segment,
    ord_add,
    parse_finset,
    parse_ordinal,
    parse_window,
    set_quotient,
)


def test_apply_set_examples():
    assert apply_set(Window.evens(8), (1, 3)) == (2, 6)
    assert apply_set(Window.identity(10), (4, 7)) == (4, 7)
    assert apply_set(Window.arithmetic(3, 2, 10), (2, 3)) == (5, 7)


def test_apply_set_past_horizon():
    with pytest.raises(IndexBeyondHorizon):
        apply_set(Window.evens(4), (1, 5))
    with pytest.raises(IndexBeyondHorizon):
        Window.identity(3)(4)


def test_apply_set_monotone():
    L = Window.odds(9)
    for r in range(5):
        for t in combinations(range(1, 10), r):
            for k in range(len(t) + 1):
                s = t[:k]
                assert is_initial_segment(apply_set(L, s), apply_set(L, t))


def test_initial_segment():
    assert initial_segment((3, 7, 9), 2) == (3, 7)
    assert initial_segment((3, 7, 9), 0) == ()
    assert initial_segment((5,), 1) == (5,)
    with pytest.raises(OutOfRange):
        initial_segment((5,), 2)


def test_set_quotient():
    assert set_quotient((2, 5), (3, 6)) == (3,)
    assert set_quotient((9,), (3, 6)) == (3, 6)
    assert set_quotient((1,), (3, 6)) == ()
    with pytest.raises(EmptyBase):
        set_quotient((), (3, 6))
    rng = random.Random(4)
    for _ in range(200):
        s1 = tuple(sorted(rng.sample(range(1, 15), rng.randint(1, 4))))
        s2 = tuple(sorted(rng.sample(range(1, 15), rng.randint(0, 5))))
        assert is_initial_segment(set_quotient(s1, s2), s2)


def test_ord_add_examples():
    w = parse_ordinal
    assert str(ord_add(w("w"), w("3"))) == "w+3"
    assert ord_add(w("3"), w("w")) == w("w")
    assert ord_add(w("w*2+1"), w("w^2")) == w("w^2")


def test_ordinal_text_round_trip():
    for text in ["0", "7", "w", "w+4", "w^2*3+w+4", "w^3*2+w^2"]:
        assert str(parse_ordinal(text)) == text
    assert parse_ordinal("ω^2") == OrdinalCNF.omega_power(2)


def test_ordinal_order():
    w = parse_ordinal
    assert w("5") < w("w") < w("w+1") < w("w*2") < w("w^2")


def test_finset_text():
    assert parse_finset("1,3,7") == (1, 3, 7)
    assert format_finset((1, 3, 7)) == "1,3,7"
    with pytest.raises(ValueError):
        parse_finset("3,1")


def test_window_specs():
    assert parse_window("evens:3").elems == (2, 4, 6)
    assert parse_window([2, 5, 9]).elems == (2, 5, 9)
    assert parse_window("2,5,9").horizon == 3


# Oracle for addition: the ordinal written as its non-increasing list of
# w^e summands; a summand followed by a larger one is absorbed.
def _expand(a):
    return [e for e, c in a.terms for _ in range(c)]


def _oracle_add(a, b):
    seq = _expand(a) + _expand(b)
    kept = [e for i, e in enumerate(seq) if all(e >= f for f in seq[i + 1 :])]
    terms = []
    for e in kept:
        if terms and terms[-1][0] == e:
            terms[-1][1] += 1
        else:
            terms.append([e, 1])
    return OrdinalCNF(tuple((e, c) for e, c in terms))


ordinals = st.lists(
    st.tuples(st.integers(0, 4), st.integers(1, 3)), max_size=4
).map(lambda ts: OrdinalCNF(tuple(sorted({e: c for e, c in ts}.items(), reverse=True))))


@settings(max_examples=1000, deadline=None)
@given(ordinals, ordinals, ordinals)
def test_ord_add_associative(a, b, c):
    assert ord_add(ord_add(a, b), c) == ord_add(a, ord_add(b, c))
    assert ord_add(a, b) == _oracle_add(a, b)
