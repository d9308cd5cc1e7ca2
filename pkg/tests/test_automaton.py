from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from luzone.automaton import (
    Automaton,
    GuardAtom,
    LuBounds,
    Rel,
    Transition,
    compute_lu_bounds,
    constrain,
    initial_zone,
    successor_zone,
)
from luzone.dbm import EMPTY_ZONE, zone_includes


def atom(clock, rel, const):
    return GuardAtom(clock, Rel(rel), const)


def two_clock_automaton(transitions):
    return Automaton(
        state_names=("q0", "q1"),
        clock_names=("x", "y"),
        initial=0,
        accepting=frozenset({1}),
        transitions=tuple(transitions),
    )


def test_construction_validation():
    with pytest.raises(ValueError):
        Automaton(("q", "q"), ("x",), 0, frozenset(), ())
    with pytest.raises(ValueError):
        Automaton(("q",), ("x",), 1, frozenset(), ())
    with pytest.raises(ValueError):
        two_clock_automaton([Transition(0, 5)])
    with pytest.raises(ValueError):
        two_clock_automaton([Transition(0, 1, (atom(3, "<", 1),))])
    with pytest.raises(ValueError):
        two_clock_automaton([Transition(0, 1, (), frozenset({3}))])
    with pytest.raises(ValueError):
        GuardAtom(1, Rel.LT, -2)


def test_initial_zone_is_elapsed_origin():
    z = initial_zone(2)
    for t in (0, Fraction(3, 2), 9):
        assert z.contains_valuation((Fraction(t), Fraction(t)))
    assert not z.contains_valuation((Fraction(1), Fraction(2)))
    assert not z.contains_valuation((Fraction(-1), Fraction(-1)))


def test_constrain_golden():
    z = constrain(initial_zone(2), (atom(1, ">=", 3), atom(2, "<", 5)))
    assert z.contains_valuation((3, 3))
    assert z.contains_valuation((Fraction(9, 2), Fraction(9, 2)))
    assert not z.contains_valuation((2, 2))
    assert not z.contains_valuation((5, 5))


def test_constrain_can_empty():
    assert constrain(initial_zone(1), (atom(1, "<", 2), atom(1, ">", 2))) is EMPTY_ZONE
    assert constrain(EMPTY_ZONE, (atom(1, "<", 2),)) is EMPTY_ZONE


def test_lu_bounds_split_by_guard_side():
    a = two_clock_automaton(
        [
            Transition(0, 1, (atom(1, ">=", 4), atom(2, "<", 2))),
            Transition(1, 0, (atom(1, ">", 1), atom(1, "<=", 7)), frozenset({2})),
        ]
    )
    lu = compute_lu_bounds(a)
    assert lu.lower == (0, 4, None)
    assert lu.upper == (0, 7, 2)
    assert lu.alpha() == (0, 7, 2)


def test_lu_bounds_equality_counts_both_sides():
    # == arrives desugared as <= plus >=
    a = two_clock_automaton(
        [Transition(0, 1, (atom(1, "<=", 5), atom(1, ">=", 5)))]
    )
    lu = compute_lu_bounds(a)
    assert lu.lower == (0, 5, None)
    assert lu.upper == (0, 5, None)


def test_lu_bounds_empty_automaton():
    lu = compute_lu_bounds(two_clock_automaton([]))
    assert lu.lower == (0, None, None)
    assert lu.upper == (0, None, None)
    assert lu.alpha() == (0, 0, 0)


def test_lu_bounds_reference_clock_pinned():
    with pytest.raises(ValueError):
        LuBounds((1, None), (0, None))
    lu = LuBounds.from_pairs([2, None], [None, 3])
    assert lu.lower == (0, 2, None)
    assert lu.upper == (0, None, 3)
    assert lu.n_clocks == 2


def test_successor_golden():
    t = Transition(0, 1, (atom(1, ">=", 2),), frozenset({1}))
    z = successor_zone(initial_zone(2), t)
    # after x >= 2, x := 0, elapse: y - x >= 2 and x >= 0
    assert z.contains_valuation((0, 2))
    assert z.contains_valuation((Fraction(1, 2), 3))
    assert not z.contains_valuation((1, 2))
    assert not z.contains_valuation((0, 1))


def test_successor_empty_when_guard_unsatisfiable():
    t = Transition(0, 1, (atom(1, "<", 1), atom(2, ">", 3)))
    assert successor_zone(initial_zone(2), t) is EMPTY_ZONE


guard_atoms = st.builds(
    GuardAtom,
    st.integers(1, 2),
    st.sampled_from(list(Rel)),
    st.integers(0, 3),
)
guards = st.lists(guard_atoms, max_size=3).map(tuple)
transitions_st = st.builds(
    Transition,
    st.just(0),
    st.just(0),
    guards,
    st.sets(st.integers(1, 2)).map(frozenset),
)


@settings(max_examples=60, deadline=None)
@given(guards, guards, transitions_st)
def test_successor_is_monotone(g1, g2, t):
    za = constrain(initial_zone(2), g1 + g2)
    zb = constrain(initial_zone(2), g1)
    if za.is_empty:
        return
    assert zone_includes(za, zb)
    sa, sb = successor_zone(za, t), successor_zone(zb, t)
    assert zone_includes(sa, sb)
