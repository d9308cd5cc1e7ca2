"""Timed automata with diagonal-free guards, and their symbolic semantics.

An automaton has finitely many control states, clocks named ``x1..xn`` by the
user and indexed ``1..n`` internally, and transitions carrying a guard (a
conjunction of atoms ``clock rel const`` with ``rel`` one of ``< <= >= >`` and a
nonnegative integer constant) plus a set of clocks to reset.  Equality guards
are expressed as the pair ``<=`` and ``>=``; the surface syntax desugars ``==``
before it gets here.

The symbolic post runs guard, reset, then time elapse on zones from
:mod:`luzone.dbm`, so every reachable zone is closed under time elapse.  The
lower/upper guard-bound map feeding the abstraction machinery is computed per
clock over the whole automaton.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

from luzone.dbm import EMPTY_ZONE, DistanceGraph, Zone
from luzone.weights import Weight, wle, wlt

__all__ = [
    "Rel",
    "GuardAtom",
    "Guard",
    "Transition",
    "Automaton",
    "LuBounds",
    "guard_updates",
    "constrain",
    "compute_lu_bounds",
    "initial_zone",
    "successor_zone",
]


class Rel(enum.Enum):
    LT = "<"
    LE = "<="
    GE = ">="
    GT = ">"

    @property
    def is_upper(self) -> bool:
        return self in (Rel.LT, Rel.LE)


@dataclass(frozen=True)
class GuardAtom:
    """One conjunct ``clock rel const``; ``clock`` is a 1-based index."""

    clock: int
    rel: Rel
    const: int

    def __post_init__(self) -> None:
        if self.clock < 1:
            raise ValueError(f"clock index must be positive: {self.clock}")
        if not isinstance(self.const, int) or self.const < 0:
            raise ValueError(f"guard constant must be a nonnegative integer: {self.const!r}")


Guard = tuple[GuardAtom, ...]


@dataclass(frozen=True)
class Transition:
    source: int
    target: int
    guard: Guard = ()
    resets: frozenset[int] = frozenset()


@dataclass(frozen=True)
class Automaton:
    """States are indices into ``state_names``; clock ``i`` is ``clock_names[i-1]``."""

    state_names: tuple[str, ...]
    clock_names: tuple[str, ...]
    initial: int
    accepting: frozenset[int]
    transitions: tuple[Transition, ...]

    def __post_init__(self) -> None:
        n_states = len(self.state_names)
        if len(set(self.state_names)) != n_states:
            raise ValueError("duplicate state names")
        if len(set(self.clock_names)) != len(self.clock_names):
            raise ValueError("duplicate clock names")
        if not 0 <= self.initial < n_states:
            raise ValueError("initial state out of range")
        if not all(0 <= q < n_states for q in self.accepting):
            raise ValueError("accepting state out of range")
        for t in self.transitions:
            if not (0 <= t.source < n_states and 0 <= t.target < n_states):
                raise ValueError(f"transition endpoints out of range: {t}")
            for atom in t.guard:
                if atom.clock > self.n_clocks:
                    raise ValueError(f"guard clock out of range: {atom}")
            if any(not 1 <= x <= self.n_clocks for x in t.resets):
                raise ValueError(f"reset clock out of range: {t}")

    @property
    def n_clocks(self) -> int:
        return len(self.clock_names)

    @property
    def dim(self) -> int:
        return self.n_clocks + 1

    def transitions_from(self, state: int) -> tuple[Transition, ...]:
        """Outgoing transitions of ``state`` in declaration order."""
        return tuple(t for t in self.transitions if t.source == state)


@dataclass(frozen=True)
class LuBounds:
    """Per-clock maximal lower and upper guard constants.

    ``lower[x]`` / ``upper[x]`` is ``None`` when no guard of that kind mentions
    clock ``x`` (the minus-infinity bound).  Index 0 is the reference clock and
    carries bound 0 on both sides.
    """

    lower: tuple[int | None, ...]
    upper: tuple[int | None, ...]

    def __post_init__(self) -> None:
        if len(self.lower) != len(self.upper):
            raise ValueError("lower/upper length mismatch")
        if not self.lower or self.lower[0] != 0 or self.upper[0] != 0:
            raise ValueError("reference clock must carry bound 0")

    @classmethod
    def from_pairs(
        cls, lower: Sequence[int | None], upper: Sequence[int | None]
    ) -> "LuBounds":
        """Build from per-clock sequences that start at clock 1."""
        return cls((0, *lower), (0, *upper))

    @property
    def n_clocks(self) -> int:
        return len(self.lower) - 1

    def alpha(self) -> tuple[int, ...]:
        """Per-clock region bound ``max(lower, upper, 0)``."""
        return tuple(
            max(lo if lo is not None else 0, up if up is not None else 0)
            for lo, up in zip(self.lower, self.upper)
        )


def guard_updates(guard: Guard) -> list[tuple[int, int, Weight]]:
    """Distance-graph edge tightenings equivalent to a guard."""
    updates = []
    for atom in guard:
        if atom.rel is Rel.LT:
            updates.append((0, atom.clock, wlt(atom.const)))
        elif atom.rel is Rel.LE:
            updates.append((0, atom.clock, wle(atom.const)))
        elif atom.rel is Rel.GE:
            updates.append((atom.clock, 0, wle(-atom.const)))
        else:
            updates.append((atom.clock, 0, wlt(-atom.const)))
    return updates


def constrain(zone: Zone, guard: Guard) -> Zone:
    """Intersect a zone with a guard; may return :data:`EMPTY_ZONE`."""
    if zone.is_empty:
        return zone
    return zone.constrained(guard_updates(guard))


def compute_lu_bounds(automaton: Automaton) -> LuBounds:
    """Maximal lower/upper guard constants per clock across all transitions."""
    n = automaton.n_clocks
    lower: list[int | None] = [None] * (n + 1)
    upper: list[int | None] = [None] * (n + 1)
    for t in automaton.transitions:
        for atom in t.guard:
            side = upper if atom.rel.is_upper else lower
            prev = side[atom.clock]
            if prev is None or atom.const > prev:
                side[atom.clock] = atom.const
    lower[0] = upper[0] = 0
    return LuBounds(tuple(lower), tuple(upper))


def initial_zone(n_clocks: int) -> DistanceGraph:
    """Time elapse of the all-zeros point: the diagonal ``x1 = .. = xn >= 0``."""
    dim = n_clocks + 1
    origin = DistanceGraph.from_weights(
        [[wle(0)] * dim for _ in range(dim)]
    ).canonicalize()
    assert isinstance(origin, DistanceGraph)
    return origin.time_elapse()


def successor_zone(zone: DistanceGraph, transition: Transition) -> Zone:
    """Guard, reset, then time elapse.  :data:`EMPTY_ZONE` if the guard cuts to nothing."""
    guarded = constrain(zone, transition.guard)
    if guarded.is_empty:
        return EMPTY_ZONE
    return guarded.reset(transition.resets).time_elapse()
