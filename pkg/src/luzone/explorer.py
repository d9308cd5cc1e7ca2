"""Forward reachability over the zone graph with pluggable subsumption.

The worklist starts from the initial state with the time elapse of the zero
valuation and repeatedly pops a node: accepting states win immediately, then
the node is dropped if an already stored zone at the same control state
subsumes it, and otherwise it is stored and its successors pushed.  Zones
stay canonical and time-elapsed throughout.

Subsumption is a pluggable capability: exact equality, plain zone inclusion,
or inclusion in the lower/upper-bound abstraction of a stored zone.  The last
one makes the search finite on every automaton; the others may need the node
budget.  Statistics are deterministic for a fixed search order because
transitions are explored in declaration order.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, field

from luzone.alu import alu_includes
from luzone.automaton import (
    Automaton,
    LuBounds,
    Transition,
    compute_lu_bounds,
    initial_zone,
    successor_zone,
)
from luzone.dbm import DistanceGraph, zone_includes

__all__ = [
    "Inclusion",
    "SearchOrder",
    "ExplorationStats",
    "ReachabilityResult",
    "BudgetExceededError",
    "reachability",
]


class Inclusion(enum.Enum):
    """How a new zone may be subsumed by a stored one at the same state."""

    NONE = "none"
    SUBSET = "subset"
    ALU = "alu"


class SearchOrder(enum.Enum):
    BFS = "bfs"
    DFS = "dfs"


@dataclass
class ExplorationStats:
    nodes_visited: int = 0
    nodes_subsumed: int = 0
    inclusion_tests: int = 0
    max_waiting: int = 0


@dataclass(frozen=True)
class ReachabilityResult:
    reachable: bool
    stats: ExplorationStats
    trace: tuple[Transition, ...] | None = None

    def summary_line(self) -> str:
        verdict = "R" if self.reachable else "U"
        s = self.stats
        return (
            f"verdict={verdict} visited={s.nodes_visited}"
            f" subsumed={s.nodes_subsumed} tests={s.inclusion_tests}"
        )


class BudgetExceededError(Exception):
    """Search stopped by the node budget; carries the statistics so far."""

    def __init__(self, budget: int, stats: ExplorationStats):
        super().__init__(f"node budget of {budget} exhausted")
        self.budget = budget
        self.stats = stats


@dataclass
class _Node:
    state: int
    zone: DistanceGraph
    parent: "_Node | None" = None
    via: Transition | None = None


def _subsumed(
    zone: DistanceGraph,
    stored: list[DistanceGraph],
    inclusion: Inclusion,
    lu: LuBounds,
    stats: ExplorationStats,
) -> bool:
    for old in stored:
        stats.inclusion_tests += 1
        if inclusion is Inclusion.ALU:
            if alu_includes(zone, old, lu):
                return True
        elif inclusion is Inclusion.SUBSET:
            if zone_includes(zone, old):
                return True
        else:
            if zone == old:
                return True
    return False


def _trace_of(node: _Node) -> tuple[Transition, ...]:
    steps = []
    while node.via is not None:
        steps.append(node.via)
        assert node.parent is not None
        node = node.parent
    return tuple(reversed(steps))


def reachability(
    automaton: Automaton,
    inclusion: Inclusion = Inclusion.ALU,
    search_order: SearchOrder = SearchOrder.BFS,
    trace: bool = False,
    budget: int = 100_000,
) -> ReachabilityResult:
    """Decide whether an accepting state is reachable.

    Raises :class:`BudgetExceededError` after popping more than ``budget``
    nodes; with the abstraction-based inclusion the search is finite and the
    default budget is generous.
    """
    lu = compute_lu_bounds(automaton)
    stats = ExplorationStats()
    waiting: deque[_Node] = deque([_Node(automaton.initial, initial_zone(automaton.n_clocks))])
    stored: dict[int, list[DistanceGraph]] = {}
    stats.max_waiting = 1
    while waiting:
        node = waiting.popleft() if search_order is SearchOrder.BFS else waiting.pop()
        stats.nodes_visited += 1
        if stats.nodes_visited > budget:
            raise BudgetExceededError(budget, stats)
        assert node.zone.is_canonical and node.zone.time_elapse() == node.zone
        if node.state in automaton.accepting:
            return ReachabilityResult(
                True, stats, _trace_of(node) if trace else None
            )
        bucket = stored.setdefault(node.state, [])
        if _subsumed(node.zone, bucket, inclusion, lu, stats):
            stats.nodes_subsumed += 1
            continue
        bucket.append(node.zone)
        for transition in automaton.transitions_from(node.state):
            succ = successor_zone(node.zone, transition)
            if succ.is_empty:
                continue
            waiting.append(_Node(transition.target, succ, node, transition))
        stats.max_waiting = max(stats.max_waiting, len(waiting))
    return ReachabilityResult(False, stats, None)
