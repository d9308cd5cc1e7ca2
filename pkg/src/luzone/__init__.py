"""Zone-based reachability for timed automata with lower/upper-bound abstraction.

The package answers "is an accepting state reachable?" for timed automata by
exploring zones (difference-bound matrices) and pruning with the simulation
abstraction induced by per-clock lower and upper guard bounds.  The inclusion
test at the heart of the pruning runs in quadratic time in the number of
clocks.  Entry points:

- :func:`reachability` explores an :class:`Automaton` symbolically.
- :func:`alu_includes` decides whether a zone is covered by the abstraction
  of another.
- :func:`parse_model` / :func:`print_model` read and write the text model
  format; ``cli_main`` backs the ``luzone`` command.
"""

from luzone.alu import (
    ComparisonCounter,
    alu_includes,
    alu_member_oracle,
)
from luzone.automaton import (
    Automaton,
    GuardAtom,
    LuBounds,
    Rel,
    Transition,
    compute_lu_bounds,
    initial_zone,
    successor_zone,
)
from luzone.dbm import (
    EMPTY_ZONE,
    DistanceGraph,
    EmptyZone,
    zone_includes,
)
from luzone.explorer import (
    BudgetExceededError,
    ExplorationStats,
    Inclusion,
    ReachabilityResult,
    SearchOrder,
    reachability,
)
from luzone.model_io import (
    ModelSyntaxError,
    cli_main,
    parse_model,
    print_model,
)
from luzone.weights import (
    INF_WEIGHT,
    Weight,
    WeightOverflowError,
    wle,
    wlt,
)

__all__ = [
    "Automaton",
    "BudgetExceededError",
    "ComparisonCounter",
    "DistanceGraph",
    "EMPTY_ZONE",
    "EmptyZone",
    "ExplorationStats",
    "GuardAtom",
    "INF_WEIGHT",
    "Inclusion",
    "LuBounds",
    "ModelSyntaxError",
    "ReachabilityResult",
    "Rel",
    "SearchOrder",
    "Transition",
    "Weight",
    "WeightOverflowError",
    "alu_includes",
    "alu_member_oracle",
    "cli_main",
    "compute_lu_bounds",
    "initial_zone",
    "parse_model",
    "print_model",
    "reachability",
    "successor_zone",
    "wle",
    "wlt",
    "zone_includes",
]
