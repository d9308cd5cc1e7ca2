"""The lower/upper-bound zone abstraction and its quadratic inclusion test.

The abstraction of a zone W is the set of valuations simulated into W by the
LU preorder (see :func:`luzone.regions.lu_preorder`).  Everything in this
module decides questions about that abstraction without ever materializing it:

* a partition of clocks by how a region's upper bound compares to the clock's
  lower/upper guard bounds,
* the inverse-abstraction distance graph of a region,
* a per-region inclusion test scanning variable pairs,
* the least region constraint reachable inside a zone, and
* the headline test ``Z subset-of abstraction(Z')`` in one double loop over
  variable pairs, quadratically many weight comparisons in the clock count.

``alu_member_oracle`` is the definitional fallback used by the test suite: it
intersects an explicit simulation up-set with the zone and is independent of
the pair-scan reasoning above.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from luzone.automaton import LuBounds
from luzone.dbm import DistanceGraph, entrywise_min
from luzone.regions import RegionDescriptor, Valuation, region_to_dbm, up_set_box
from luzone.weights import (
    INF_WEIGHT,
    Weight,
    weight_add,
    weight_ceil,
    weight_neg,
    wle,
    wlt,
)

__all__ = [
    "ClockPartition",
    "ComparisonCounter",
    "partition_clocks",
    "alu_inverse_graph",
    "region_in_alu",
    "min_region_weight",
    "alu_includes",
    "alu_member_oracle",
]

_LE0 = wle(0)


@dataclass(frozen=True)
class ClockPartition:
    """Disjoint classes over variables 0..n; the reference clock sits in ``b``."""

    b: frozenset[int]
    l: frozenset[int]
    u: frozenset[int]
    m: frozenset[int]


def partition_clocks(region: RegionDescriptor, lu: LuBounds) -> ClockPartition:
    """Classify variables by the region's upper-bound constant against L and U.

    With ``c`` the region's upper bound for the clock (infinite for a
    beyond-granularity tag): both bounds at least ``c`` puts the clock in
    ``b``; only the upper bound does in ``l``; only the lower bound does in
    ``u``; neither does in ``m``.  Absent bounds compare below everything.
    """
    classes: dict[str, set[int]] = {"b": {0}, "l": set(), "u": set(), "m": set()}
    for i, (kind, c) in enumerate(region.tags, start=1):
        ub: int | float = math.inf if kind == "gt" else c
        low, up = lu.lower[i], lu.upper[i]
        le_low = low is not None and ub <= low
        le_up = up is not None and ub <= up
        if le_low and le_up:
            classes["b"].add(i)
        elif le_up:
            classes["l"].add(i)
        elif le_low:
            classes["u"].add(i)
        else:
            classes["m"].add(i)
    return ClockPartition(
        frozenset(classes["b"]),
        frozenset(classes["l"]),
        frozenset(classes["u"]),
        frozenset(classes["m"]),
    )


def alu_inverse_graph(region: RegionDescriptor, lu: LuBounds) -> DistanceGraph:
    """Distance graph of the inverse abstraction of a region.

    Starts from the region's canonical graph and relaxes edges according to
    the clock partition; the result is deliberately left non-canonical.  A
    relaxed edge to the reference clock keeps the lower-bound constraint
    ``(<, -L_i)``, or disappears when the clock has no lower bound.
    """
    gr = region_to_dbm(region)
    part = partition_clocks(region, lu)
    relax_into = part.m | part.u
    relax_from = part.m | part.l
    dim = gr.dim
    rows = []
    for i in range(dim):
        row = []
        for j in range(dim):
            if j in relax_into:
                row.append(INF_WEIGHT)
            elif i in relax_from and j != 0:
                row.append(INF_WEIGHT)
            elif i in relax_from:
                low = lu.lower[i]
                row.append(INF_WEIGHT if low is None else wlt(-low))
            else:
                row.append(gr.weight(i, j))
        rows.append(row)
    return DistanceGraph.from_weights(rows)


def region_in_alu(region: RegionDescriptor, zp: DistanceGraph, lu: LuBounds) -> bool:
    """Whether the whole region lies inside the abstraction of ``zp``.

    Scans variable pairs for a short negative cycle through the inverse
    graph: one through a bounded target, one through a lower-bound edge.
    Equivalent to intersecting ``zp`` with the inverse graph, without
    building it.
    """
    if not zp.is_canonical or zp.is_empty:
        raise ValueError("region_in_alu requires a canonical nonempty zone")
    gr = region_to_dbm(region)
    part = partition_clocks(region, lu)
    bounded_target = part.b | part.u
    lower_target = part.l | part.m
    for x in part.b | part.l:
        r0x = gr.weight(0, x)
        for y in range(zp.dim):
            if y in bounded_target:
                if weight_add(zp.weight(x, y), gr.weight(y, x)) < _LE0:
                    return False
            else:
                low = lu.lower[y]
                if low is None:
                    continue
                total = weight_add(weight_add(r0x, zp.weight(x, y)), wlt(-low))
                if total < _LE0:
                    return False
    return True


def min_region_weight(
    zone: DistanceGraph, x: int, y: int, alpha: tuple[int, ...]
) -> Weight:
    """Least ``y -> x`` region constraint over regions meeting the zone.

    Infinite when the zone forces the clock beyond its granularity bound
    (every meeting region leaves ``x`` unconstrained toward ``y``).
    """
    if not zone.is_canonical or zone.is_empty:
        raise ValueError("min_region_weight requires a canonical nonempty zone")
    zx0 = zone.weight(x, 0)
    if zx0 < wle(-alpha[x]):
        return INF_WEIGHT
    terms = []
    zxy = zone.weight(x, y)
    if not zxy.is_infinite:
        terms.append(weight_ceil(weight_neg(zxy)))
    if not zx0.is_infinite:
        terms.append(weight_add(weight_ceil(weight_neg(zx0)), wlt(-alpha[y])))
    if not terms:
        raise ValueError("zone is unbounded below; no region constraint exists")
    return max(terms)


@dataclass
class ComparisonCounter:
    """Counts the weight comparisons performed by :func:`alu_includes`."""

    comparisons: int = 0


def alu_includes(
    zone: DistanceGraph,
    zp: DistanceGraph,
    lu: LuBounds,
    counter: ComparisonCounter | None = None,
) -> bool:
    """Whether ``zone`` is contained in the abstraction of ``zp``.

    A pair ``x, y`` of variables (either may be the reference clock) is a
    witness against inclusion when all three hold:

    * ``zone`` reaches below the upper bound of ``x``:  Z_x0 >= (<=, -U_x),
    * ``zp`` is strictly tighter across the pair:  Z'_xy < Z_xy,
    * the lower bound of ``y`` seals the escape:  Z'_xy + (<, -L_y) < Z_x0.

    Variables with an absent upper (as ``x``) or lower (as ``y``) bound can
    never serve in that role and are skipped.  One double loop over packed
    entries; no allocation grows with the dimension.
    """
    if zone.is_empty or zp.is_empty:
        raise ValueError("alu_includes requires nonempty zones")
    if not (zone.is_canonical and zp.is_canonical):
        raise ValueError("alu_includes requires canonical zones")
    if zone.dim != zp.dim or zone.dim != lu.n_clocks + 1:
        raise ValueError("dimension mismatch")
    mz, mzp = zone.rows(), zp.rows()
    lower, upper = lu.lower, lu.upper
    comparisons = 0
    included = True
    for x in range(zone.dim):
        ux = upper[x]
        if ux is None:
            continue
        zrow, zprow = mz[x], mzp[x]
        zx0 = zrow[0]
        comparisons += 1
        if zx0 < 1 - 2 * ux:
            continue
        for y in range(zone.dim):
            if y == x:
                continue
            ly = lower[y]
            if ly is None:
                continue
            zpxy = zprow[y]
            comparisons += 1
            if not zpxy < zrow[y]:
                continue
            comparisons += 1
            if ((zpxy >> 1) - ly) << 1 < zx0:
                included = False
                break
        if not included:
            break
    if counter is not None:
        counter.comparisons += comparisons
    return included


def alu_member_oracle(v: Valuation, zp: DistanceGraph, lu: LuBounds) -> bool:
    """Whether ``v`` is abstracted into ``zp``: up-set meets zone.

    Definitional check, independent of the pair-scan test: build the box of
    valuations simulating ``v`` (scaled to clear denominators) and intersect
    it with the zone.
    """
    if not zp.is_canonical or zp.is_empty:
        raise ValueError("alu_member_oracle requires a canonical nonempty zone")
    scale = math.lcm(*(Fraction(c).denominator for c in v)) if v else 1
    box = up_set_box(v, lu, scale)
    meet = entrywise_min(box, zp.scaled(scale)).canonicalize()
    return not meet.is_empty
