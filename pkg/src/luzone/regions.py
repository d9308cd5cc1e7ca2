"""Valuation-level simulation machinery: the LU preorder, its up-sets, the
induced valuation equivalence, guard test sequences, and classical clock
regions at a per-clock granularity.

Valuations are tuples of nonnegative rationals (``Fraction`` or ``int``),
position ``i`` holding clock ``i+1``.  Lower/upper guard bounds come from
:class:`luzone.automaton.LuBounds`; a ``None`` bound means no guard of that
kind exists, which every comparison treats as minus infinity.

Regions are described by a per-clock interval tag (``=c``, ``(c-1,c)`` or
``>alpha``) plus the ordering of fractional parts among the open-interval
clocks, grouped into blocks of equal fraction, listed in increasing order.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from luzone.automaton import Guard, GuardAtom, LuBounds, Rel
from luzone.dbm import DistanceGraph, Zone, entrywise_min
from luzone.weights import wle, wlt

__all__ = [
    "Valuation",
    "GuardSequence",
    "lu_preorder",
    "up_set_box",
    "rlu_contains",
    "build_test_sequence",
    "executable_from",
    "RegionDescriptor",
    "region_of",
    "region_to_dbm",
    "region_representative",
    "describe_region",
    "all_region_descriptors",
    "enumerate_regions_intersecting",
]

Valuation = tuple[Fraction | int, ...]
GuardSequence = tuple[Guard, ...]


def _floor(w: Fraction | int) -> int:
    return math.floor(w)


def _frac(w: Fraction | int) -> Fraction:
    return Fraction(w) - _floor(w)


def lu_preorder(v: Valuation, vp: Valuation, lu: LuBounds) -> bool:
    """Whether ``v`` is simulated by ``vp`` under the lower/upper bound rules.

    For every clock: if ``vp`` is below ``v`` it must still exceed the lower
    bound, and if above, ``v`` must already exceed the upper bound.  Absent
    bounds make the corresponding condition vacuous.
    """
    for x in range(1, lu.n_clocks + 1):
        a, b = v[x - 1], vp[x - 1]
        if b < a:
            low = lu.lower[x]
            if low is not None and not b > low:
                return False
        elif b > a:
            up = lu.upper[x]
            if up is not None and not a > up:
                return False
    return True


def up_set_box(v: Valuation, lu: LuBounds, scale: int = 1) -> DistanceGraph:
    """The set of valuations simulating ``v``, as a per-clock box.

    The box can have rational corners at the coordinates of ``v``, so it is
    materialized in coordinates multiplied by ``scale``, which must clear all
    denominators of ``v``.  Intersect only with zones scaled the same way.
    """
    updates = []
    for x in range(1, lu.n_clocks + 1):
        w = Fraction(v[x - 1]) * scale
        if w.denominator != 1:
            raise ValueError(f"scale {scale} does not clear denominator of clock {x}")
        w = int(w)
        low, up = lu.lower[x], lu.upper[x]
        if up is not None and v[x - 1] <= up:
            updates.append((0, x, wle(w)))
        if low is not None and v[x - 1] <= low:
            updates.append((x, 0, wle(-w)))
        elif low is not None:
            updates.append((x, 0, wlt(-low * scale)))
        else:
            updates.append((x, 0, wle(0)))
    box = DistanceGraph.top(lu.n_clocks + 1).constrained(updates)
    assert isinstance(box, DistanceGraph)  # contains v itself
    return box


def rlu_contains(v: Valuation, vp: Valuation, lu: LuBounds) -> bool:
    """Whether ``vp`` lies in the valuation neighbourhood induced by ``v``.

    Two checks.  (a) Guard preservation: every lower-threshold guard (``> c``
    or ``>= c`` with ``c`` up to the clock's lower bound) and every
    upper-threshold guard (``< c`` / ``<= c`` up to the upper bound) satisfied
    by ``v`` is satisfied by ``vp``.  (b) Fractional order: for clocks with
    matching integer parts in ``v`` and ``vp``, the fractional order of an
    upper-relevant clock against a lower-relevant clock is preserved, strict
    to strict and equal to at-most.
    """
    n = lu.n_clocks
    for x in range(1, n + 1):
        a, b = v[x - 1], vp[x - 1]
        low, up = lu.lower[x], lu.upper[x]
        if low is not None:
            for c in range(0, low + 1):
                if a > c and not b > c:
                    return False
                if a >= c and not b >= c:
                    return False
        if up is not None:
            for c in range(0, up + 1):
                if a < c and not b < c:
                    return False
                if a <= c and not b <= c:
                    return False
    for x in range(1, n + 1):
        up = lu.upper[x]
        if up is None or v[x - 1] > up or _floor(v[x - 1]) != _floor(vp[x - 1]):
            continue
        for y in range(1, n + 1):
            if y == x:
                continue
            low = lu.lower[y]
            if low is None or v[y - 1] > low or _floor(v[y - 1]) != _floor(vp[y - 1]):
                continue
            fx, fy = _frac(v[x - 1]), _frac(v[y - 1])
            gx, gy = _frac(vp[x - 1]), _frac(vp[y - 1])
            if fx < fy and not gx < gy:
                return False
            if fx == fy and not gx <= gy:
                return False
    return True


def build_test_sequence(v: Valuation, lu: LuBounds) -> GuardSequence:
    """Guard sequence characterizing the neighbourhood of ``v``.

    First the conjunction of the tightest threshold guards ``v`` satisfies,
    then one guard per lower-relevant clock in decreasing fractional order,
    pairing it against every other upper-relevant clock: strict next-integer
    constraints when the fractions differ, weak ones when they tie.
    """
    n = lu.n_clocks
    g_int: list[GuardAtom] = []
    for x in range(1, n + 1):
        w = v[x - 1]
        low, up = lu.lower[x], lu.upper[x]
        if low is not None:
            k = min(_floor(w), low)
            if w > k:
                g_int.append(GuardAtom(x, Rel.GT, k))
            elif k > 0:
                g_int.append(GuardAtom(x, Rel.GE, k))
        if up is not None and w <= up:
            c = -_floor(-Fraction(w))
            if w == c:
                g_int.append(GuardAtom(x, Rel.LE, c))
            else:
                g_int.append(GuardAtom(x, Rel.LT, c))
    sequence: list[Guard] = [tuple(g_int)]
    lower_relevant = [
        y for y in range(1, n + 1)
        if lu.lower[y] is not None and v[y - 1] <= lu.lower[y]
    ]
    lower_relevant.sort(key=lambda y: (_frac(v[y - 1]), y), reverse=True)
    for y in lower_relevant:
        atoms: list[GuardAtom] = []
        fy = _frac(v[y - 1])
        for x in range(1, n + 1):
            if x == y or lu.upper[x] is None or v[x - 1] > lu.upper[x]:
                continue
            fx = _frac(v[x - 1])
            if fx < fy:
                atoms.append(GuardAtom(x, Rel.LT, _floor(v[x - 1]) + 1))
                atoms.append(GuardAtom(y, Rel.GT, _floor(v[y - 1]) + 1))
            elif fx == fy:
                atoms.append(GuardAtom(x, Rel.LE, _floor(v[x - 1]) + 1))
                atoms.append(GuardAtom(y, Rel.GE, _floor(v[y - 1]) + 1))
        deduped = tuple(dict.fromkeys(atoms))
        sequence.append(deduped)
    return tuple(sequence)


def executable_from(vp: Valuation, sequence: GuardSequence) -> bool:
    """Whether delays ``0 <= d_0 <= d_1 <= ..`` can satisfy the guards in order.

    Greedy exact-rational sweep: each guard confines the cumulative delay to
    an interval; advancing to the interval's lower end is always optimal, so
    one pass with an (open/closed) running lower bound decides the question.
    """
    lo = Fraction(0)
    lo_strict = False
    for guard in sequence:
        hi: Fraction | None = None
        hi_strict = False
        for atom in guard:
            d = Fraction(atom.const) - Fraction(vp[atom.clock - 1])
            if atom.rel.is_upper:
                strict = atom.rel is Rel.LT
                if hi is None or d < hi or (d == hi and strict):
                    hi, hi_strict = d, strict
            else:
                strict = atom.rel is Rel.GT
                if d > lo or (d == lo and strict):
                    lo, lo_strict = d, strict
        if hi is not None:
            if lo > hi or (lo == hi and (lo_strict or hi_strict)):
                return False
    return True


@dataclass(frozen=True)
class RegionDescriptor:
    """One clock region: per-clock tags plus fractional-part ordering.

    ``tags[i]`` describes clock ``i+1`` as ``("eq", c)``, ``("open", c)``
    meaning the interval ``(c-1, c)``, or ``("gt", a)`` meaning beyond the
    granularity bound ``a``.  ``frac_blocks`` lists the open-interval clocks
    grouped by equal fractional part, in increasing fractional order.
    """

    tags: tuple[tuple[str, int], ...]
    frac_blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        open_clocks = set()
        for i, (kind, c) in enumerate(self.tags, start=1):
            if kind == "eq":
                if c < 0:
                    raise ValueError(f"negative equality tag on clock {i}")
            elif kind == "open":
                if c < 1:
                    raise ValueError(f"open interval tag needs c >= 1 on clock {i}")
                open_clocks.add(i)
            elif kind == "gt":
                if c < 0:
                    raise ValueError(f"negative granularity bound on clock {i}")
            else:
                raise ValueError(f"unknown tag kind {kind!r}")
        listed = [x for block in self.frac_blocks for x in block]
        if sorted(listed) != sorted(open_clocks) or len(listed) != len(set(listed)):
            raise ValueError("fractional order must cover the open-interval clocks exactly")
        if any(not block for block in self.frac_blocks):
            raise ValueError("empty fractional block")

    @property
    def n_clocks(self) -> int:
        return len(self.tags)


def region_of(v: Valuation, alpha: Sequence[int]) -> RegionDescriptor:
    """The unique region descriptor at granularity ``alpha`` containing ``v``.

    ``alpha`` has length ``n_clocks + 1`` with a 0 entry for the reference
    clock, matching :meth:`luzone.automaton.LuBounds.alpha`.
    """
    n = len(v)
    if len(alpha) != n + 1:
        raise ValueError("alpha must cover the reference clock plus every clock")
    tags: list[tuple[str, int]] = []
    by_frac: dict[Fraction, list[int]] = {}
    for i in range(1, n + 1):
        w = v[i - 1]
        if w < 0:
            raise ValueError("valuations must be nonnegative")
        if w > alpha[i]:
            tags.append(("gt", alpha[i]))
        elif _frac(w) == 0:
            tags.append(("eq", _floor(w)))
        else:
            tags.append(("open", _floor(w) + 1))
            by_frac.setdefault(_frac(w), []).append(i)
    blocks = tuple(tuple(by_frac[f]) for f in sorted(by_frac))
    return RegionDescriptor(tuple(tags), blocks)


def region_to_dbm(region: RegionDescriptor) -> DistanceGraph:
    """Canonical distance graph denoting exactly the region."""
    n = region.n_clocks
    updates = []
    for i, (kind, c) in enumerate(region.tags, start=1):
        if kind == "eq":
            updates.append((0, i, wle(c)))
            updates.append((i, 0, wle(-c)))
        elif kind == "open":
            updates.append((0, i, wlt(c)))
            updates.append((i, 0, wlt(-(c - 1))))
        else:
            updates.append((i, 0, wlt(-c)))
    upper = {x: region.tags[x - 1][1] for block in region.frac_blocks for x in block}
    for bi, block in enumerate(region.frac_blocks):
        for x, y in itertools.combinations(block, 2):
            diff = upper[x] - upper[y]
            updates.append((y, x, wle(diff)))
            updates.append((x, y, wle(-diff)))
        for later in region.frac_blocks[bi + 1:]:
            for x in block:
                for y in later:
                    diff = upper[x] - upper[y]
                    updates.append((y, x, wlt(diff)))
                    updates.append((x, y, wlt(-diff + 1)))
    zone = DistanceGraph.top(n + 1).constrained(updates)
    assert isinstance(zone, DistanceGraph)  # region descriptors denote nonempty sets
    return zone


def region_representative(region: RegionDescriptor) -> Valuation:
    """A canonical member of the region, with evenly spread fractional parts."""
    pos = {
        x: bi for bi, block in enumerate(region.frac_blocks) for x in block
    }
    nb = len(region.frac_blocks)
    values: list[Fraction] = []
    for i, (kind, c) in enumerate(region.tags, start=1):
        if kind == "eq":
            values.append(Fraction(c))
        elif kind == "open":
            values.append(c - 1 + Fraction(pos[i] + 1, nb + 1))
        else:
            values.append(c + Fraction(1, 2))
    return tuple(values)


def describe_region(region: RegionDescriptor, clock_names: Sequence[str] | None = None) -> str:
    """Deterministic one-line dump, e.g. ``"x=1; y in (0,1); frac: [y]"``."""
    names = list(clock_names) if clock_names is not None else [
        f"x{i}" for i in range(1, region.n_clocks + 1)
    ]
    parts = []
    for i, (kind, c) in enumerate(region.tags, start=1):
        name = names[i - 1]
        if kind == "eq":
            parts.append(f"{name}={c}")
        elif kind == "open":
            parts.append(f"{name} in ({c - 1},{c})")
        else:
            parts.append(f"{name}>{c}")
    if region.frac_blocks:
        blocks = " < ".join(
            "[" + " ".join(names[x - 1] for x in block) + "]"
            for block in region.frac_blocks
        )
        parts.append(f"frac: {blocks}")
    return "; ".join(parts)


def _ordered_partitions(items: tuple[int, ...]) -> Iterator[tuple[tuple[int, ...], ...]]:
    if not items:
        yield ()
        return
    rest_sets = range(1, 1 << len(items))
    for mask in rest_sets:
        first = tuple(x for k, x in enumerate(items) if mask >> k & 1)
        remaining = tuple(x for k, x in enumerate(items) if not mask >> k & 1)
        for tail in _ordered_partitions(remaining):
            yield (first,) + tail


def _ordered_bell(n: int) -> int:
    counts = [1]
    for m in range(1, n + 1):
        counts.append(
            sum(math.comb(m, k) * counts[m - k] for k in range(1, m + 1))
        )
    return counts[n]


def all_region_descriptors(alpha: Sequence[int]) -> Iterator[RegionDescriptor]:
    """Every region at granularity ``alpha``, in a fixed deterministic order."""
    n = len(alpha) - 1
    per_clock: list[list[tuple[str, int]]] = []
    for i in range(1, n + 1):
        options: list[tuple[str, int]] = [("eq", c) for c in range(alpha[i] + 1)]
        options += [("open", c) for c in range(1, alpha[i] + 1)]
        options.append(("gt", alpha[i]))
        per_clock.append(options)
    for tags in itertools.product(*per_clock):
        open_clocks = tuple(
            i for i, (kind, _) in enumerate(tags, start=1) if kind == "open"
        )
        for blocks in _ordered_partitions(open_clocks):
            yield RegionDescriptor(tuple(tags), blocks)


def region_count_bound(alpha: Sequence[int]) -> int:
    n = len(alpha) - 1
    tags = 1
    for i in range(1, n + 1):
        tags *= 2 * alpha[i] + 2
    return tags * _ordered_bell(n)


def enumerate_regions_intersecting(
    zone: DistanceGraph, alpha: Sequence[int], max_regions: int = 200_000
) -> list[RegionDescriptor]:
    """All regions at granularity ``alpha`` meeting the (canonical) zone.

    Brute force over every descriptor; refuses outright when the descriptor
    count bound exceeds ``max_regions``.  Intended for small oracles only.
    """
    if not zone.is_canonical:
        raise ValueError("enumerate_regions_intersecting requires a canonical zone")
    if region_count_bound(alpha) > max_regions:
        raise ValueError(
            f"region count bound {region_count_bound(alpha)} exceeds limit {max_regions}"
        )
    found = []
    for region in all_region_descriptors(alpha):
        meet = entrywise_min(region_to_dbm(region), zone).canonicalize()
        if not meet.is_empty:
            found.append(region)
    return found
