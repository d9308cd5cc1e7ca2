"""Distance graphs (difference bound matrices) over clocks plus a reference point.

A graph of dimension ``n+1`` has one node per clock ``1..n`` and node ``0`` for
the constant zero.  The entry at ``(i, j)`` is a weight ``(rel, c)`` constraining
``value(j) - value(i) rel c``; ``(<,inf)`` means no edge.  The solution set of a
graph is its zone.

Nothing here presumes clocks are nonnegative: a zone only knows what its edges
say, so ``x >= 0`` must be stated by an edge ``x -> 0`` if it is wanted.

Canonical form is the all-pairs shortest-path closure.  A negative cycle means
the zone is empty; every operation that can discover emptiness returns the
:data:`EMPTY_ZONE` singleton instead of a graph.  Entries are stored packed
(see :mod:`luzone.weights`) and the matrix is immutable; operations return new
graphs.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence, Union

from luzone.weights import PACKED_INF, Weight, pack_weight, packed_add, unpack_weight, wle

__all__ = [
    "DistanceGraph",
    "EMPTY_ZONE",
    "EmptyZone",
    "Zone",
    "zone_includes",
    "entrywise_min",
]

_PACKED_LE0 = pack_weight(wle(0))


class EmptyZone:
    """Marker for the empty zone.  Use the :data:`EMPTY_ZONE` singleton."""

    is_empty = True

    def __repr__(self) -> str:
        return "EMPTY_ZONE"

    def contains_valuation(self, valuation: Sequence) -> bool:
        return False


EMPTY_ZONE = EmptyZone()


class DistanceGraph:
    """Immutable weighted graph on ``{0, 1, .., n}`` with packed integer entries."""

    __slots__ = ("_dim", "_m", "_canonical")

    is_empty = False

    def __init__(self, dim: int, packed_rows: tuple[tuple[int, ...], ...], canonical: bool):
        self._dim = dim
        self._m = packed_rows
        self._canonical = canonical

    @classmethod
    def top(cls, dim: int) -> "DistanceGraph":
        """The unconstrained zone: no edges, diagonal ``(<=,0)``.  Canonical."""
        rows = tuple(
            tuple(_PACKED_LE0 if i == j else PACKED_INF for j in range(dim)) for i in range(dim)
        )
        return cls(dim, rows, canonical=True)

    @classmethod
    def from_weights(cls, rows: Sequence[Sequence[Weight]]) -> "DistanceGraph":
        """Build a (generally non-canonical) graph from explicit weights.

        Diagonal entries are clamped to at most ``(<=,0)``; a below-zero
        diagonal is kept so canonicalization can report the zone empty.
        """
        dim = len(rows)
        if any(len(r) != dim for r in rows):
            raise ValueError("weight matrix must be square")
        packed = []
        for i, row in enumerate(rows):
            prow = [pack_weight(w) for w in row]
            if i < dim and prow[i] > _PACKED_LE0:
                prow[i] = _PACKED_LE0
            packed.append(tuple(prow))
        return cls(dim, tuple(packed), canonical=False)

    @property
    def dim(self) -> int:
        return self._dim

    @property
    def is_canonical(self) -> bool:
        return self._canonical

    def weight(self, i: int, j: int) -> Weight:
        return unpack_weight(self._m[i][j])

    def packed(self, i: int, j: int) -> int:
        return self._m[i][j]

    def rows(self) -> tuple[tuple[int, ...], ...]:
        """Packed entry rows, for vectorized consumers."""
        return self._m

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DistanceGraph):
            return NotImplemented
        return self._dim == other._dim and self._m == other._m

    def __hash__(self) -> int:
        return hash(self._m)

    def __repr__(self) -> str:
        tag = "canonical" if self._canonical else "raw"
        return f"<DistanceGraph dim={self._dim} {tag}>"

    def pretty(self, clock_names: Sequence[str] | None = None) -> str:
        """Render the matrix with row/column headers for debugging."""
        names = ["0"] + (
            list(clock_names) if clock_names is not None else [f"x{i}" for i in range(1, self._dim)]
        )
        cells = [[str(unpack_weight(p)) for p in row] for row in self._m]
        width = max(len(s) for row in cells for s in row)
        width = max(width, max(len(n) for n in names))
        head = " ".join([" " * width] + [n.rjust(width) for n in names])
        lines = [head]
        for name, row in zip(names, cells):
            lines.append(" ".join([name.rjust(width)] + [s.rjust(width) for s in row]))
        return "\n".join(lines)

    def canonicalize(self) -> "Zone":
        """Shortest-path closure, or :data:`EMPTY_ZONE` on a negative cycle.

        Plain Floyd-Warshall; any optimized variant must reproduce its output
        bit for bit.  Already-canonical graphs are returned unchanged.
        """
        if self._canonical:
            return self
        dim = self._dim
        m = [list(row) for row in self._m]
        for k in range(dim):
            mk = m[k]
            for i in range(dim):
                mik = m[i][k]
                if mik == PACKED_INF:
                    continue
                mi = m[i]
                for j in range(dim):
                    if mk[j] == PACKED_INF:
                        continue
                    cand = packed_add(mik, mk[j])
                    if cand < mi[j]:
                        mi[j] = cand
        for i in range(dim):
            if m[i][i] < _PACKED_LE0:
                return EMPTY_ZONE
        return DistanceGraph(dim, tuple(tuple(r) for r in m), canonical=True)

    def constrained(self, updates: Iterable[tuple[int, int, Weight]]) -> "Zone":
        """Tighten entries to at most the given weights, then re-canonicalize."""
        m = [list(row) for row in self._m]
        changed = False
        for i, j, w in updates:
            p = pack_weight(w)
            if p < m[i][j]:
                m[i][j] = p
                changed = True
        if not changed and self._canonical:
            return self
        return DistanceGraph(self._dim, tuple(tuple(r) for r in m), canonical=False).canonicalize()

    def reset(self, clocks: Iterable[int]) -> "DistanceGraph":
        """Set the given clocks to zero.  Requires and preserves canonical form.

        Entry ``(i, j)`` of the result is entry ``(m(i), m(j))`` of the source
        where ``m`` maps reset clocks to node 0; re-closure is not needed.
        """
        if not self._canonical:
            raise ValueError("reset requires a canonical graph")
        reset_set = set(clocks)
        if not reset_set:
            return self
        remap = [0 if i in reset_set else i for i in range(self._dim)]
        rows = tuple(
            tuple(self._m[remap[i]][remap[j]] for j in range(self._dim)) for i in range(self._dim)
        )
        return DistanceGraph(self._dim, rows, canonical=True)

    def time_elapse(self) -> "DistanceGraph":
        """Let arbitrary time pass: drop every upper bound ``0 -> x``.

        Requires canonical input; the result is canonical again because raising
        ``(0, x)`` to ``(<,inf)`` cannot create a shorter path anywhere.
        """
        if not self._canonical:
            raise ValueError("time_elapse requires a canonical graph")
        first = tuple(
            self._m[0][j] if j == 0 else PACKED_INF for j in range(self._dim)
        )
        return DistanceGraph(self._dim, (first,) + self._m[1:], canonical=True)

    def scaled(self, factor: int) -> "DistanceGraph":
        """Multiply every finite bound by a positive integer.

        Maps the zone to scaled coordinates exactly; shortest paths scale
        linearly, so canonical form is preserved.
        """
        if factor < 1:
            raise ValueError("scale factor must be a positive integer")
        if factor == 1:
            return self
        rows = tuple(
            tuple(p if p == PACKED_INF else ((p >> 1) * factor) << 1 | (p & 1) for p in row)
            for row in self._m
        )
        return DistanceGraph(self._dim, rows, self._canonical)

    def contains_valuation(self, valuation: Sequence[int | Fraction]) -> bool:
        """Exact membership test for a clock valuation (clock 1 first)."""
        if len(valuation) != self._dim - 1:
            raise ValueError(f"expected {self._dim - 1} clock values, got {len(valuation)}")
        vals = (0, *valuation)
        for i in range(self._dim):
            row = self._m[i]
            vi = vals[i]
            for j in range(self._dim):
                p = row[j]
                if p == PACKED_INF:
                    continue
                diff = vals[j] - vi
                bound = p >> 1
                if diff > bound or (diff == bound and not (p & 1)):
                    return False
        return True


Zone = Union[DistanceGraph, EmptyZone]


def zone_includes(inner: Zone, outer: Zone) -> bool:
    """Whether ``inner`` is a subset of ``outer``.  Both must be canonical.

    On canonical graphs set inclusion is exactly entrywise weight comparison.
    """
    if inner.is_empty:
        return True
    if outer.is_empty:
        return False
    if not (inner.is_canonical and outer.is_canonical):
        raise ValueError("zone_includes requires canonical graphs")
    if inner.dim != outer.dim:
        raise ValueError("dimension mismatch")
    for ri, ro in zip(inner.rows(), outer.rows()):
        for a, b in zip(ri, ro):
            if a > b:
                return False
    return True


def entrywise_min(a: Zone, b: Zone) -> Zone:
    """Entrywise minimum, the intersection of the two zones.  Not canonical."""
    if a.is_empty or b.is_empty:
        return EMPTY_ZONE
    if a.dim != b.dim:
        raise ValueError("dimension mismatch")
    rows = tuple(
        tuple(min(x, y) for x, y in zip(ra, rb)) for ra, rb in zip(a.rows(), b.rows())
    )
    return DistanceGraph(a.dim, rows, canonical=False)
