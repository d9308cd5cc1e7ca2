"""Weight algebra for difference bound matrices.

A weight is a pair of a comparison relation (strict ``<`` or weak ``<=``) and a
numeric bound, written ``(<,5)`` or ``(<=,5)``.  Weights order totally: first by
bound, and at equal bounds the strict weight is the smaller one.  Addition adds
the bounds and is strict as soon as either operand is strict.  The only legal
infinite weight is ``(<,inf)``, the absent-edge marker.

Two representations live here.  :class:`Weight` is the public value type used in
APIs, tests and rendering.  The matrix internals use packed integers
(``2*bound + weak_bit``) so that comparison is plain integer comparison; the
``pack_weight`` / ``unpack_weight`` / ``packed_add`` helpers implement that
encoding and are property-tested against the dataclass algebra.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering

__all__ = [
    "Weight",
    "WeightOverflowError",
    "INF_WEIGHT",
    "MAX_CONST",
    "PACKED_INF",
    "wle",
    "wlt",
    "weight_add",
    "weight_neg",
    "weight_ceil",
    "pack_weight",
    "unpack_weight",
    "packed_add",
]

# Bound magnitude cap.  Python integers do not wrap around, so overflow is a
# policy decision: beyond this magnitude weight_add / packed_add raise instead
# of silently producing huge bounds.
MAX_CONST = 2**60


class WeightOverflowError(ArithmeticError):
    """Raised when a weight bound would exceed the supported magnitude."""


@total_ordering
@dataclass(frozen=True)
class Weight:
    """A comparison relation plus bound, e.g. ``(<,5)`` or ``(<=,-2)``.

    Attributes:
        bound: integer bound; ``math.inf`` for the absent-edge weight; test
            oracles may carry ``Fraction`` bounds.
        strict: True for ``<``, False for ``<=``.
    """

    bound: int | Fraction | float
    strict: bool

    def __post_init__(self) -> None:
        if self.bound == math.inf and not self.strict:
            raise ValueError("(<=,inf) is not a legal weight")
        if isinstance(self.bound, float) and self.bound != math.inf:
            raise ValueError(f"weight bound must be int, Fraction or inf: {self.bound!r}")

    def _key(self) -> tuple[int | Fraction | float, int]:
        return (self.bound, 0 if self.strict else 1)

    def __lt__(self, other: "Weight") -> bool:
        return self._key() < other._key()

    @property
    def is_infinite(self) -> bool:
        return self.bound == math.inf

    def __str__(self) -> str:
        rel = "<" if self.strict else "<="
        bound = "inf" if self.bound == math.inf else str(self.bound)
        return f"({rel},{bound})"


INF_WEIGHT = Weight(math.inf, True)


def wle(bound: int | Fraction) -> Weight:
    """Weak weight ``(<=,bound)``."""
    return Weight(bound, False)


def wlt(bound: int | Fraction) -> Weight:
    """Strict weight ``(<,bound)``."""
    return Weight(bound, True)


def weight_add(a: Weight, b: Weight) -> Weight:
    """Sum of two weights: bounds add, strict if either operand is strict."""
    if a.is_infinite or b.is_infinite:
        return INF_WEIGHT
    bound = a.bound + b.bound
    if not -MAX_CONST <= bound <= MAX_CONST:
        raise WeightOverflowError(f"weight bound out of range: {bound}")
    return Weight(bound, a.strict or b.strict)


def weight_neg(a: Weight) -> Weight:
    """Negated bound, same relation.  Undefined for the infinite weight."""
    if a.is_infinite:
        raise ValueError("cannot negate an infinite weight")
    return Weight(-a.bound, a.strict)


def weight_ceil(a: Weight) -> Weight:
    """Smallest integer-bounded weight above, used by region weight bounds.

    Integer bounds: ``(<=,c)`` is already integral, ``(<,c)`` rounds to
    ``(<,c+1)``.  Fractional bounds round both relations to ``(<,ceil(c))``.
    The infinite weight is its own ceiling.
    """
    if a.is_infinite:
        return a
    if isinstance(a.bound, int):
        return a if not a.strict else Weight(a.bound + 1, True)
    if a.bound.denominator == 1:
        return Weight(int(a.bound), False) if not a.strict else Weight(int(a.bound) + 1, True)
    return Weight(math.ceil(a.bound), True)


# Packed encoding: 2*bound + (1 if weak else 0).  Integer order coincides with
# weight order, and the strict bit propagates through addition by AND-ing.
PACKED_INF = 2**62


def pack_weight(a: Weight) -> int:
    if a.is_infinite:
        return PACKED_INF
    if not isinstance(a.bound, int):
        raise TypeError(f"packed weights need integer bounds: {a}")
    return 2 * a.bound + (0 if a.strict else 1)


def unpack_weight(p: int) -> Weight:
    if p == PACKED_INF:
        return INF_WEIGHT
    return Weight(p >> 1, not (p & 1))


def packed_add(a: int, b: int) -> int:
    if a == PACKED_INF or b == PACKED_INF:
        return PACKED_INF
    s = (a >> 1) + (b >> 1)
    if not -MAX_CONST <= s <= MAX_CONST:
        raise WeightOverflowError(f"weight bound out of range: {s}")
    return (s << 1) | (a & b & 1)
