"""Independent cross-checking equipment: generators and brute-force oracles.

Nothing here is needed to run the checker; the tests use this module to
confront the optimized implementations with slow, obviously-correct
counterparts.  The region-graph oracle in particular is written from scratch
on its own representation (per-clock interval tags plus a fractional-order
word) so that it shares no code with the zone machinery it judges.
"""

from __future__ import annotations

import itertools
import random
from collections import deque
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from luzone.automaton import Automaton, GuardAtom, Rel, Transition, constrain
from luzone.dbm import DistanceGraph, Zone
from luzone.weights import INF_WEIGHT, wle

__all__ = [
    "ZoneRecipe",
    "zone_corpus",
    "grid_valuations",
    "grid_resolution",
    "OracleBudgetError",
    "region_graph_reachability",
    "random_automaton",
    "all_lu_maps",
    "zone_arrays",
    "grid_points",
    "member_mask",
    "alu_member_mask",
]


# ---------------------------------------------------------------------------
# Seeded zone generation


class OracleBudgetError(RuntimeError):
    """An oracle refused to run because its input is too large."""


_RELS = (Rel.LT, Rel.LE, Rel.GE, Rel.GT)


@dataclass(frozen=True)
class ZoneRecipe:
    """A replayable construction of a zone from the zero valuation.

    The recipe stores the literal operation sequence, so building it twice
    gives identical zones.  Constraints that would empty the zone are skipped
    during construction, which biases the output towards nonempty zones of
    the shapes forward exploration actually produces.
    """

    n_clocks: int
    ops: tuple

    @classmethod
    def random(cls, seed: int, n_clocks: int, max_const: int, n_ops: int = 7) -> "ZoneRecipe":
        rng = random.Random(seed)
        ops = []
        for _ in range(rng.randint(2, n_ops)):
            kind = rng.random()
            if kind < 0.5:
                ops.append(
                    (
                        "constrain",
                        rng.randint(1, n_clocks),
                        rng.choice(_RELS).value,
                        rng.randint(0, max_const),
                    )
                )
            elif kind < 0.75:
                ops.append(("elapse",))
            else:
                count = rng.randint(1, n_clocks)
                ops.append(("reset", tuple(sorted(rng.sample(range(1, n_clocks + 1), count)))))
        return cls(n_clocks, tuple(ops))

    def build(self) -> DistanceGraph:
        dim = self.n_clocks + 1
        zone = DistanceGraph.from_weights(
            [[wle(0)] * dim for _ in range(dim)]
        ).canonicalize()
        for op in self.ops:
            if op[0] == "constrain":
                _, clock, rel, const = op
                candidate = constrain(zone, (GuardAtom(clock, Rel(rel), const),))
                if not candidate.is_empty:
                    zone = candidate
            elif op[0] == "elapse":
                zone = zone.time_elapse()
            else:
                zone = zone.reset(frozenset(op[1]))
        assert not zone.is_empty
        return zone


def zone_corpus(
    n_clocks: int, max_const: int, count: int, seed0: int = 0
) -> list[DistanceGraph]:
    """Deterministic list of `count` distinct recipe-built zones."""
    zones: list[DistanceGraph] = []
    seen = set()
    seed = seed0
    while len(zones) < count and seed < seed0 + 50 * count:
        zone = ZoneRecipe.random(seed, n_clocks, max_const).build()
        if zone not in seen:
            seen.add(zone)
            zones.append(zone)
        seed += 1
    return zones


# ---------------------------------------------------------------------------
# Grid sampling


def grid_resolution(n_clocks: int) -> int:
    """Denominator fine enough to hit every fractional-order class."""
    return 2 * (n_clocks + 1)


def grid_valuations(zone: Zone, alpha, max_points: int = 4_000_000):
    """Yield all grid valuations inside `zone`.

    The grid steps by 1/(2(n+1)) over the box [0, max(alpha)+1] in every
    clock, which is fine enough to distinguish all interleavings of
    fractional parts and reaches one unit beyond the largest constant.
    """
    if zone.is_empty:
        return
    n = zone.dim - 1
    denom = grid_resolution(n)
    top = max(alpha) + 1
    per_axis = denom * top + 1
    if per_axis**n > max_points:
        raise OracleBudgetError(f"grid of {per_axis**n} points exceeds {max_points}")
    axis = [Fraction(k, denom) for k in range(per_axis)]
    for point in itertools.product(axis, repeat=n):
        if zone.contains_valuation(point):
            yield point


# ---------------------------------------------------------------------------
# Region-graph reachability (independent oracle)


def _guard_consts(automaton: Automaton) -> list[int]:
    maxima = [0] * (automaton.n_clocks + 1)
    for transition in automaton.transitions:
        for atom in transition.guard:
            maxima[atom.clock] = max(maxima[atom.clock], atom.const)
    return maxima


def _atom_on_tags(tags, atom: GuardAtom) -> bool:
    tag = tags[atom.clock - 1]
    if tag[0] == "int":
        value = tag[1]
        if atom.rel is Rel.LT:
            return value < atom.const
        if atom.rel is Rel.LE:
            return value <= atom.const
        if atom.rel is Rel.GE:
            return value >= atom.const
        return value > atom.const
    if tag[0] == "low":
        upper = tag[1]
        if atom.rel in (Rel.LT, Rel.LE):
            return atom.const >= upper
        return atom.const <= upper - 1
    return atom.rel in (Rel.GE, Rel.GT)


def _delay_successor(tags, blocks, alpha):
    ints = [i for i, tag in enumerate(tags) if tag[0] == "int"]
    if ints:
        new_tags = list(tags)
        fresh = []
        for i in ints:
            value = tags[i][1]
            if value + 1 > alpha[i + 1]:
                new_tags[i] = ("inf",)
            else:
                new_tags[i] = ("low", value + 1)
                fresh.append(i)
        new_blocks = ((tuple(fresh),) + blocks) if fresh else blocks
        return tuple(new_tags), new_blocks
    if blocks:
        new_tags = list(tags)
        for i in blocks[-1]:
            new_tags[i] = ("int", tags[i][1])
        return tuple(new_tags), blocks[:-1]
    return None


def _reset_on_tags(tags, blocks, resets):
    zero_based = {clock - 1 for clock in resets}
    new_tags = tuple(
        ("int", 0) if i in zero_based else tag for i, tag in enumerate(tags)
    )
    new_blocks = tuple(
        kept
        for kept in (tuple(i for i in block if i not in zero_based) for block in blocks)
        if kept
    )
    return new_tags, new_blocks


def region_graph_reachability(
    automaton: Automaton, alpha=None, max_nodes: int = 200_000
) -> bool:
    """Classical region-graph search, sharing no code with the zone side.

    `alpha` defaults to the largest guard constant per clock and may be
    enlarged; making it smaller than some guard constant is rejected.
    """
    consts = _guard_consts(automaton)
    if alpha is None:
        alpha = consts
    alpha = tuple(alpha)
    if len(alpha) != automaton.n_clocks + 1:
        raise ValueError("alpha must give one bound per clock plus index 0")
    if any(alpha[i] < consts[i] for i in range(1, len(alpha))):
        raise ValueError("alpha below a guard constant would be unsound")

    start = (automaton.initial, (("int", 0),) * automaton.n_clocks, ())
    seen = {start}
    queue = deque([start])
    while queue:
        state, tags, blocks = queue.popleft()
        if state in automaton.accepting:
            return True
        successors = []
        delayed = _delay_successor(tags, blocks, alpha)
        if delayed is not None:
            successors.append((state, *delayed))
        for transition in automaton.transitions_from(state):
            if all(_atom_on_tags(tags, atom) for atom in transition.guard):
                successors.append(
                    (transition.target, *_reset_on_tags(tags, blocks, transition.resets))
                )
        for node in successors:
            if node not in seen:
                if len(seen) >= max_nodes:
                    raise OracleBudgetError("region graph node budget exceeded")
                seen.add(node)
                queue.append(node)
    return False


# ---------------------------------------------------------------------------
# Random automata


def random_automaton(
    rng: random.Random,
    max_states: int = 4,
    n_clocks: int = 2,
    max_const: int = 3,
    max_transitions: int = 6,
) -> Automaton:
    n_states = rng.randint(1, max_states)
    accepting = frozenset(rng.sample(range(n_states), rng.randint(1, n_states)))
    transitions = []
    for _ in range(rng.randint(1, max_transitions)):
        atoms = []
        for _ in range(rng.randint(0, 2)):
            clock = rng.randint(1, n_clocks)
            const = rng.randint(0, max_const)
            rel = rng.choice(("<", "<=", "==", ">=", ">"))
            if rel == "==":
                atoms.append(GuardAtom(clock, Rel.LE, const))
                atoms.append(GuardAtom(clock, Rel.GE, const))
            else:
                atoms.append(GuardAtom(clock, Rel(rel), const))
        resets = frozenset(
            clock for clock in range(1, n_clocks + 1) if rng.random() < 0.3
        )
        transitions.append(
            Transition(
                rng.randrange(n_states),
                rng.randrange(n_states),
                guard=tuple(atoms),
                resets=resets,
            )
        )
    return Automaton(
        state_names=tuple(f"q{i}" for i in range(n_states)),
        clock_names=tuple(f"x{i}" for i in range(1, n_clocks + 1)),
        initial=0,
        accepting=accepting,
        transitions=tuple(transitions),
    )


# ---------------------------------------------------------------------------
# Vectorized membership (bulk oracle runs)


def all_lu_maps(n_clocks: int, consts=(None, 0, 1, 2, 3)):
    """Every LU bound map drawing per-clock bounds from `consts`."""
    from luzone.automaton import LuBounds

    maps = []
    for lower in itertools.product(consts, repeat=n_clocks):
        for upper in itertools.product(consts, repeat=n_clocks):
            maps.append(LuBounds.from_pairs(lower, upper))
    return maps


def zone_arrays(zone: DistanceGraph, scale: int):
    """Zone entries scaled by `scale`, as (bound, strict) numpy arrays."""
    dim = zone.dim
    bound = np.empty((dim, dim))
    strict = np.empty((dim, dim), dtype=bool)
    for i in range(dim):
        for j in range(dim):
            w = zone.weight(i, j)
            bound[i, j] = np.inf if w == INF_WEIGHT else w.bound * scale
            strict[i, j] = w.strict
    return bound, strict


def grid_points(n_clocks: int, amax: int, denom: int) -> np.ndarray:
    """Integer grid coordinates (scaled by `denom`) over the sampling box."""
    per_axis = denom * (amax + 1) + 1
    axes = [np.arange(per_axis, dtype=np.int64)] * n_clocks
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def _with_reference(points: np.ndarray) -> np.ndarray:
    zeros = np.zeros((points.shape[0], 1), dtype=points.dtype)
    return np.concatenate([zeros, points], axis=1)


def member_mask(zone: DistanceGraph, points: np.ndarray, denom: int) -> np.ndarray:
    """Boolean mask of which scaled grid points satisfy the zone."""
    bound, strict = zone_arrays(zone, denom)
    vals = _with_reference(points).astype(np.float64)
    diff = vals[:, None, :] - vals[:, :, None]
    violate = (diff > bound) | ((diff == bound) & strict)
    return ~violate.any(axis=(1, 2))


def alu_member_mask(zp: DistanceGraph, lu, points: np.ndarray, denom: int) -> np.ndarray:
    """For each grid point v, whether the up-set box of v meets `zp`.

    This is the batch counterpart of the scalar membership oracle: the box
    around v touches only row and column 0, so emptiness of the intersection
    reduces to a negative cycle 0 -> i -> j -> 0 combining box edges with one
    closed entry of `zp`.
    """
    n = zp.dim - 1
    zb, zs = zone_arrays(zp, denom)
    vals = points.astype(np.float64)

    lower = np.array(
        [np.inf if lu.lower[x] is None else lu.lower[x] * denom for x in range(1, n + 1)]
    )
    upper = np.array(
        [np.inf if lu.upper[x] is None else lu.upper[x] * denom for x in range(1, n + 1)]
    )
    l_absent = np.isinf(lower)
    u_absent = np.isinf(upper)
    # Edge 0 -> x of the box: v_x while v_x <= U_x, otherwise unbounded.
    below_u = (vals <= upper) & ~u_absent
    b0x = np.where(below_u, vals, np.inf)
    s0x = np.zeros_like(b0x, dtype=bool)
    # Edge x -> 0 of the box: -v_x below L_x, then the strict -L_x floor,
    # and just nonnegativity when L_x is absent.
    below_l = (vals <= lower) & ~l_absent
    finite_l = np.where(l_absent, 0.0, lower)
    bx0 = np.where(below_l, -vals, np.where(l_absent, 0.0, -finite_l))
    sx0 = ~below_l & ~l_absent

    # Pointwise minimum with the corresponding entries of zp, using the
    # "strict beats weak at equal bound" order.
    z0x_b, z0x_s = zb[0, 1:], zs[0, 1:]
    zx0_b, zx0_s = zb[1:, 0], zs[1:, 0]
    take_box = (2 * b0x - s0x) <= (2 * z0x_b - z0x_s)
    m0_b = np.where(take_box, b0x, z0x_b)
    m0_s = np.where(take_box, s0x, z0x_s)
    take_box = (2 * bx0 - sx0) <= (2 * zx0_b - zx0_s)
    m1_b = np.where(take_box, bx0, zx0_b)
    m1_s = np.where(take_box, sx0, zx0_s)

    inner_b, inner_s = zb[1:, 1:], zs[1:, 1:]
    total_b = m0_b[:, :, None] + inner_b[None, :, :] + m1_b[:, None, :]
    total_s = m0_s[:, :, None] | inner_s[None, :, :] | m1_s[:, None, :]
    negative = (total_b < 0) | ((total_b == 0) & total_s)
    return ~negative.any(axis=(1, 2))
