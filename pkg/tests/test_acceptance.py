"""Acceptance suite: one test per shipping criterion.

Each test prints a single machine-readable PASS/FAIL line (visible under
``pytest -s``) and then asserts.  The heavy comparisons run the optimized
inclusion test against independently built grid and region oracles, so a
pass here means the implementations agree with brute force at volume, not
just on handpicked examples.
"""

import itertools
import random
import time
from collections import defaultdict
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from luzone.alu import (
    ComparisonCounter,
    alu_includes,
    alu_inverse_graph,
    alu_member_oracle,
    min_region_weight,
)
from luzone.automaton import LuBounds
from luzone.dbm import DistanceGraph
from luzone.explorer import (
    BudgetExceededError,
    Inclusion,
    reachability,
)
from luzone.model_io import parse_model, print_model
from luzone.oracles import (
    all_lu_maps,
    alu_member_mask,
    grid_points,
    grid_resolution,
    member_mask,
    random_automaton,
    region_graph_reachability,
    zone_corpus,
)
from luzone.regions import (
    all_region_descriptors,
    build_test_sequence,
    executable_from,
    lu_preorder,
    region_of,
    region_to_dbm,
    rlu_contains,
    enumerate_regions_intersecting,
)
from luzone.weights import INF_WEIGHT, wle, wlt

MODELS = Path(__file__).parent / "models"

MAX_CONST = 3


def report(name: str, ok: bool, detail: str) -> None:
    print(f"{name}: {'PASS' if ok else 'FAIL'} ({detail})")
    assert ok, f"{name} failed: {detail}"


def fractions_of(row, denom: int):
    return tuple(Fraction(int(k), denom) for k in row)


def delay_candidates(vp, alpha_max):
    crossings = sorted(
        {Fraction(c) - coord for coord in vp for c in range(alpha_max + 2) if c >= coord}
    )
    cands = {Fraction(0)}
    prev = None
    for d in crossings:
        cands.add(d)
        if prev is not None:
            cands.add((prev + d) / 2)
        prev = d
    if prev is not None:
        cands.add(prev + 1)
    return sorted(cands)


def diverse_maps2():
    """Representative two-clock LU maps with constants at most 2."""
    pairs = [
        ((None, None), (None, None)),
        ((0, 0), (0, 0)),
        ((1, 2), (2, 1)),
        ((2, 2), (2, 2)),
        ((None, 1), (1, None)),
        ((2, None), (None, 2)),
        ((0, 2), (2, 0)),
        ((1, None), (None, None)),
        ((None, None), (2, 2)),
        ((1, 1), (1, 1)),
        ((None, 0), (0, 2)),
        ((2, 1), (0, None)),
    ]
    return [LuBounds.from_pairs(lo, up) for lo, up in pairs]


@pytest.fixture(scope="module")
def corpus1():
    return zone_corpus(1, MAX_CONST, 25)


@pytest.fixture(scope="module")
def corpus2():
    return zone_corpus(2, MAX_CONST, 40)


@pytest.fixture(scope="module")
def corpus3():
    return zone_corpus(3, MAX_CONST, 60)


def refutation_box(zones, n_clocks):
    """Sampling radius large enough to witness every failed inclusion.

    Membership in an abstracted zone is constant across regions, so when
    inclusion fails some whole region escapes, and the smallest zone point
    inside that region is reached by a chain of at most ``n_clocks`` forced
    gaps.  Each gap is bounded by the largest finite zone constant or by
    the largest region threshold ``MAX_CONST + 1``, plus one for strict
    slack.  Points beyond that radius are therefore redundant: region
    constancy carries any farther refutation back inside the box.
    """
    largest = max(
        (
            abs(z.weight(i, j).bound)
            for z in zones
            for i in range(n_clocks + 1)
            for j in range(n_clocks + 1)
            if not z.weight(i, j).is_infinite
        ),
        default=0,
    )
    return n_clocks * (max(largest, MAX_CONST + 1) + 1)


def exhaustive_disagreements(zones, n_clocks, maps):
    """All (zone pair, LU map) combos: inclusion test vs grid oracle."""
    denom = grid_resolution(n_clocks)
    points = grid_points(n_clocks, refutation_box(zones, n_clocks) - 1, denom)
    members_full = np.stack([member_mask(z, points, denom) for z in zones])
    # Only points inside some corpus zone can witness a refutation, so the
    # per-map abstraction masks are evaluated on that subset alone.
    used = members_full.any(axis=0)
    points = points[used]
    members_f = members_full[:, used].astype(np.float32)
    checks = 0
    bad = []
    for lu in maps:
        sets = np.stack([alu_member_mask(z, lu, points, denom) for z in zones])
        outside = (~sets).astype(np.float32)
        # miss[i, j] counts grid members of zone i outside the abstraction
        # of zone j; inclusion holds exactly when the count is zero.
        miss = members_f @ outside.T
        for i, zi in enumerate(zones):
            for j, zj in enumerate(zones):
                checks += 1
                if alu_includes(zi, zj, lu) != bool(miss[i, j] == 0):
                    bad.append((i, j, lu))
    return checks, bad


def test_ac1_inclusion_test_agrees_with_grid_oracle(corpus1, corpus2, corpus3):
    start = time.perf_counter()
    checks1, bad1 = exhaustive_disagreements(corpus1, 1, all_lu_maps(1))
    checks2, bad2 = exhaustive_disagreements(corpus2, 2, all_lu_maps(2))

    rng = random.Random(20260821)
    consts = (None, 0, 1, 2, 3)
    maps3 = [
        LuBounds.from_pairs(
            tuple(rng.choice(consts) for _ in range(3)),
            tuple(rng.choice(consts) for _ in range(3)),
        )
        for _ in range(28)
    ]
    checks3, bad3 = exhaustive_disagreements(corpus3, 3, maps3)

    # The batch oracle itself is pinned to the scalar definitional oracle.
    denom = grid_resolution(2)
    points = grid_points(2, MAX_CONST, denom)
    maps2 = all_lu_maps(2)
    for _ in range(150):
        zone = corpus2[rng.randrange(len(corpus2))]
        lu = maps2[rng.randrange(len(maps2))]
        k = rng.randrange(len(points))
        v = fractions_of(points[k], denom)
        mask = alu_member_mask(zone, lu, points, denom)
        assert bool(mask[k]) == alu_member_oracle(v, zone, lu)

    elapsed = time.perf_counter() - start
    checks = checks1 + checks2 + checks3
    bad = bad1 + bad2 + bad3
    enough = checks1 + checks2 >= 10_000 and checks3 >= 100_000
    report(
        "AC1 inclusion test vs grid oracle",
        not bad and enough and elapsed < 120,
        f"{checks1 + checks2} exhaustive + {checks3} randomized pair checks,"
        f" {len(bad)} disagreements, {elapsed:.1f}s",
    )


def test_ac2_membership_is_region_invariant(corpus1, corpus2, corpus3):
    combos = 0
    violations = 0
    for n_clocks, zones, maps in (
        (1, corpus1, all_lu_maps(1)),
        (2, corpus2, all_lu_maps(2)),
    ):
        denom = grid_resolution(n_clocks)
        points = grid_points(n_clocks, MAX_CONST, denom)
        fracs = [fractions_of(row, denom) for row in points]
        labels_by_alpha = {}
        for lu in maps:
            alpha = lu.alpha()
            if alpha not in labels_by_alpha:
                ids = {}
                labels_by_alpha[alpha] = np.array(
                    [
                        ids.setdefault(region_of(v, alpha), len(ids))
                        for v in fracs
                    ],
                    dtype=np.int64,
                )
            labels = labels_by_alpha[alpha]
            for zone in zones:
                mask = alu_member_mask(zone, lu, points, denom)
                combined = labels * 2 + mask.astype(np.int64)
                combos += 1
                if len(np.unique(combined)) != len(np.unique(labels)):
                    violations += 1

    # Spot-check the three-clock corpus on a few sampled maps.
    rng = random.Random(4)
    denom = grid_resolution(3)
    points = grid_points(3, MAX_CONST, denom)
    fracs = [fractions_of(row, denom) for row in points]
    consts = (None, 0, 1, 2, 3)
    for _ in range(3):
        lu = LuBounds.from_pairs(
            tuple(rng.choice(consts) for _ in range(3)),
            tuple(rng.choice(consts) for _ in range(3)),
        )
        alpha = lu.alpha()
        ids = {}
        labels = np.array(
            [ids.setdefault(region_of(v, alpha), len(ids)) for v in fracs],
            dtype=np.int64,
        )
        for zone in corpus3[:20]:
            mask = alu_member_mask(zone, lu, points, denom)
            combined = labels * 2 + mask.astype(np.int64)
            combos += 1
            if len(np.unique(combined)) != len(np.unique(labels)):
                violations += 1

    report(
        "AC2 same-region points agree on membership",
        violations == 0,
        f"{combos} zone/map combos, {violations} violations",
    )


def test_ac3_elapsed_zones_match_neighbourhood_sweep():
    denom = grid_resolution(2)
    amax = 2
    points = grid_points(2, amax, denom)
    fracs = [fractions_of(row, denom) for row in points]
    raw = zone_corpus(2, amax, 30)
    elapsed = []
    for zone in raw:
        e = zone.time_elapse()
        if e not in elapsed:
            elapsed.append(e)

    pool_alpha = (0, amax + 1, amax + 1)
    pools = []
    for zone in elapsed:
        mask = member_mask(zone, points, denom)
        pool = []
        seen = set()
        for idx in np.flatnonzero(mask):
            vp = fracs[idx]
            for d in delay_candidates(vp, amax + 1):
                w = tuple(c + d for c in vp)
                r = region_of(w, pool_alpha)
                if r not in seen:
                    seen.add(r)
                    pool.append(w)
        assert pool
        pools.append(pool)

    checks = 0
    mismatches = 0
    for zone, pool in zip(elapsed, pools):
        for lu in diverse_maps2():
            expected = alu_member_mask(zone, lu, points, denom)
            for idx, v in enumerate(fracs):
                swept = any(rlu_contains(v, w, lu) for w in pool)
                checks += 1
                if swept != bool(expected[idx]):
                    mismatches += 1
    report(
        "AC3 elapsed-zone membership equals delay sweep",
        mismatches == 0,
        f"{len(elapsed)} elapsed zones, {checks} valuation checks,"
        f" {mismatches} mismatches",
    )


def test_ac4_guard_sequences_characterize_executability():
    denom = grid_resolution(2)
    amax = 2
    points = grid_points(2, amax, denom)
    fracs = [fractions_of(row, denom) for row in points]
    candidates = {
        vp: [
            tuple(c + d for c in vp)
            for d in delay_candidates(vp, amax + 1)
        ]
        for vp in fracs
    }
    maps = [
        LuBounds.from_pairs((None, None), (None, None)),
        LuBounds.from_pairs((2, 2), (2, 2)),
        LuBounds.from_pairs((1, None), (None, 2)),
        LuBounds.from_pairs((None, 0), (2, 1)),
    ]
    checks = 0
    mismatches = 0
    for lu in maps:
        for v in fracs:
            sequence = build_test_sequence(v, lu)
            for vp in fracs:
                want = any(rlu_contains(v, w, lu) for w in candidates[vp])
                checks += 1
                if executable_from(vp, sequence) != want:
                    mismatches += 1
    report(
        "AC4 test sequences match the delay sweep",
        mismatches == 0,
        f"{checks} valuation pairs, {mismatches} mismatches",
    )


def test_ac5_min_region_weight_matches_enumeration(corpus2):
    forced_high = DistanceGraph.top(3).constrained(
        [(1, 0, wle(-3)), (2, 0, wle(0))]
    )
    zones = corpus2 + [forced_high]
    alphas = [(0, 2, 2), (0, 1, 2), (0, 3, 1), (0, 0, 2)]
    checks = 0
    infinite_seen = 0
    mismatches = 0
    for zone in zones:
        for alpha in alphas:
            regions = enumerate_regions_intersecting(zone, alpha)
            assert regions
            for x, y in itertools.permutations(range(3), 2):
                want = min(region_to_dbm(r).weight(y, x) for r in regions)
                got = min_region_weight(zone, x, y, alpha)
                checks += 1
                infinite_seen += got.is_infinite
                if got != want:
                    mismatches += 1
    report(
        "AC5 minimal region weight equals brute-force minimum",
        mismatches == 0 and infinite_seen > 0,
        f"{checks} zone/pair combos, {mismatches} mismatches,"
        f" {infinite_seen} infinite results",
    )


def test_ac6_inverse_graph_equals_preorder_witnesses():
    denom = grid_resolution(2)
    points = grid_points(2, 2, denom)
    fracs = [fractions_of(row, denom) for row in points]
    # The witness side needs one extra halving: a preorder witness can be
    # pinned exactly to vp in one clock while another clock's fraction must
    # fall strictly between vp's finest grid fraction and the next integer,
    # e.g. v = (5/6, 23/12) for vp = (5/6, 2) under L=(1,2), U=(2,1).
    wdenom = 2 * denom
    wpoints = grid_points(2, 2, wdenom)
    wfracs = [fractions_of(row, wdenom) for row in wpoints]
    checks = 0
    mismatches = 0
    for lu in diverse_maps2():
        alpha = lu.alpha()
        members = defaultdict(list)
        for v in wfracs:
            members[region_of(v, alpha)].append(v)
        for region in all_region_descriptors(alpha):
            witnesses = members[region]
            assert witnesses, region
            inverse = alu_inverse_graph(region, lu)
            for vp in fracs:
                got = inverse.contains_valuation(vp)
                want = any(lu_preorder(v, vp, lu) for v in witnesses)
                checks += 1
                if got != want:
                    mismatches += 1
    report(
        "AC6 inverse graph realizes the simulation preorder",
        mismatches == 0,
        f"{checks} region/valuation checks, {mismatches} mismatches",
    )


@pytest.fixture(scope="module")
def ac7_runs():
    rng = random.Random(977)
    rows = []
    draws = 0
    subset_skipped = 0
    alu_budget_hits = 0
    while len(rows) < 500:
        draws += 1
        automaton = random_automaton(rng)
        want = region_graph_reachability(automaton)
        try:
            alu = reachability(automaton, inclusion=Inclusion.ALU)
        except BudgetExceededError:
            alu_budget_hits += 1
            continue
        try:
            subset = reachability(automaton, inclusion=Inclusion.SUBSET, budget=800)
        except BudgetExceededError:
            subset_skipped += 1
            continue
        rows.append((automaton, want, alu, subset))
    return {
        "rows": rows,
        "draws": draws,
        "subset_skipped": subset_skipped,
        "alu_budget_hits": alu_budget_hits,
    }


def test_ac7_explorer_verdicts_match_region_oracle(ac7_runs):
    mismatched = [
        print_model(automaton)
        for automaton, want, alu, subset in ac7_runs["rows"]
        if alu.reachable != want or subset.reachable != want
    ]
    ok = (
        not mismatched
        and ac7_runs["alu_budget_hits"] == 0
        and len(ac7_runs["rows"]) >= 500
    )
    report(
        "AC7 explorer verdicts equal region-graph oracle",
        ok,
        f"{len(ac7_runs['rows'])} automata ({ac7_runs['draws']} draws,"
        f" {ac7_runs['subset_skipped']} subset-divergent skipped),"
        f" {len(mismatched)} mismatches,"
        f" {ac7_runs['alu_budget_hits']} abstraction budget hits",
    )
    assert not mismatched, mismatched[:1]


def test_ac8_abstraction_visits_no_more_nodes(ac7_runs):
    regressions = sum(
        1
        for _, _, alu, subset in ac7_runs["rows"]
        if alu.stats.nodes_visited > subset.stats.nodes_visited
    )
    strict = sum(
        1
        for _, _, alu, subset in ac7_runs["rows"]
        if alu.stats.nodes_visited < subset.stats.nodes_visited
    )

    diverge = parse_model((MODELS / "diverge.ta").read_text())
    alu = reachability(diverge, inclusion=Inclusion.ALU)
    subset = reachability(diverge, inclusion=Inclusion.SUBSET)
    golden = (
        alu.summary_line() == "verdict=U visited=2 subsumed=1 tests=1"
        and subset.summary_line() == "verdict=U visited=3 subsumed=1 tests=3"
        and alu.stats.nodes_visited < subset.stats.nodes_visited
    )
    with pytest.raises(BudgetExceededError):
        reachability(diverge, inclusion=Inclusion.NONE, budget=100)

    report(
        "AC8 abstraction never visits more nodes",
        regressions == 0 and golden,
        f"{len(ac7_runs['rows'])} automata, {regressions} regressions,"
        f" {strict} strictly better, diverge golden "
        f"{'ok' if golden else 'wrong'}",
    )


def test_ac9_canonicalization_tightens_through_reference():
    # Rows are indexed reference, y, x: the zone is x-y >= 1, y < 2, x > 4.
    raw = DistanceGraph.from_weights(
        [
            [wle(0), wlt(2), INF_WEIGHT],
            [INF_WEIGHT, wle(0), INF_WEIGHT],
            [wlt(-4), wle(-1), wle(0)],
        ]
    )
    canonical = raw.canonicalize()
    changed = {
        (i, j)
        for i in range(3)
        for j in range(3)
        if canonical.weight(i, j) != raw.weight(i, j)
    }
    ok = canonical.weight(2, 1) == wlt(-2) and changed == {(2, 1)}
    report(
        "AC9 shortest path through reference tightens x-y",
        ok,
        f"entry (x,y) = {canonical.weight(2, 1)}, changed entries = {sorted(changed)}",
    )


def box_zone(n_clocks: int, upper: int) -> DistanceGraph:
    updates = [(0, i, wle(upper)) for i in range(1, n_clocks + 1)]
    updates += [(i, 0, wle(0)) for i in range(1, n_clocks + 1)]
    return DistanceGraph.top(n_clocks + 1).constrained(updates)


def _timed_call(fn, *args):
    start = time.perf_counter()
    fn(*args)
    return time.perf_counter() - start


def test_ac10_inclusion_test_is_quadratic_and_fast():
    sizes = (2, 4, 8, 16, 32)
    counts = {}
    for n in sizes:
        zone = box_zone(n, 5)
        zp = box_zone(n, 4)
        lu = LuBounds.from_pairs((1,) * n, (1,) * n)
        counter = ComparisonCounter()
        alu_includes(zone, zp, lu, counter)
        counts[n] = counter.comparisons

    ratios = {n: counts[n] / n**2 for n in sizes}
    low, high = min(ratios.values()), max(ratios.values())
    scale = (low * high) ** 0.5
    deviation = max(high / scale, scale / low)

    zone, zp = box_zone(32, 5), box_zone(32, 4)
    lu = LuBounds.from_pairs((1,) * 32, (1,) * 32)
    best = min(_timed_call(alu_includes, zone, zp, lu) for _ in range(50))

    # counts[2] == 13 is the value frozen in the unit suite.
    ok = counts[2] == 13 and deviation <= 1.3 and best < 1e-3
    report(
        "AC10 comparison count fits c*n^2 and n=32 runs under 1ms",
        ok,
        f"counts={[counts[n] for n in sizes]}, max deviation {deviation:.3f},"
        f" best n=32 time {best * 1e6:.0f}us",
    )
