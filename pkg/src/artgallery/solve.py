"""Grid candidates, guard rounding, and set-cover guard solvers.

Two layers:

* Matrix layer: ``CoverInstance`` is an explicit candidate x witness
  incidence structure; ``solve_exact`` (branch and bound) and
  ``solve_greedy`` operate on it.

* Polygon layer: ``solve_polygon`` finds an optimal (or greedy) guard set
  over a candidate pool by lazy witness refinement: solve the current
  instance, run the exact verifier on the proposed guards, and add the
  returned uncovered point as a new witness until the verifier accepts.
  Each added witness lies in a new face of the full visibility arrangement,
  so the loop terminates; on acceptance the solution size equals the true
  candidate-restricted optimum (covering the polygon is at least as hard as
  covering any witness subset).

``naive_algorithm`` runs iterative deepening over dyadic grids until the
restricted optimum is stable across two consecutive levels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

from .errors import BudgetExceeded, InfeasibleCandidates
from .coverage import CoverageReport, GuardSet, verify_guard_set, witness_points
from .geometry import Location, Point, Polygon, point_in_polygon
from .perturb import edge_inflate
from .visibility import VisibilityPolygon, visibility_polygon

DEFAULT_NODE_BUDGET = 10_000_000
MAX_REFINE_ROUNDS = 200


# ---------------------------------------------------------------------------
# Bit accounting

def coordinate_bits(x: Fraction) -> int:
    """Sign + ceil(log2(|num|+1)) (at least 1) + ceil(log2(den)) bits."""
    num_bits = max(1, abs(x.numerator).bit_length())
    den_bits = (x.denominator - 1).bit_length()
    return num_bits + den_bits + 1


def point_bits(p: Point) -> int:
    return coordinate_bits(p.x) + coordinate_bits(p.y)


@dataclass(frozen=True)
class BitCost:
    per_guard: tuple[int, ...]
    max_per_guard: int
    total: int


def guard_bits(G: GuardSet) -> BitCost:
    per = tuple(point_bits(g) for g in G.guards)
    return BitCost(per_guard=per,
                   max_per_guard=max(per, default=0),
                   total=sum(per))


# ---------------------------------------------------------------------------
# Grid rounding

def round_to_grid(G: GuardSet, w: Fraction) -> GuardSet:
    """Snap every guard to the nearest point of w*Z^2, ties toward -infinity."""
    w = Fraction(w)
    if w <= 0:
        raise ValueError("grid width must be positive")
    half = Fraction(1, 2)

    def snap(x: Fraction) -> Fraction:
        return math.ceil(x / w - half) * w

    return GuardSet.of(Point(snap(g.x), snap(g.y)) for g in G.guards)


@dataclass(frozen=True)
class RoundingLemmaReport:
    passed: bool
    t: Fraction
    w: Fraction
    rounded: GuardSet
    inflated: Polygon
    witness: Optional[Point]
    faces_checked: int


def check_rounding_lemma(P: Polygon, G: GuardSet, t: Fraction, w: Fraction,
                         precheck: bool = True) -> RoundingLemmaReport:
    """Round G to the w-grid and verify it guards the t-inflated polygon.

    Requires w <= t (a rational strengthening of the w <= sqrt(2)*t bound
    under which the construction is guaranteed) and a guard set that covers
    P, which is re-verified first unless the caller vouches via precheck.
    """
    t, w = Fraction(t), Fraction(w)
    if not 0 < w <= t:
        raise ValueError("need 0 < w <= t")
    if precheck:
        base = verify_guard_set(P, G)
        if not base.covered:
            raise ValueError(
                f"guard set does not cover the base polygon (witness "
                f"{base.uncovered_witness})")
    inflated = edge_inflate(P, t, exact=True)
    rounded = round_to_grid(G, w)
    rep = verify_guard_set(inflated, rounded)
    return RoundingLemmaReport(passed=rep.covered, t=t, w=w, rounded=rounded,
                               inflated=inflated, witness=rep.uncovered_witness,
                               faces_checked=rep.faces_checked)


# ---------------------------------------------------------------------------
# Row scanning: exact closed intervals of a region on a horizontal line

def region_row_intervals(rings: Sequence[Sequence[Point]],
                         y: Fraction) -> list[tuple[Fraction, Fraction]]:
    """Closed x-intervals of the even-odd region of `rings` on the line.

    Interval endpoints are boundary points and belong to the closed region;
    horizontal boundary edges and isolated vertex touches contribute
    degenerate or full spans of their own.
    """
    crossings: list[Fraction] = []
    spans: list[tuple[Fraction, Fraction]] = []
    for ring in rings:
        n = len(ring)
        for i in range(n):
            a, b = ring[i], ring[(i + 1) % n]
            if a.y == y and b.y == y:
                spans.append((min(a.x, b.x), max(a.x, b.x)))
            elif (a.y > y) != (b.y > y):
                x = a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y)
                crossings.append(x)
            if a.y == y:
                spans.append((a.x, a.x))
    crossings.sort()
    intervals = [(crossings[k], crossings[k + 1])
                 for k in range(0, len(crossings) - 1, 2)]
    intervals.extend(spans)
    intervals.sort()
    merged: list[tuple[Fraction, Fraction]] = []
    for lo, hi in intervals:
        if merged and lo <= merged[-1][1]:
            last_lo, last_hi = merged[-1]
            merged[-1] = (last_lo, max(last_hi, hi))
        else:
            merged.append((lo, hi))
    return merged


@dataclass(frozen=True)
class CandidateGrid:
    """The axis-aligned grid w*Z^2, clipped to a polygon on enumeration."""

    w: Fraction

    def __post_init__(self):
        if self.w <= 0:
            raise ValueError("grid width must be positive")

    def points_in(self, P: Polygon) -> list[Point]:
        """Grid points in closed P, in row-major (bottom-up) order."""
        return _GridIndex(P, self.w).points


class _GridIndex:
    """Grid points inside a polygon, organized in contiguous row runs so a
    region can be rasterized onto candidate indices without per-point tests."""

    def __init__(self, P: Polygon, w: Fraction, max_bits: Optional[int] = None):
        self.w = Fraction(w)
        minx, miny, maxx, maxy = P.bbox()
        self.points: list[Point] = []
        self.rows: list[tuple[int, Fraction, list[tuple[int, int, int]]]] = []
        rings = list(P.rings())
        j0 = math.ceil(miny / self.w)
        j1 = math.floor(maxy / self.w)
        for j in range(j0, j1 + 1):
            y = j * self.w
            runs: list[tuple[int, int, int]] = []
            for lo, hi in region_row_intervals(rings, y):
                i0 = math.ceil(lo / self.w)
                i1 = math.floor(hi / self.w)
                run_start = None
                for i in range(i0, i1 + 1):
                    p = Point(i * self.w, y)
                    if max_bits is not None and point_bits(p) > max_bits:
                        if run_start is not None:
                            runs.append((run_start, i - 1,
                                         len(self.points) - (i - run_start)))
                            run_start = None
                        continue
                    if run_start is None:
                        run_start = i
                    self.points.append(p)
                if run_start is not None:
                    runs.append((run_start, i1,
                                 len(self.points) - (i1 - run_start + 1)))
            if runs:
                self.rows.append((j, y, runs))

    def mark_region(self, ring: Sequence[Point]) -> int:
        """Bitmask of candidate indices lying in the closed ring region."""
        mask = 0
        w = self.w
        for _, y, runs in self.rows:
            for lo, hi in region_row_intervals([ring], y):
                i0 = math.ceil(lo / w)
                i1 = math.floor(hi / w)
                for r0, r1, base in runs:
                    s = max(i0, r0)
                    e = min(i1, r1)
                    if s <= e:
                        width = e - s + 1
                        mask |= ((1 << width) - 1) << (base + s - r0)
        return mask


# ---------------------------------------------------------------------------
# Cover instances

@dataclass(frozen=True)
class CoverInstance:
    """Candidate x witness incidence: bit j of masks[i] means candidate i
    sees witness j."""

    candidates: tuple[Point, ...]
    witnesses: tuple[Point, ...]
    masks: tuple[int, ...]

    @property
    def full_mask(self) -> int:
        return (1 << len(self.witnesses)) - 1

    def sees(self, candidate: int, witness: int) -> bool:
        return bool(self.masks[candidate] >> witness & 1)

    def uncoverable_witness(self) -> Optional[int]:
        union = 0
        for m in self.masks:
            union |= m
        missing = self.full_mask & ~union
        if missing:
            return (missing & -missing).bit_length() - 1
        return None


CandidateSource = Union[CandidateGrid, Sequence[Point]]


def build_cover_instance(P: Polygon, candidates: CandidateSource) -> CoverInstance:
    """Full cover instance: witnesses from the arrangement of the polygon
    edges and every candidate's visibility ring; incidence is exact."""
    if isinstance(candidates, CandidateGrid):
        points = candidates.points_in(P)
    else:
        points = list(candidates)
    if not points:
        raise InfeasibleCandidates("empty candidate set")
    regions = [visibility_polygon(P, c) for c in points]
    wits = witness_points(P, regions)
    masks = []
    for region in regions:
        m = 0
        for j, wit in enumerate(wits):
            if region.covers(wit):
                m |= 1 << j
        masks.append(m)
    inst = CoverInstance(tuple(points), tuple(wits), tuple(masks))
    j = inst.uncoverable_witness()
    if j is not None:
        raise InfeasibleCandidates(
            f"witness {inst.witnesses[j]} is seen by no candidate",
            witness=inst.witnesses[j])
    return inst


def _maximal_columns(inst: CoverInstance) -> list[tuple[int, int]]:
    """(index, mask) of candidates that are not dominated by an earlier or
    strictly larger column; deterministic, keeps lowest indices."""
    distinct: dict[int, int] = {}
    for i, m in enumerate(inst.masks):
        if m and m not in distinct:
            distinct[m] = i
    kept: list[tuple[int, int]] = []
    for m, i in distinct.items():
        dominated = any(m | m2 == m2 for m2, _ in kept)
        if dominated:
            continue
        kept = [(m2, i2) for m2, i2 in kept if m2 | m != m]
        kept.append((m, i))
    kept.sort(key=lambda pair: pair[1])
    return [(i, m) for m, i in kept]


def solve_greedy(inst: CoverInstance) -> GuardSet:
    """Classic greedy set cover; ties broken toward the lowest index."""
    j = inst.uncoverable_witness()
    if j is not None:
        raise InfeasibleCandidates(
            f"witness {inst.witnesses[j]} is seen by no candidate",
            witness=inst.witnesses[j])
    uncovered = inst.full_mask
    chosen: list[int] = []
    while uncovered:
        best_i = -1
        best_gain = 0
        for i, m in enumerate(inst.masks):
            gain = (m & uncovered).bit_count()
            if gain > best_gain:
                best_gain = gain
                best_i = i
        uncovered &= ~inst.masks[best_i]
        chosen.append(best_i)
    return GuardSet.of(inst.candidates[i] for i in chosen)


def solve_exact(inst: CoverInstance,
                node_budget: int = DEFAULT_NODE_BUDGET) -> GuardSet:
    """Minimum-cardinality cover by branch and bound.

    Upper bound from greedy, lower bound from a greedy packing of witnesses
    with pairwise disjoint candidate sets, branching on the uncovered witness
    with the fewest remaining candidates.
    """
    j = inst.uncoverable_witness()
    if j is not None:
        raise InfeasibleCandidates(
            f"witness {inst.witnesses[j]} is seen by no candidate",
            witness=inst.witnesses[j])

    columns = _maximal_columns(inst)
    W = len(inst.witnesses)
    witness_cands: list[list[int]] = [[] for _ in range(W)]
    for pos, (_, m) in enumerate(columns):
        mm = m
        while mm:
            low = mm & -mm
            witness_cands[low.bit_length() - 1].append(pos)
            mm &= mm - 1
    cand_masks = [m for _, m in columns]

    greedy = solve_greedy(inst)
    best_size = len(greedy)
    best: Optional[list[int]] = None

    full = inst.full_mask
    nodes = 0

    def lower_bound(uncovered: int) -> int:
        used = 0
        count = 0
        mm = uncovered
        while mm:
            low = mm & -mm
            j = low.bit_length() - 1
            mm &= mm - 1
            cover_union = 0
            for pos in witness_cands[j]:
                cover_union |= 1 << pos
            if cover_union & used:
                continue
            used |= cover_union
            count += 1
        return count

    def branch(uncovered: int, chosen: list[int]):
        nonlocal best, best_size, nodes
        nodes += 1
        if nodes > node_budget:
            raise BudgetExceeded(f"exceeded {node_budget} search nodes")
        if not uncovered:
            if best is None or len(chosen) < best_size:
                best_size = len(chosen)
                best = list(chosen)
            return
        if len(chosen) + lower_bound(uncovered) >= best_size:
            return
        # Branch on the uncovered witness with the fewest candidates.
        pick = -1
        pick_n = None
        mm = uncovered
        while mm:
            low = mm & -mm
            j = low.bit_length() - 1
            mm &= mm - 1
            n = len(witness_cands[j])
            if pick_n is None or n < pick_n:
                pick = j
                pick_n = n
        for pos in witness_cands[pick]:
            chosen.append(pos)
            branch(uncovered & ~cand_masks[pos], chosen)
            chosen.pop()

    branch(full, [])
    if best is None:
        return greedy
    indices = sorted(columns[pos][0] for pos in best)
    return GuardSet.of(inst.candidates[i] for i in indices)


# ---------------------------------------------------------------------------
# Polygon-level solving with lazy witness refinement

@dataclass(frozen=True)
class SolveResult:
    guards: GuardSet
    instance: CoverInstance
    report: CoverageReport
    refine_rounds: int


def _initial_witnesses(P: Polygon) -> list[Point]:
    seen = set()
    out = []
    for ring in P.rings():
        for p in ring:
            if p not in seen:
                seen.add(p)
                out.append(p)
    return out


def solve_polygon(P: Polygon, *, grid: Optional[CandidateGrid] = None,
                  candidates: Sequence[Point] = (),
                  include_vertices: bool = False,
                  mode: str = "exact",
                  max_bits: Optional[int] = None,
                  node_budget: int = DEFAULT_NODE_BUDGET,
                  max_rounds: int = MAX_REFINE_ROUNDS) -> SolveResult:
    """Optimal (or greedy) guards over grid and/or explicit candidates.

    Candidates are indexed by ascending bit cost (then bottom-up row order),
    and all solver ties break toward the lowest index, so among equal-size
    covers the cheapest-to-describe guards win.
    """
    index = _GridIndex(P, grid.w, max_bits) if grid is not None else None
    raw: list[Point] = list(index.points) if index is not None else []
    n_grid = len(raw)
    for p in list(candidates) + (_initial_witnesses(P) if include_vertices else []):
        if max_bits is not None and point_bits(p) > max_bits:
            continue
        if point_in_polygon(p, P) is Location.EXTERIOR:
            raise ValueError(f"candidate {p} lies outside the polygon")
        if p not in raw:
            raw.append(p)
    if not raw:
        raise InfeasibleCandidates("empty candidate set")

    order = sorted(range(len(raw)),
                   key=lambda k: (point_bits(raw[k]), raw[k].y, raw[k].x))
    pool = [raw[k] for k in order]
    pos_of_raw = [0] * len(raw)
    for new_i, k in enumerate(order):
        pos_of_raw[k] = new_i

    witnesses: list[Point] = _initial_witnesses(P)
    masks = [0] * len(pool)
    region_cache: dict[Point, VisibilityPolygon] = {}
    next_witness = 0

    if mode not in ("exact", "greedy"):
        raise ValueError(f"unknown mode {mode!r}")

    for round_no in range(max_rounds):
        while next_witness < len(witnesses):
            wpt = witnesses[next_witness]
            region = region_cache.get(wpt)
            if region is None:
                region = visibility_polygon(P, wpt)
                region_cache[wpt] = region
            bit = 1 << next_witness
            if index is not None:
                gmask = index.mark_region(region.boundary)
                while gmask:
                    low = gmask & -gmask
                    masks[pos_of_raw[low.bit_length() - 1]] |= bit
                    gmask &= gmask - 1
            for k in range(n_grid, len(raw)):
                if region.covers(raw[k]):
                    masks[pos_of_raw[k]] |= bit
            next_witness += 1

        inst = CoverInstance(tuple(pool), tuple(witnesses), tuple(masks))
        guards = (solve_exact(inst, node_budget) if mode == "exact"
                  else solve_greedy(inst))
        report = verify_guard_set(P, guards)
        if report.covered:
            return SolveResult(guards=guards, instance=inst, report=report,
                               refine_rounds=round_no)
        witnesses.append(report.uncovered_witness)

    raise BudgetExceeded(
        f"witness refinement did not converge in {max_rounds} rounds")


# ---------------------------------------------------------------------------
# The derandomized guess-and-check search

@dataclass(frozen=True)
class NaiveResult:
    exhausted: bool
    guards: Optional[GuardSet]
    bit_cost: Optional[BitCost]
    grid_level: Optional[int]
    grid_width: Optional[Fraction]
    levels_tried: int


def naive_algorithm(P: Polygon, max_bits: int,
                    node_budget: int = DEFAULT_NODE_BUDGET) -> NaiveResult:
    """Iterative deepening over dyadic grids w_j = L * 2^-j (plus vertices).

    Stops at the first plateau (equal restricted optimum on two consecutive
    levels) and returns the coarser level's solution; reports Exhausted when
    the per-guard bit budget admits no further candidates.
    """
    prev: Optional[SolveResult] = None
    prev_level = -1
    prev_count = -1
    j = 0
    while True:
        w = Fraction(P.L, 1 << j)
        index = _GridIndex(P, w, max_bits)
        count = len(index.points)
        result: Optional[SolveResult] = None
        if count != prev_count or prev is None:
            try:
                result = solve_polygon(P, grid=CandidateGrid(w),
                                       include_vertices=True, mode="exact",
                                       max_bits=max_bits,
                                       node_budget=node_budget)
            except InfeasibleCandidates:
                result = None
        else:
            result = prev  # identical candidate pool, identical optimum

        if result is not None and prev is not None and \
                len(result.guards) == len(prev.guards):
            cost = guard_bits(prev.guards)
            return NaiveResult(exhausted=False, guards=prev.guards,
                               bit_cost=cost, grid_level=prev_level,
                               grid_width=Fraction(P.L, 1 << prev_level),
                               levels_tried=j + 1)
        if count == prev_count and j + 4 > max_bits:
            return NaiveResult(exhausted=True, guards=None, bit_cost=None,
                               grid_level=None, grid_width=None,
                               levels_tried=j + 1)
        if result is not None:
            prev = result
            prev_level = j
        prev_count = count
        j += 1
