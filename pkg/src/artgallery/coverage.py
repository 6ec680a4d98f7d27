"""Guard-set verification via arrangement witnesses, plus a sampling oracle.

Coverage by a fixed set of visibility regions is constant on every face of
the arrangement of the polygon edges and the region boundaries, so checking
one interior representative per face checks the whole polygon.  Failures come
with an exact uncovered point.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .errors import GuardOutsidePolygon
from .arrangement import Arrangement
from .geometry import (
    Location,
    Point,
    Polygon,
    Segment,
    point_in_polygon,
)
from .visibility import VisibilityPolygon, _sees_unchecked, visibility_polygon


@dataclass(frozen=True)
class GuardSet:
    guards: tuple[Point, ...]

    @staticmethod
    def of(points) -> "GuardSet":
        return GuardSet(tuple(points))

    def __len__(self) -> int:
        return len(self.guards)

    def __iter__(self):
        return iter(self.guards)


@dataclass(frozen=True)
class CoverageReport:
    covered: bool
    uncovered_witness: Optional[Point]
    faces_checked: int


def _ring_segments(ring: Sequence[Point]) -> list[Segment]:
    out = []
    n = len(ring)
    for i in range(n):
        a, b = ring[i], ring[(i + 1) % n]
        if a != b:
            out.append(Segment(a, b))
    return out


def witness_points(P: Polygon, regions: Sequence[VisibilityPolygon]) -> list[Point]:
    """One interior representative per face of the coverage arrangement.

    The arrangement is induced by the polygon edges together with every
    region boundary; representatives falling outside the polygon (or inside
    a hole) are dropped.
    """
    if not regions:
        raise ValueError("witness_points requires at least one region")
    segments: list[Segment] = [Segment(a, b) for a, b in P.edges()]
    for region in regions:
        segments.extend(_ring_segments(region.boundary))
    arr = Arrangement(segments)
    return [
        rep
        for rep in arr.face_representatives()
        if point_in_polygon(rep, P) is Location.INTERIOR
    ]


def verify_guard_set(P: Polygon, G: GuardSet) -> CoverageReport:
    """Exact coverage decision; failures carry an unseen witness point."""
    if not G.guards:
        raise ValueError("guard set must be non-empty")
    for g in G.guards:
        if point_in_polygon(g, P) is Location.EXTERIOR:
            raise GuardOutsidePolygon(f"guard {g} lies outside the polygon")
    regions = [visibility_polygon(P, g) for g in G.guards]
    witnesses = witness_points(P, regions)
    for w in witnesses:
        if not any(region.covers(w) for region in regions):
            return CoverageReport(False, w, len(witnesses))
    return CoverageReport(True, None, len(witnesses))


def _scaled_copy(P: Polygon, guards: Sequence[Point], extra_pow2: int):
    """Rescale polygon and guards to integer coordinates.

    Integer-coordinate Fractions make the exact predicates several times
    faster; extra_pow2 leaves room for dyadic sample coordinates.
    """
    import math

    den = 1
    for ring in P.rings():
        for p in ring:
            den = math.lcm(den, p.x.denominator, p.y.denominator)
    for g in guards:
        den = math.lcm(den, g.x.denominator, g.y.denominator)
    scale = den << extra_pow2

    def sp(p: Point) -> Point:
        return Point(Fraction(int(p.x * scale)), Fraction(int(p.y * scale)))

    poly = Polygon(
        tuple(sp(p) for p in P.outer),
        tuple(tuple(sp(p) for p in h) for h in P.holes),
        max(1, P.L * scale),
    )
    return scale, poly, [sp(g) for g in guards]


def _pip_int(edges, px: int, py: int) -> int:
    """Integer-lattice point location: 1 interior, 0 boundary, -1 exterior."""
    inside = False
    for ax, ay, bx, by in edges:
        if (ay > py) != (by > py):
            d = (bx - ax) * (py - ay) - (by - ay) * (px - ax)
            if d == 0:
                return 0
            if by > ay:
                if d < 0:
                    inside = not inside
            elif d > 0:
                inside = not inside
        elif ay == py and by == py:
            if (ax <= px <= bx) or (bx <= px <= ax):
                return 0
        elif ay == py and ax == px:
            return 0
        elif by == py and bx == px:
            return 0
    return 1 if inside else -1


def _sees_int(edges, gx: int, gy: int, px: int, py: int) -> Optional[bool]:
    """Fast integer visibility test; None when a degenerate contact needs
    the careful rational path.

    Requires (px, py) strictly interior: endpoint-only contacts at the guard
    are then harmless, because an open segment that avoids the boundary and
    ends next to an interior point is itself interior.
    """
    lox, hix = (gx, px) if gx <= px else (px, gx)
    loy, hiy = (gy, py) if gy <= py else (py, gy)
    dx = px - gx
    dy = py - gy
    for ax, ay, bx, by in edges:
        if (ax < lox and bx < lox) or (ax > hix and bx > hix):
            continue
        if (ay < loy and by < loy) or (ay > hiy and by > hiy):
            continue
        a_shared = (ax == gx and ay == gy) or (ax == px and ay == py)
        b_shared = (bx == gx and by == gy) or (bx == px and by == py)
        if a_shared or b_shared:
            if a_shared and b_shared:
                continue  # segment runs exactly along this boundary edge
            # An endpoint contact blocks nothing unless the edge continues
            # along the segment's line (collinear overlap).
            ox, oy = (bx, by) if a_shared else (ax, ay)
            if dx * (oy - gy) - dy * (ox - gx) == 0:
                return None
            continue
        d1 = dx * (ay - gy) - dy * (ax - gx)
        d2 = dx * (by - gy) - dy * (bx - gx)
        if (d1 > 0 and d2 > 0) or (d1 < 0 and d2 < 0):
            continue
        ex = bx - ax
        ey = by - ay
        d3 = ex * (gy - ay) - ey * (gx - ax)
        d4 = ex * (py - ay) - ey * (px - ax)
        if (d3 > 0 and d4 > 0) or (d3 < 0 and d4 < 0):
            continue
        if d1 and d2 and d3 and d4:
            # Transversal crossing strictly inside the edge: the segment
            # passes to the exterior side of the boundary.
            return False
        return None
    return True


def coverage_sampling_oracle(P: Polygon, G: GuardSet, samples: int, seed: int) -> bool:
    """Monte-Carlo coverage check, independent of the exact verifier.

    Draws `samples` uniform interior points and rejects (returns False) iff
    some sample is seen by no guard.  One-sided: a reject is a proof of
    non-coverage; an accept is only evidence.
    """
    if samples <= 0:
        return True
    for g in G.guards:
        if point_in_polygon(g, P) is Location.EXTERIOR:
            raise GuardOutsidePolygon(f"guard {g} lies outside the polygon")

    bits = 32
    scale, poly, guards = _scaled_copy(P, list(G.guards), bits)
    edges = [
        (int(a.x), int(a.y), int(b.x), int(b.y)) for a, b in poly.edges()
    ]
    iguards = [(int(g.x), int(g.y)) for g in guards]
    minx, miny, maxx, maxy = poly.bbox()
    minx, miny = int(minx), int(miny)
    spanx = int(maxx) - minx
    spany = int(maxy) - miny
    rng = random.Random(seed)
    order = list(range(len(iguards)))

    produced = 0
    while produced < samples:
        x = minx + ((spanx * rng.getrandbits(bits)) >> bits)
        y = miny + ((spany * rng.getrandbits(bits)) >> bits)
        if _pip_int(edges, x, y) != 1:
            continue
        produced += 1
        p = Point(Fraction(x), Fraction(y))
        seen_by = -1
        for idx in order:
            gx, gy = iguards[idx]
            fast = _sees_int(edges, gx, gy, x, y)
            if fast is None:
                fast = _sees_unchecked(poly, guards[idx], p)
            if fast:
                seen_by = idx
                break
        if seen_by == -1:
            return False
        if order[0] != seen_by:
            order.remove(seen_by)
            order.insert(0, seen_by)
    return True
