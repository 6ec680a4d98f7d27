"""Exact visibility predicates and visibility-polygon construction.

The visibility polygon is built by an angular sector sweep: sort the
directions from the guard to every polygon vertex, and inside each open
sector between consecutive directions the nearest blocking edge is constant,
so the visible boundary there is one sub-segment of that edge.  Jumps between
sectors happen along the shared event ray and become window edges; sectors
with no blocking edge pinch the region down to the guard itself.  Everything
is decided by exact sign tests; there are no epsilons anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Optional

from .errors import PointOutsidePolygon
from .geometry import (
    Location,
    Point,
    Polygon,
    Segment,
    point_in_polygon,
    point_in_ring,
    segment_intersection,
)


def _primitive_direction(dx: Fraction, dy: Fraction) -> tuple[int, int]:
    """Smallest integer vector with the same direction as (dx, dy)."""
    nx = dx.numerator * dy.denominator
    ny = dy.numerator * dx.denominator
    g = gcd(nx, ny)
    return nx // g, ny // g


def _quadrant(ix: int, iy: int) -> int:
    # Counterclockwise from the positive x axis.
    if ix > 0 and iy >= 0:
        return 0
    if ix <= 0 and iy > 0:
        return 1
    if ix < 0 and iy <= 0:
        return 2
    return 3


class DirectionKey:
    """Total angular order on directions around a point, without trigonometry.

    Primary key is the quadrant (0-3 counterclockwise from +x); within a
    quadrant directions compare by the sign of their cross product.  Keys of
    collinear same-direction vectors are equal.
    """

    __slots__ = ("ix", "iy", "quadrant")

    def __init__(self, ix: int, iy: int):
        self.ix = ix
        self.iy = iy
        self.quadrant = _quadrant(ix, iy)

    def __eq__(self, other) -> bool:
        return self.ix == other.ix and self.iy == other.iy

    def __lt__(self, other) -> bool:
        if self.quadrant != other.quadrant:
            return self.quadrant < other.quadrant
        return self.ix * other.iy - self.iy * other.ix > 0

    def __le__(self, other) -> bool:
        return self == other or self < other

    def __hash__(self) -> int:
        return hash((self.ix, self.iy))

    def __repr__(self) -> str:
        return f"DirectionKey({self.ix}, {self.iy})"


def angle_sort_key(g: Point, v: Point) -> DirectionKey:
    """Angular sort key of v around g; collinear rays get equal keys."""
    if v == g:
        raise ValueError("direction undefined for coincident points")
    return DirectionKey(*_primitive_direction(v.x - g.x, v.y - g.y))


@dataclass(frozen=True)
class VisibilityPolygon:
    """Star-shaped region of everything one guard sees, as a closed ring."""

    apex: Point
    boundary: tuple[Point, ...]

    def covers(self, p: Point) -> bool:
        """Closed-region membership of p in the visibility polygon."""
        return point_in_ring(p, self.boundary) is not Location.EXTERIOR

    def area2(self) -> Fraction:
        from .geometry import signed_area2

        return signed_area2(self.boundary)


def _cross_dir_sign(ix: int, iy: int, wx: Fraction, wy: Fraction) -> int:
    s = (ix * wy.numerator * wx.denominator
         - iy * wx.numerator * wy.denominator)
    return (s > 0) - (s < 0)


def _mid_direction(d1: tuple[int, int], d2: tuple[int, int]) -> tuple[int, int]:
    """An integer direction strictly inside the CCW sector from d1 to d2."""
    cr = d1[0] * d2[1] - d1[1] * d2[0]
    if cr > 0:
        return d1[0] + d2[0], d1[1] + d2[1]
    # Sector spans at least a half turn; 90 degrees past d1 is strictly inside.
    return -d1[1], d1[0]


def _ray_edge_point(g: Point, d: tuple[int, int], a: Point, b: Point) -> Point:
    """Intersection of ray(g, d) with the supporting line of edge ab."""
    ex = b.x - a.x
    ey = b.y - a.y
    den = d[0] * ey - d[1] * ex
    t = ((a.x - g.x) * ey - (a.y - g.y) * ex) / den
    return Point(g.x + t * d[0], g.y + t * d[1])


def visibility_polygon(P: Polygon, g: Point) -> VisibilityPolygon:
    """Exact star-shaped polygon of all points of closed P seen by g."""
    if point_in_polygon(g, P) is Location.EXTERIOR:
        raise PointOutsidePolygon(f"guard {g} lies outside the polygon")

    directions: dict[tuple[int, int], None] = {}
    for ring in P.rings():
        for v in ring:
            if v != g:
                directions.setdefault(_primitive_direction(v.x - g.x, v.y - g.y))
    events = sorted(directions, key=lambda d: DirectionKey(*d))
    edges = list(P.edges())
    m = len(events)

    pieces: list[Optional[tuple[Point, Point]]] = []
    for i in range(m):
        d1 = events[i]
        d2 = events[(i + 1) % m]
        dm = _mid_direction(d1, d2)
        best_t: Optional[Fraction] = None
        best_edge: Optional[tuple[Point, Point]] = None
        for a, b in edges:
            sa = _cross_dir_sign(dm[0], dm[1], a.x - g.x, a.y - g.y)
            sb = _cross_dir_sign(dm[0], dm[1], b.x - g.x, b.y - g.y)
            if sa * sb >= 0:
                continue
            ex = b.x - a.x
            ey = b.y - a.y
            den = dm[0] * ey - dm[1] * ex
            t = ((a.x - g.x) * ey - (a.y - g.y) * ex) / den
            if t <= 0:
                continue
            if best_t is None or t < best_t:
                best_t = t
                best_edge = (a, b)
        if best_edge is None:
            pieces.append(None)
        else:
            a, b = best_edge
            pieces.append((_ray_edge_point(g, d1, a, b),
                           _ray_edge_point(g, d2, a, b)))

    ring: list[Point] = []
    for piece in pieces:
        points = (g,) if piece is None else piece
        for p in points:
            if not ring or ring[-1] != p:
                ring.append(p)
    while len(ring) > 1 and ring[0] == ring[-1]:
        ring.pop()
    return VisibilityPolygon(apex=g, boundary=tuple(ring))


def _param_along(g: Point, p: Point, q: Point) -> Fraction:
    """Parameter of q on the segment g->p (q is known to be on the line)."""
    if p.x != g.x:
        return (q.x - g.x) / (p.x - g.x)
    return (q.y - g.y) / (p.y - g.y)


def sees(P: Polygon, g: Point, p: Point) -> bool:
    """True iff the closed segment gp is fully contained in closed P.

    Grazing contact (the segment running along an edge or through a vertex)
    counts as contained as long as no point of the segment is exterior.
    """
    if point_in_polygon(g, P) is Location.EXTERIOR:
        raise PointOutsidePolygon(f"point {g} lies outside the polygon")
    if point_in_polygon(p, P) is Location.EXTERIOR:
        raise PointOutsidePolygon(f"point {p} lies outside the polygon")
    return _sees_unchecked(P, g, p)


def _sees_unchecked(P: Polygon, g: Point, p: Point) -> bool:
    """sees() without the endpoint-membership precondition checks."""
    if g == p:
        return True

    seg = Segment(g, p)
    lox, hix = (g.x, p.x) if g.x <= p.x else (p.x, g.x)
    loy, hiy = (g.y, p.y) if g.y <= p.y else (p.y, g.y)
    cuts: set[Fraction] = set()
    for a, b in P.edges():
        # Bounding-box rejection keeps the common no-contact case cheap.
        if (a.x < lox and b.x < lox) or (a.x > hix and b.x > hix):
            continue
        if (a.y < loy and b.y < loy) or (a.y > hiy and b.y > hiy):
            continue
        hit = segment_intersection(seg, Segment(a, b))
        if hit is None:
            continue
        if isinstance(hit, Point):
            cuts.add(_param_along(g, p, hit))
        else:
            cuts.add(_param_along(g, p, hit.a))
            cuts.add(_param_along(g, p, hit.b))
    if not cuts:
        return True

    params = sorted(cuts | {Fraction(0), Fraction(1)})
    dx = p.x - g.x
    dy = p.y - g.y
    for t1, t2 in zip(params, params[1:]):
        tm = (t1 + t2) / 2
        mid = Point(g.x + tm * dx, g.y + tm * dy)
        if point_in_polygon(mid, P) is Location.EXTERIOR:
            return False
    return True
