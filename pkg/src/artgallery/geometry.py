"""Exact rational 2D kernel: points, segments, lines, polygons, predicates.

Every coordinate in this package is a ``fractions.Fraction``; nothing in this
module ever rounds.  Hot predicates avoid Fraction arithmetic by working on
numerator/denominator integer pairs directly, which is roughly an order of
magnitude faster than operating on Fraction objects.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterator, Optional, Sequence, Union


class Orientation(Enum):
    LEFT = 1
    COLLINEAR = 0
    RIGHT = -1


class Location(Enum):
    INTERIOR = "interior"
    BOUNDARY = "boundary"
    EXTERIOR = "exterior"


def _as_fraction(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, str):
        return Fraction(v)
    raise TypeError(f"coordinate must be rational, got {type(v).__name__}")


@dataclass(frozen=True, slots=True)
class Point:
    x: Fraction
    y: Fraction

    def __sub__(self, other: "Point") -> "Point":
        return Point(self.x - other.x, self.y - other.y)

    def __add__(self, other: "Point") -> "Point":
        return Point(self.x + other.x, self.y + other.y)

    def scaled(self, k: Fraction) -> "Point":
        return Point(self.x * k, self.y * k)

    def __repr__(self) -> str:
        return f"({self.x}, {self.y})"


def pt(x, y) -> Point:
    """Build a Point, coercing ints/strings to exact fractions."""
    return Point(_as_fraction(x), _as_fraction(y))


def midpoint(a: Point, b: Point) -> Point:
    return Point((a.x + b.x) / 2, (a.y + b.y) / 2)


def dist2(a: Point, b: Point) -> Fraction:
    """Exact squared Euclidean distance."""
    dx = a.x - b.x
    dy = a.y - b.y
    return dx * dx + dy * dy


@dataclass(frozen=True, slots=True)
class Segment:
    a: Point
    b: Point

    def __post_init__(self):
        if self.a == self.b:
            raise ValueError(f"degenerate segment at {self.a}")

    def reversed(self) -> "Segment":
        return Segment(self.b, self.a)


# ---------------------------------------------------------------------------
# Sign predicates on raw numerator/denominator pairs (hot path).

def _orient_sign(p: Point, q: Point, r: Point) -> int:
    """Sign of the cross product (q-p) x (r-p) without Fraction arithmetic.

    (qx-px)(ry-py) - (qy-py)(rx-px) over positive denominators: each factor
    is a numerator over the product of its operands' denominators, so each
    term is cross-multiplied by the other term's denominator product.
    """
    px, py, qx, qy, rx, ry = p.x, p.y, q.x, q.y, r.x, r.y
    a1 = qx.numerator * px.denominator - px.numerator * qx.denominator
    a2 = ry.numerator * py.denominator - py.numerator * ry.denominator
    a3 = qy.numerator * py.denominator - py.numerator * qy.denominator
    a4 = rx.numerator * px.denominator - px.numerator * rx.denominator
    s = (a1 * a2 * (qy.denominator * py.denominator * rx.denominator * px.denominator)
         - a3 * a4 * (qx.denominator * px.denominator * ry.denominator * py.denominator))
    return (s > 0) - (s < 0)


def orientation(p: Point, q: Point, r: Point) -> Orientation:
    """Orientation of the ordered triple (p, q, r): exact cross product sign."""
    return Orientation(_orient_sign(p, q, r))


def _between_1d(lo: Fraction, v: Fraction, hi: Fraction) -> bool:
    if lo > hi:
        lo, hi = hi, lo
    return lo <= v <= hi


def point_on_segment(p: Point, a: Point, b: Point) -> bool:
    """True iff p lies on the closed segment ab."""
    if _orient_sign(a, b, p) != 0:
        return False
    return _between_1d(a.x, p.x, b.x) and _between_1d(a.y, p.y, b.y)


def line_through(a: Point, b: Point) -> "Line":
    return Line.from_points(a, b)


def _line_params(a: Point, b: Point) -> tuple[Fraction, Fraction, Fraction]:
    # a*x + b*y = c through two points
    ca = b.y - a.y
    cb = a.x - b.x
    cc = ca * a.x + cb * a.y
    return ca, cb, cc


@dataclass(frozen=True, slots=True)
class Line:
    """Line a*x + b*y = c with integer coefficients, gcd 1, leading sign +."""

    a: Fraction
    b: Fraction
    c: Fraction

    @staticmethod
    def of(a, b, c) -> "Line":
        a, b, c = _as_fraction(a), _as_fraction(b), _as_fraction(c)
        if a == 0 and b == 0:
            raise ValueError("line coefficients (a, b) must not both be zero")
        # Clear denominators, reduce by gcd, fix the sign of the first
        # nonzero of (a, b).
        m = math.lcm(a.denominator, b.denominator, c.denominator)
        ia, ib, ic = int(a * m), int(b * m), int(c * m)
        g = math.gcd(ia, ib, ic)
        ia, ib, ic = ia // g, ib // g, ic // g
        lead = ia if ia != 0 else ib
        if lead < 0:
            ia, ib, ic = -ia, -ib, -ic
        return Line(Fraction(ia), Fraction(ib), Fraction(ic))

    @staticmethod
    def from_points(p: Point, q: Point) -> "Line":
        if p == q:
            raise ValueError("cannot build a line through coincident points")
        return Line.of(*_line_params(p, q))

    def side_sign(self, p: Point) -> int:
        v = self.a * p.x + self.b * p.y - self.c
        return (v > 0) - (v < 0)

    def contains(self, p: Point) -> bool:
        return self.side_sign(p) == 0


def line_intersection(l1: Line, l2: Line) -> Optional[Point]:
    """Unique intersection point of two lines, or None if parallel."""
    det = l1.a * l2.b - l2.a * l1.b
    if det == 0:
        return None
    x = (l1.c * l2.b - l2.c * l1.b) / det
    y = (l1.a * l2.c - l2.a * l1.c) / det
    return Point(x, y)


def _segment_line_crossing(a: Point, b: Point, c: Point, d: Point) -> Point:
    """Intersection point of lines ab and cd (caller guarantees non-parallel)."""
    r = b - a
    s = d - c
    denom = r.x * s.y - r.y * s.x
    t = ((c.x - a.x) * s.y - (c.y - a.y) * s.x) / denom
    return Point(a.x + t * r.x, a.y + t * r.y)


IntersectionResult = Union[None, Point, Segment]


def segment_intersection(s1: Segment, s2: Segment) -> IntersectionResult:
    """Exact classification of the intersection of two closed segments.

    Returns None (disjoint), a Point (proper crossing or endpoint touch), or
    a Segment (collinear overlap of positive length).
    """
    a, b, c, d = s1.a, s1.b, s2.a, s2.b
    d1 = _orient_sign(c, d, a)
    d2 = _orient_sign(c, d, b)
    d3 = _orient_sign(a, b, c)
    d4 = _orient_sign(a, b, d)

    if d1 == d2 == d3 == d4 == 0:
        # Collinear: overlap interval along the dominant axis.
        if a.x != b.x or c.x != d.x:
            key = lambda p: p.x
        else:
            key = lambda p: p.y
        lo1, hi1 = sorted((a, b), key=key)
        lo2, hi2 = sorted((c, d), key=key)
        lo = lo1 if key(lo1) >= key(lo2) else lo2
        hi = hi1 if key(hi1) <= key(hi2) else hi2
        if key(lo) > key(hi):
            return None
        if lo == hi:
            return lo
        return Segment(lo, hi)

    if d1 * d2 < 0 and d3 * d4 < 0:
        return _segment_line_crossing(a, b, c, d)

    # Endpoint touching: at most one shared point when not collinear.
    if d1 == 0 and point_on_segment(a, c, d):
        return a
    if d2 == 0 and point_on_segment(b, c, d):
        return b
    if d3 == 0 and point_on_segment(c, a, b):
        return c
    if d4 == 0 and point_on_segment(d, a, b):
        return d
    return None


# ---------------------------------------------------------------------------
# Polygon

def signed_area2(ring: Sequence[Point]) -> Fraction:
    """Twice the signed area of a ring (positive for counterclockwise)."""
    total = Fraction(0)
    n = len(ring)
    for i in range(n):
        a = ring[i]
        b = ring[(i + 1) % n]
        total += a.x * b.y - b.x * a.y
    return total


@dataclass(frozen=True)
class Polygon:
    """Polygon with a counterclockwise outer ring and clockwise holes.

    ``L`` is the declared bounding parameter: input polygons live in
    [0, L]^2, while perturbation outputs may use the symmetric box
    [-L, L]^2 (an inflation of a polygon touching the origin necessarily
    acquires negative coordinates).
    """

    outer: tuple[Point, ...]
    holes: tuple[tuple[Point, ...], ...]
    L: int

    @staticmethod
    def of(outer, holes=(), L: int = 0) -> "Polygon":
        ring = tuple(pt(x, y) for x, y in outer)
        hs = tuple(tuple(pt(x, y) for x, y in h) for h in holes)
        if L <= 0:
            hi = max((max(abs(p.x), abs(p.y)) for p in ring), default=Fraction(1))
            L = max(1, math.ceil(hi))
        return Polygon(ring, hs, L)

    def rings(self) -> Iterator[tuple[Point, ...]]:
        yield self.outer
        yield from self.holes

    def edges(self) -> Iterator[tuple[Point, Point]]:
        """All directed edges, interior on the left (outer CCW, holes CW)."""
        for ring in self.rings():
            n = len(ring)
            for i in range(n):
                yield ring[i], ring[(i + 1) % n]

    @property
    def n_vertices(self) -> int:
        return len(self.outer) + sum(len(h) for h in self.holes)

    def area2(self) -> Fraction:
        """Twice the enclosed area (holes subtracted)."""
        return signed_area2(self.outer) + sum(
            (signed_area2(h) for h in self.holes), Fraction(0)
        )

    def bbox(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        xs = [p.x for p in self.outer]
        ys = [p.y for p in self.outer]
        return min(xs), min(ys), max(xs), max(ys)

    def with_rings(self, outer, holes) -> "Polygon":
        hi = max(
            max(abs(p.x), abs(p.y))
            for ring in [outer, *holes]
            for p in ring
        )
        return Polygon(tuple(outer), tuple(tuple(h) for h in holes),
                       max(self.L, math.ceil(hi)))


def point_in_ring(p: Point, ring: Sequence[Point]) -> Location:
    """Exact location of p relative to a single closed ring."""
    n = len(ring)
    for i in range(n):
        if point_on_segment(p, ring[i], ring[(i + 1) % n]):
            return Location.BOUNDARY
    inside = False
    py = p.y
    for i in range(n):
        a = ring[i]
        b = ring[(i + 1) % n]
        if (a.y > py) != (b.y > py):
            # Ray to +x crosses the edge iff p is strictly on the side of
            # the directed edge facing the crossing half-plane.
            s = _orient_sign(a, b, p)
            if b.y > a.y:
                if s > 0:
                    inside = not inside
            else:
                if s < 0:
                    inside = not inside
    return Location.INTERIOR if inside else Location.EXTERIOR


def point_in_polygon(p: Point, poly: Polygon) -> Location:
    """Location of p in the polygon; points inside a hole are EXTERIOR."""
    loc = point_in_ring(p, poly.outer)
    if loc is not Location.INTERIOR:
        return loc
    for hole in poly.holes:
        hl = point_in_ring(p, hole)
        if hl is Location.BOUNDARY:
            return Location.BOUNDARY
        if hl is Location.INTERIOR:
            return Location.EXTERIOR
    return Location.INTERIOR


# ---------------------------------------------------------------------------
# Validation

@dataclass(frozen=True)
class Violation:
    kind: str
    detail: str


@dataclass(frozen=True)
class ValidityReport:
    violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}

    def __str__(self) -> str:
        if self.ok:
            return "valid"
        return "; ".join(f"{v.kind}: {v.detail}" for v in self.violations)


def _ring_violations(ring: Sequence[Point], name: str, want_ccw: bool) -> list[Violation]:
    out: list[Violation] = []
    n = len(ring)
    if n < 3:
        out.append(Violation("too-few-vertices", f"{name} has {n} vertices"))
        return out
    seen: dict[Point, int] = {}
    for i, p in enumerate(ring):
        if p in seen:
            out.append(Violation("repeated-vertex",
                                 f"{name} vertices {seen[p]} and {i} coincide at {p}"))
        else:
            seen[p] = i
    if out:
        return out

    area = signed_area2(ring)
    if want_ccw and area <= 0:
        out.append(Violation("orientation", f"{name} ring is not counterclockwise"))
    if not want_ccw and area >= 0:
        out.append(Violation("orientation", f"{name} ring is not clockwise"))

    for i in range(n):
        a, b, c = ring[i - 1], ring[i], ring[(i + 1) % n]
        if _orient_sign(a, b, c) == 0:
            out.append(Violation("collinear-triple",
                                 f"{name} vertices {(i - 1) % n},{i},{(i + 1) % n} are collinear"))

    for i in range(n):
        for j in range(i + 1, n):
            s1 = Segment(ring[i], ring[(i + 1) % n])
            s2 = Segment(ring[j], ring[(j + 1) % n])
            hit = segment_intersection(s1, s2)
            adjacent = j == i + 1 or (i == 0 and j == n - 1)
            if adjacent:
                shared = ring[j] if j == i + 1 else ring[0]
                if not (isinstance(hit, Point) and hit == shared):
                    out.append(Violation(
                        "self-intersection",
                        f"{name} edges {i} and {j} overlap beyond their shared vertex"))
            elif hit is not None:
                out.append(Violation("self-intersection",
                                     f"{name} edges {i} and {j} intersect"))
    return out


def validate_polygon(poly: Polygon) -> ValidityReport:
    """Check every structural invariant; an empty report means valid."""
    out: list[Violation] = []
    if poly.L <= 0:
        out.append(Violation("bad-bound", f"L must be positive, got {poly.L}"))
        return ValidityReport(tuple(out))

    out.extend(_ring_violations(poly.outer, "outer", want_ccw=True))
    for h, hole in enumerate(poly.holes):
        out.extend(_ring_violations(hole, f"hole {h}", want_ccw=False))

    bound = Fraction(poly.L)
    for ring_name, ring in [("outer", poly.outer)] + [
        (f"hole {i}", h) for i, h in enumerate(poly.holes)
    ]:
        for i, p in enumerate(ring):
            if abs(p.x) > bound or abs(p.y) > bound:
                out.append(Violation("out-of-bounds",
                                     f"{ring_name} vertex {i} at {p} outside [-{poly.L}, {poly.L}]^2"))

    if any(v.kind in ("too-few-vertices", "repeated-vertex") for v in out):
        return ValidityReport(tuple(out))

    # Holes must sit strictly inside the outer ring and avoid each other.
    outer_edges = [Segment(poly.outer[i], poly.outer[(i + 1) % len(poly.outer)])
                   for i in range(len(poly.outer))]
    hole_edges = []
    for h, hole in enumerate(poly.holes):
        hole_edges.append([Segment(hole[i], hole[(i + 1) % len(hole)])
                           for i in range(len(hole))])
    for h, hole in enumerate(poly.holes):
        if any(point_in_ring(p, poly.outer) is not Location.INTERIOR for p in hole):
            out.append(Violation("hole-outside",
                                 f"hole {h} is not strictly inside the outer ring"))
        else:
            for e1 in hole_edges[h]:
                if any(segment_intersection(e1, e2) is not None for e2 in outer_edges):
                    out.append(Violation("hole-outside",
                                         f"hole {h} touches the outer boundary"))
                    break
    for h1 in range(len(poly.holes)):
        for h2 in range(h1 + 1, len(poly.holes)):
            crossing = any(
                segment_intersection(e1, e2) is not None
                for e1 in hole_edges[h1] for e2 in hole_edges[h2]
            )
            nested = (point_in_ring(poly.holes[h1][0], poly.holes[h2]) is Location.INTERIOR
                      or point_in_ring(poly.holes[h2][0], poly.holes[h1]) is Location.INTERIOR)
            if crossing or nested:
                out.append(Violation("hole-overlap",
                                     f"holes {h1} and {h2} are not disjoint"))
    return ValidityReport(tuple(out))
