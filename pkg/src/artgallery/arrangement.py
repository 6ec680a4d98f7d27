"""Planar arrangement of segments with exact face representatives.

Segments are split at every pairwise intersection (including collinear
overlaps), the resulting planar graph is walked with the classic
rotational-sweep rule (interior kept on the left), and every bounded face is
reported through one interior representative point.  The representative is
found without epsilons: from the midpoint of a boundary edge, walk into the
face along the left normal and stop halfway to the first obstruction.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Optional

from .geometry import Point, Segment, segment_intersection
from .visibility import DirectionKey, _primitive_direction


def _canonical(a: Point, b: Point) -> tuple[Point, Point]:
    return (a, b) if (a.x, a.y) <= (b.x, b.y) else (b, a)


def split_segments(segments: Iterable[Segment]) -> list[tuple[Point, Point]]:
    """Subdivide segments at all mutual intersections; dedup the pieces."""
    segs: list[Segment] = []
    seen: set[tuple[Point, Point]] = set()
    for s in segments:
        key = _canonical(s.a, s.b)
        if key not in seen:
            seen.add(key)
            segs.append(Segment(*key))

    cuts: list[set[Point]] = [{s.a, s.b} for s in segs]
    for i in range(len(segs)):
        for j in range(i + 1, len(segs)):
            hit = segment_intersection(segs[i], segs[j])
            if hit is None:
                continue
            if isinstance(hit, Point):
                cuts[i].add(hit)
                cuts[j].add(hit)
            else:
                for p in (hit.a, hit.b):
                    cuts[i].add(p)
                    cuts[j].add(p)

    edges: set[tuple[Point, Point]] = set()
    for s, cut in zip(segs, cuts):
        points = sorted(cut, key=lambda p: (p.x, p.y))
        if (s.a.x, s.a.y) > (s.b.x, s.b.y):
            points.reverse()
        for p, q in zip(points, points[1:]):
            edges.add(_canonical(p, q))
    return sorted(edges, key=lambda e: (e[0].x, e[0].y, e[1].x, e[1].y))


class Arrangement:
    """Planar subdivision induced by a set of segments."""

    def __init__(self, segments: Iterable[Segment]):
        self.segments = list(segments)
        self.edges = split_segments(self.segments)
        adj: dict[Point, list[Point]] = {}
        for p, q in self.edges:
            adj.setdefault(p, []).append(q)
            adj.setdefault(q, []).append(p)
        for p, nbrs in adj.items():
            nbrs.sort(key=lambda q: DirectionKey(
                *_primitive_direction(q.x - p.x, q.y - p.y)))
        self.adj = adj

    def _next_half_edge(self, u: Point, v: Point) -> tuple[Point, Point]:
        # Arriving at v from u, leave along the clockwise-next direction
        # after the reversed edge; this keeps the traced face on the left.
        nbrs = self.adj[v]
        i = nbrs.index(u)
        return v, nbrs[i - 1]

    def positive_cycles(self) -> list[list[Point]]:
        """Boundary cycles with positive signed area: one per bounded face."""
        visited: set[tuple[Point, Point]] = set()
        half_edges = []
        for p, q in self.edges:
            half_edges.append((p, q))
            half_edges.append((q, p))
        half_edges.sort(key=lambda h: (h[0].x, h[0].y, h[1].x, h[1].y))

        cycles: list[list[Point]] = []
        for start in half_edges:
            if start in visited:
                continue
            cycle: list[Point] = []
            cur = start
            area2 = Fraction(0)
            while cur not in visited:
                visited.add(cur)
                u, v = cur
                cycle.append(u)
                area2 += u.x * v.y - v.x * u.y
                cur = self._next_half_edge(u, v)
            if cur == start and area2 > 0:
                cycles.append(cycle)
        return cycles

    def _first_obstruction(self, m: Point, nx: Fraction,
                           ny: Fraction) -> Optional[Fraction]:
        """Smallest s > 0 with m + s*(nx, ny) on some input segment."""
        best: Optional[Fraction] = None
        for seg in self.segments:
            p, q = seg.a, seg.b
            ex = q.x - p.x
            ey = q.y - p.y
            den = nx * ey - ny * ex
            wx = p.x - m.x
            wy = p.y - m.y
            if den != 0:
                s = (wx * ey - wy * ex) / den
                if s <= 0 or (best is not None and s >= best):
                    continue
                u = (wx * ny - wy * nx) / den
                if 0 <= u <= 1:
                    best = s
            else:
                if wx * ny - wy * nx != 0:
                    continue  # parallel, off the ray's line
                nn = nx * nx + ny * ny
                sp = (wx * nx + wy * ny) / nn
                sq = ((q.x - m.x) * nx + (q.y - m.y) * ny) / nn
                lo, hi = min(sp, sq), max(sp, sq)
                if hi <= 0:
                    continue
                s = lo if lo > 0 else hi
                if s > 0 and (best is None or s < best):
                    best = s
        return best

    def face_representatives(self) -> list[Point]:
        """One exact interior point per bounded face, in deterministic order."""
        reps: list[Point] = []
        for cycle in self.positive_cycles():
            u, v = cycle[0], cycle[1]
            mx = (u.x + v.x) / 2
            my = (u.y + v.y) / 2
            # Left normal of u->v points into the face.
            nx = -(v.y - u.y)
            ny = v.x - u.x
            s = self._first_obstruction(Point(mx, my), nx, ny)
            if s is None:
                # The face is bounded, so the ray must hit its far boundary.
                raise AssertionError("unbounded ray inside a bounded face")
            h = s / 2
            reps.append(Point(mx + h * nx, my + h * ny))
        return reps
