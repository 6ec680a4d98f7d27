"""Deterministic polygon corpus generators.

With pythagorean=True every edge direction comes from a fixed set of
rational-norm directions (axis-parallel and 3-4-5 slopes), so exact edge
inflation applies.  Combs are the classic lower-bound construction: k prongs
whose tip-visibility cones are pairwise disjoint, so k guards are necessary,
and one grid guard below each prong suffices.
"""

from __future__ import annotations

import math
import random
from fractions import Fraction
from typing import Optional

from .errors import GenerationFailed
from .geometry import Point, Polygon, pt, validate_polygon

# Rational-norm directions: the axis directions have norm 1, the slope
# directions are 3-4-5 triples with norm 5.
PYTHAGOREAN_DIRECTIONS = [
    (1, 0), (4, 3), (3, 4), (0, 1), (-3, 4), (-4, 3),
    (-1, 0), (-4, -3), (-3, -4), (0, -1), (3, -4), (4, -3),
]

GENERATOR_KINDS = ("convex", "comb", "staircase", "holes", "corridor")


def _finish(outer, holes, L: int, what: str) -> Polygon:
    poly = Polygon(tuple(outer), tuple(tuple(h) for h in holes), L)
    report = validate_polygon(poly)
    if not report.ok:
        raise GenerationFailed(f"{what} generator built an invalid polygon: "
                               f"{report}")
    return poly


def comb_polygon(k: int) -> Polygon:
    """Standard k-prong comb on 3k+3 vertices needing exactly k guards.

    Base strip [0,W] x [0,1/2]; prong i is a triangle with 3-4-5 walls, base
    width 3/4, apex at height 1.  Prong pitch 7/4 keeps the apex-visibility
    cones (full width 3/2 on the floor) pairwise disjoint.
    """
    if not 2 <= k <= 12:
        raise GenerationFailed("comb supports 2 <= k <= 12 prongs")
    W = math.ceil((k - 1) * Fraction(7, 4) + 1)
    half = Fraction(1, 2)
    ring = [pt(0, 0), pt(W, 0)]
    for i in range(k):
        r = W - i * Fraction(7, 4)
        left = r - Fraction(3, 4)
        apex_x = left + Fraction(3, 8)
        if i > 0:
            ring.append(Point(r, half))
        else:
            ring.append(Point(Fraction(W), half))
        ring.append(Point(apex_x, Fraction(1)))
        ring.append(Point(left, half))
    ring.append(pt(0, half))
    return _finish(ring, [], W, "comb")


def staircase_polygon(n: int, seed: int = 0, L: int = 4) -> Polygon:
    """Axis-parallel staircase with n vertices (n even, n >= 6)."""
    if n < 6 or n % 2:
        raise GenerationFailed("staircase needs an even vertex count >= 6")
    m = (n - 2) // 2
    rng = random.Random(seed)
    unit = Fraction(1, 4)
    span = 4 * L
    for _ in range(64):
        xs = sorted(rng.sample(range(1, span), m - 1), reverse=True)
        ys = sorted(rng.sample(range(1, span), m - 1))
        ys.append(rng.randrange(max(ys) + 1 if ys else 1, span + 1))
        x_steps = [Fraction(v) * unit for v in xs]
        y_steps = [Fraction(v) * unit for v in ys]
        W = Fraction(L)
        ring = [pt(0, 0), Point(W, Fraction(0))]
        prev_x = W
        for i in range(m):
            y = y_steps[i]
            ring.append(Point(prev_x, y))
            nxt = x_steps[i] if i < m - 1 else Fraction(0)
            ring.append(Point(nxt, y))
            prev_x = nxt
        poly = Polygon(tuple(ring), (), L)
        if validate_polygon(poly).ok:
            return poly
    raise GenerationFailed("staircase generator exhausted its retries")


def convex_polygon(n: int, pythagorean: bool = False, seed: int = 0) -> Polygon:
    if pythagorean:
        return _convex_pythagorean(n, seed)
    return _convex_valtr(n, seed)


def _convex_pythagorean(n: int, seed: int) -> Polygon:
    if n % 2 or not 4 <= n <= 12:
        raise GenerationFailed(
            "pythagorean convex polygons need an even vertex count in [4, 12]")
    rng = random.Random(seed)
    half = PYTHAGOREAN_DIRECTIONS[:6]
    dirs = sorted(rng.sample(range(6), n // 2))
    lengths = [Fraction(rng.randint(1, 3), 4) for _ in dirs]
    # Point symmetry closes the chain exactly.
    edge_vectors = [(Fraction(half[d][0]) * l, Fraction(half[d][1]) * l)
                    for d, l in zip(dirs, lengths)]
    edge_vectors += [(-vx, -vy) for vx, vy in edge_vectors]
    cur = Point(Fraction(0), Fraction(0))
    ring = [cur]
    for vx, vy in edge_vectors[:-1]:
        cur = Point(cur.x + vx, cur.y + vy)
        ring.append(cur)
    minx = min(p.x for p in ring)
    miny = min(p.y for p in ring)
    ring = [Point(p.x - minx, p.y - miny) for p in ring]
    L = max(1, math.ceil(max(max(p.x, p.y) for p in ring)))
    return _finish(ring, [], L, "convex")


def _convex_valtr(n: int, seed: int) -> Polygon:
    """Valtr's construction of a random convex lattice polygon."""
    if n < 3:
        raise GenerationFailed("convex polygons need at least 3 vertices")
    rng = random.Random(seed)
    span = 4 * max(4, n)
    for _ in range(64):
        xs = sorted(rng.randrange(span + 1) for _ in range(n))
        ys = sorted(rng.randrange(span + 1) for _ in range(n))

        def chains(vals):
            lo, hi = vals[0], vals[-1]
            last_top, last_bot = lo, lo
            deltas = []
            for v in vals[1:-1]:
                if rng.random() < 0.5:
                    deltas.append(v - last_top)
                    last_top = v
                else:
                    deltas.append(last_bot - v)
                    last_bot = v
            deltas.append(hi - last_top)
            deltas.append(last_bot - hi)
            return deltas

        dx = chains(xs)
        dy = chains(ys)
        rng.shuffle(dy)
        vectors = sorted(
            zip(dx, dy),
            key=lambda v: (math.atan2(v[1], v[0])))
        if any(vx == 0 and vy == 0 for vx, vy in vectors):
            continue
        cur = (0, 0)
        ring = []
        for vx, vy in vectors:
            ring.append(cur)
            cur = (cur[0] + vx, cur[1] + vy)
        minx = min(x for x, _ in ring)
        miny = min(y for _, y in ring)
        ring = [pt(x - minx, y - miny) for x, y in ring]
        L = max(1, max(max(int(p.x), int(p.y)) for p in ring))
        poly = Polygon(tuple(ring), (), L)
        if validate_polygon(poly).ok:
            return poly
    raise GenerationFailed("convex generator exhausted its retries")


def holes_polygon(n: int, h: int, seed: int = 0, L: int = 4) -> Polygon:
    """Axis-parallel outer ring with h unit-ish square holes inside."""
    if not 0 <= h <= 4:
        raise GenerationFailed("holes generator supports 0 <= h <= 4")
    rng = random.Random(seed)
    if n == 4:
        outer = [pt(0, 0), pt(L, 0), pt(L, L), pt(0, L)]
        outer_poly = Polygon(tuple(outer), (), L)
    else:
        outer_poly = staircase_polygon(n, seed=seed, L=L)
        outer = list(outer_poly.outer)
    side = Fraction(1, 2)
    for _ in range(256):
        holes = []
        for _ in range(h):
            hx = Fraction(rng.randrange(1, 2 * L - 1), 2)
            hy = Fraction(rng.randrange(1, 2 * L - 1), 2)
            holes.append([
                Point(hx, hy), Point(hx, hy + side),
                Point(hx + side, hy + side), Point(hx + side, hy),
            ])
        poly = Polygon(tuple(outer), tuple(tuple(hh) for hh in holes), L)
        if validate_polygon(poly).ok:
            return poly
    raise GenerationFailed("holes generator exhausted its retries")


def corridor_probe_polygon() -> Polygon:
    """Fixed 12-vertex rectilinear polygon with one precision-pinned feature.

    A narrow side corridor at height 1/3 (not dyadic) forces any cover to
    place a guard in a horizontal slab of width 1/512 + 2t after inflation
    by t, so the dyadic grid level that first admits a solution, and with it
    the guard bit cost, tracks log2(1/t).
    """
    y1 = Fraction(1, 3)
    h0 = Fraction(1, 512)
    ring = [
        pt(1, 0), pt(2, 0),
        Point(Fraction(2), y1), Point(Fraction(3), y1),
        Point(Fraction(3), y1 + h0), Point(Fraction(2), y1 + h0),
        pt(2, 1), pt(1, 1),
        Point(Fraction(1), Fraction(2, 3)), Point(Fraction(0), Fraction(2, 3)),
        Point(Fraction(0), Fraction(1, 6)), Point(Fraction(1), Fraction(1, 6)),
    ]
    return _finish(ring, [], 3, "corridor")


def gen_polygon(kind: str, n: int = 0, k: int = 0, h: int = 0,
                pythagorean: bool = False, seed: int = 0,
                L: Optional[int] = None) -> Polygon:
    """Dispatch over the corpus kinds; all outputs are validated."""
    kind = kind.lower()
    if kind == "convex":
        return convex_polygon(n, pythagorean=pythagorean, seed=seed)
    if kind == "comb":
        return comb_polygon(k or n // 3)
    if kind == "staircase":
        return staircase_polygon(n, seed=seed, L=L or 4)
    if kind == "holes":
        return holes_polygon(n or 4, h, seed=seed, L=L or 4)
    if kind == "corridor":
        return corridor_probe_polygon()
    raise GenerationFailed(f"unknown polygon kind {kind!r}")
