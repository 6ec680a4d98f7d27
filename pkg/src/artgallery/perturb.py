"""Polygon perturbation models: edge inflation, edge/vertex perturbation.

All transforms are exact polygon-to-polygon maps over rationals.  Edge
offsets need the edge length; when every edge direction has a rational norm
(a Pythagorean direction such as (1,0) or (3,4)) the offset is exact,
otherwise the norm is replaced by a rational over-approximation with relative
error below 2**-precision.  Every transform re-validates its output and
raises InvalidResult when the requested magnitude breaks the polygon.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Optional, Sequence

from .errors import (
    InvalidResult,
    NonPythagoreanEdge,
    OffsetTooLarge,
    ZeroLengthEdge,
)
from .geometry import (
    Line,
    Point,
    Polygon,
    dist2,
    line_intersection,
    validate_polygon,
)

DEFAULT_NORM_PRECISION = 64
SAMPLE_RETRY_LIMIT = 16
_DYADIC_BITS = 64


class Model(Enum):
    EDGE_INFLATE = "edge-inflate"
    EDGE_PERTURB = "edge-perturb"
    VERTEX_PERTURB = "vertex-perturb"


class Side(Enum):
    OUTSIDE = "outside"
    INSIDE = "inside"


@dataclass(frozen=True)
class PerturbationSpec:
    model: Model
    delta: Fraction
    q: Optional[int] = None
    seed: int = 0

    def __post_init__(self):
        if self.delta <= 0:
            raise ValueError("perturbation magnitude must be positive")
        if self.q is not None:
            if self.model is not Model.EDGE_INFLATE:
                raise ValueError("granularity q applies to edge inflation only")
            if self.q <= 0:
                raise ValueError("granularity q must be a positive integer")


@dataclass(frozen=True)
class SampleRecord:
    """Parameters actually drawn by sample(); enough to replay the transform."""

    model: Model
    delta: Fraction
    seed: int
    attempt: int
    t: Optional[Fraction] = None
    shifts: Optional[tuple[Fraction, ...]] = None
    offsets: Optional[tuple[tuple[Fraction, Fraction], ...]] = None


@dataclass(frozen=True)
class Pointedness:
    """Certified rational lower bound beta <= alpha/8 on the pointedness."""

    beta: Fraction
    alpha_witness: int


def rational_sqrt(x: Fraction) -> Optional[Fraction]:
    """Exact square root of x if rational, else None."""
    if x < 0:
        return None
    rn = math.isqrt(x.numerator)
    rd = math.isqrt(x.denominator)
    if rn * rn == x.numerator and rd * rd == x.denominator:
        return Fraction(rn, rd)
    return None


def sqrt_upper_bound(x: Fraction, precision: int) -> Fraction:
    """Rational r >= sqrt(x) with relative error < 2**-precision."""
    if x == 0:
        return Fraction(0)
    exact = rational_sqrt(x)
    if exact is not None:
        return exact
    shift = precision
    while True:
        m = (x.numerator << (2 * shift)) // x.denominator
        s = math.isqrt(m)
        if s >= (1 << precision):
            return Fraction(s + 1, 1 << shift)
        shift += max(1, precision - s.bit_length() + 1)


def sqrt_lower_bound(x: Fraction, precision: int) -> Fraction:
    """Rational r with 0 <= r <= sqrt(x), tight to relative error 2**-precision."""
    if x == 0:
        return Fraction(0)
    exact = rational_sqrt(x)
    if exact is not None:
        return exact
    shift = precision
    while True:
        m = (x.numerator << (2 * shift)) // x.denominator
        s = math.isqrt(m)
        if s >= (1 << precision):
            return Fraction(s, 1 << shift)
        shift += max(1, precision - s.bit_length() + 1)


def edge_norm(direction: Point, exact: bool,
              precision: int = DEFAULT_NORM_PRECISION) -> Fraction:
    """Length of the direction vector: exact, or a close over-approximation."""
    if direction.x == 0 and direction.y == 0:
        raise ZeroLengthEdge("edge direction is the zero vector")
    n2 = direction.x * direction.x + direction.y * direction.y
    root = rational_sqrt(n2)
    if root is not None:
        return root
    if exact:
        raise NonPythagoreanEdge(
            f"edge direction ({direction.x}, {direction.y}) has irrational norm")
    return sqrt_upper_bound(n2, precision)


def offset_line(line: Line, edge_direction: Point, t: Fraction, side: Side,
                exact: bool = True,
                precision: int = DEFAULT_NORM_PRECISION) -> Line:
    """Parallel line at distance t from `line`, on the requested side.

    The outside of a directed edge is to the right of its direction (the
    polygon interior is kept on the left everywhere).
    """
    norm = edge_norm(edge_direction, exact, precision)
    # Outward normal of the directed edge.
    nx, ny = edge_direction.y, -edge_direction.x
    align = line.a * nx + line.b * ny
    if align == 0:
        raise ValueError("edge direction is not parallel to the line")
    sign = 1 if align > 0 else -1
    if side is Side.INSIDE:
        sign = -sign
    # line.(a, b) has integer norm |(a,b)| = |n| * |(a,b)|/|n|; shifting c by
    # t * |(a,b)| moves the line distance t along (a,b).
    ab_norm2 = line.a * line.a + line.b * line.b
    ab_norm = rational_sqrt(ab_norm2)
    if ab_norm is None:
        # |(a,b)| is irrational iff the edge norm is; reuse its approximation
        # through the proportionality |(a,b)| = |n| * k with rational k.
        k2 = ab_norm2 / (edge_direction.x ** 2 + edge_direction.y ** 2)
        k = rational_sqrt(k2)
        if k is None:
            raise AssertionError("line not parallel to the claimed direction")
        ab_norm = norm * k
    return Line.of(line.a, line.b, line.c + sign * t * ab_norm)


def _offset_ring(ring: Sequence[Point], shifts: Sequence[Fraction],
                 exact: bool, precision: int) -> list[Point]:
    n = len(ring)
    lines = []
    for i in range(n):
        a, b = ring[i], ring[(i + 1) % n]
        d = b - a
        line = Line.from_points(a, b)
        side = Side.OUTSIDE if shifts[i] >= 0 else Side.INSIDE
        lines.append(offset_line(line, d, abs(shifts[i]), side, exact, precision))
    out = []
    for i in range(n):
        prev_line = lines[(i - 1) % n]
        p = line_intersection(prev_line, lines[i])
        if p is None:
            raise InvalidResult(
                f"adjacent offset lines at vertex {i} are parallel")
        out.append(p)
    return out


def _validated(P: Polygon, outer, holes, what: str) -> Polygon:
    result = P.with_rings(outer, holes)
    report = validate_polygon(result)
    if not report.ok:
        raise InvalidResult(f"{what} produced an invalid polygon: {report}",
                            report=report)
    return result


def edge_inflate(P: Polygon, t: Fraction, exact: bool = True,
                 precision: int = DEFAULT_NORM_PRECISION) -> Polygon:
    """Shift every edge outward by t; hole rings shrink toward their holes."""
    t = Fraction(t)
    if t < 0:
        raise ValueError("inflation magnitude must be non-negative")
    if t == 0:
        return P
    outer = _offset_ring(P.outer, [t] * len(P.outer), exact, precision)
    holes = [
        _offset_ring(hole, [t] * len(hole), exact, precision)
        for hole in P.holes
    ]
    return _validated(P, outer, holes, f"edge inflation by {t}")


def edge_perturb(P: Polygon, shifts: Sequence[Fraction], exact: bool = True,
                 precision: int = DEFAULT_NORM_PRECISION) -> Polygon:
    """Shift each edge by its own signed amount (positive = outward).

    Shifts are listed edge by edge in ring order: outer ring first, then each
    hole.  All-equal positive shifts reproduce edge_inflate exactly.
    """
    shifts = [Fraction(s) for s in shifts]
    counts = [len(P.outer)] + [len(h) for h in P.holes]
    if len(shifts) != sum(counts):
        raise ValueError(
            f"expected {sum(counts)} shifts, got {len(shifts)}")
    if all(s == 0 for s in shifts):
        return P
    pos = 0
    rings = []
    for ring, cnt in zip(P.rings(), counts):
        rings.append(_offset_ring(ring, shifts[pos:pos + cnt], exact, precision))
        pos += cnt
    return _validated(P, rings[0], rings[1:], "edge perturbation")


def vertex_perturb(P: Polygon, offsets: Sequence[tuple[Fraction, Fraction]],
                   delta: Optional[Fraction] = None) -> Polygon:
    """Translate each vertex by its own offset, checked against delta."""
    offsets = [(Fraction(x), Fraction(y)) for x, y in offsets]
    if len(offsets) != P.n_vertices:
        raise ValueError(
            f"expected {P.n_vertices} offsets, got {len(offsets)}")
    if delta is not None:
        d2 = delta * delta
        for i, (ox, oy) in enumerate(offsets):
            if ox * ox + oy * oy > d2:
                raise OffsetTooLarge(
                    f"offset {i} has squared norm {ox * ox + oy * oy} > {d2}")
    if all(ox == 0 and oy == 0 for ox, oy in offsets):
        return P
    pos = 0
    rings = []
    for ring in P.rings():
        moved = [Point(p.x + offsets[pos + i][0], p.y + offsets[pos + i][1])
                 for i, p in enumerate(ring)]
        pos += len(ring)
        rings.append(moved)
    return _validated(P, rings[0], rings[1:], "vertex perturbation")


# ---------------------------------------------------------------------------
# Sampling

def _dyadic_unit(rng: random.Random) -> Fraction:
    return Fraction(rng.getrandbits(_DYADIC_BITS), 1 << _DYADIC_BITS)


def _uniform_index(rng: random.Random, q: int) -> int:
    k = (q - 1).bit_length() if q > 1 else 1
    while True:
        i = rng.getrandbits(k)
        if i < q:
            return i


def _draw(P: Polygon, spec: PerturbationSpec, rng: random.Random):
    if spec.model is Model.EDGE_INFLATE:
        if spec.q is not None:
            t = Fraction(_uniform_index(rng, spec.q)) * spec.delta / spec.q
        else:
            t = _dyadic_unit(rng) * spec.delta
        return {"t": t}
    if spec.model is Model.EDGE_PERTURB:
        n_edges = P.n_vertices
        shifts = tuple(
            (2 * _dyadic_unit(rng) - 1) * spec.delta for _ in range(n_edges)
        )
        return {"shifts": shifts}
    offsets = []
    d2 = spec.delta * spec.delta
    for _ in range(P.n_vertices):
        while True:
            ox = (2 * _dyadic_unit(rng) - 1) * spec.delta
            oy = (2 * _dyadic_unit(rng) - 1) * spec.delta
            if ox * ox + oy * oy <= d2:
                offsets.append((ox, oy))
                break
    return {"offsets": tuple(offsets)}


def sample(P: Polygon, spec: PerturbationSpec,
           retry_limit: int = SAMPLE_RETRY_LIMIT) -> tuple[Polygon, SampleRecord]:
    """Draw a perturbation per the spec and apply it; deterministic in seed.

    An InvalidResult draw is retried with a derived seed up to retry_limit
    times; the record reports the successful attempt index.
    """
    last_error: Optional[InvalidResult] = None
    for attempt in range(retry_limit):
        rng = random.Random(spec.seed * 1_000_003 + attempt)
        drawn = _draw(P, spec, rng)
        record = SampleRecord(model=spec.model, delta=spec.delta,
                              seed=spec.seed, attempt=attempt, **drawn)
        try:
            if spec.model is Model.EDGE_INFLATE:
                result = edge_inflate(P, record.t, exact=False)
            elif spec.model is Model.EDGE_PERTURB:
                result = edge_perturb(P, record.shifts, exact=False)
            else:
                result = vertex_perturb(P, record.offsets, delta=spec.delta)
            return result, record
        except InvalidResult as err:
            last_error = err
    raise InvalidResult(
        f"no valid perturbation after {retry_limit} attempts "
        f"(seed {spec.seed}): {last_error}")


# ---------------------------------------------------------------------------
# Pointedness

def _wedge_angle_data(prev: Point, v: Point, nxt: Point):
    """(sin^2, dot sign) of the wedge min(interior, exterior) angle at v."""
    ux, uy = prev.x - v.x, prev.y - v.y
    wx, wy = nxt.x - v.x, nxt.y - v.y
    cross = ux * wy - uy * wx
    dot = ux * wx + uy * wy
    n2 = (ux * ux + uy * uy) * (wx * wx + wy * wy)
    sin2 = cross * cross / n2
    # The wedge between the two incident edges is < pi on the side where it
    # is convex; min(interior, exterior) always has |angle| < pi, so its sine
    # is |cross|/norms and its cosine sign is the dot sign.
    return sin2, (dot > 0) - (dot < 0)


def _angle_less(a_data, b_data) -> bool:
    """Exact comparison of two angles in (0, pi) given (sin^2, cos sign)."""
    sin2_a, cos_a = a_data
    sin2_b, cos_b = b_data
    if cos_a != cos_b:
        return cos_a > cos_b
    if cos_a > 0:
        return sin2_a < sin2_b
    if cos_a < 0:
        return sin2_a > sin2_b
    return False


def pointedness(P: Polygon) -> Pointedness:
    """Certified rational beta with 8*beta <= smallest wedge angle of P."""
    best_data = None
    best_index = -1
    index = 0
    for ring in P.rings():
        n = len(ring)
        for i in range(n):
            data = _wedge_angle_data(ring[i - 1], ring[i], ring[(i + 1) % n])
            if best_data is None or _angle_less(data, best_data):
                best_data = data
                best_index = index + i
        index += n
    sin2, cos_sign = best_data
    if cos_sign <= 0:
        # Angle at least pi/2; beta = (pi/2)/8 rounds down to 3/16 < pi/16.
        beta = Fraction(3, 16)
    else:
        # Angle below pi/2: sin(angle) <= angle, so any rational lower bound
        # on the sine is a lower bound on the angle.
        beta = sqrt_lower_bound(sin2, 32) / 8
    return Pointedness(beta=beta, alpha_witness=best_index)


@dataclass(frozen=True)
class PointednessLemmaReport:
    passed: bool
    delta: Fraction
    delta0: Fraction
    gamma: Fraction
    max_displacement_sq: Fraction
    bound_sq: Fraction
    record: SampleRecord


def check_pointedness_lemma(P: Polygon, delta: Fraction, delta0: Fraction,
                            gamma: Fraction, seed: int) -> PointednessLemmaReport:
    """Vertex-perturb by delta0, inflate by gamma, measure displacements.

    With gamma at most beta*(delta - delta0) every composed vertex stays
    within distance delta of its original (exact squared comparison).
    """
    delta, delta0, gamma = Fraction(delta), Fraction(delta0), Fraction(gamma)
    if not 0 < delta0 < delta:
        raise ValueError("need 0 < delta0 < delta")
    spec = PerturbationSpec(model=Model.VERTEX_PERTURB, delta=delta0, seed=seed)
    perturbed, record = sample(P, spec)
    composed = edge_inflate(perturbed, gamma, exact=False) if gamma > 0 else perturbed

    originals = [p for ring in P.rings() for p in ring]
    moved = [p for ring in composed.rings() for p in ring]
    worst = Fraction(0)
    for a, b in zip(originals, moved):
        worst = max(worst, dist2(a, b))
    bound = delta * delta
    return PointednessLemmaReport(
        passed=worst <= bound,
        delta=delta,
        delta0=delta0,
        gamma=gamma,
        max_displacement_sq=worst,
        bound_sq=bound,
        record=record,
    )
