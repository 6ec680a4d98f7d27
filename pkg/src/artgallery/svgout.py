"""Deterministic SVG scenes for polygons, guards, visibility and grids.

Output is self-contained SVG 1.1 with a fixed element order, so scenes can
be frozen as golden files.  Exact rational coordinates are rounded only at
rendering time, to 1e-9, which is flagged here once and nowhere else: every
other module is exact.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional, Sequence

from .geometry import Point, Polygon
from .solve import CandidateGrid
from .visibility import VisibilityPolygon

_PRECISION = 10 ** 9

_POLY_STYLE = 'fill="#e8e8f0" stroke="#202040" stroke-width="{sw}"'
_INFLATED_STYLE = ('fill="none" stroke="#b03030" stroke-width="{sw}" '
                   'stroke-dasharray="{dash}"')
_VIS_STYLE = ('fill="#50a050" fill-opacity="0.25" stroke="#207020" '
              'stroke-width="{sw}"')
_GRID_STYLE = 'fill="#3050c0"'
_WITNESS_STYLE = 'fill="none" stroke="#c07010" stroke-width="{sw}"'
_GUARD_STYLE = 'fill="#c02020" stroke="#601010" stroke-width="{sw}"'


def _fmt(x: Fraction) -> str:
    """Decimal rendering at 1e-9 precision (rendering-only rounding)."""
    scaled = round(x * _PRECISION)
    sign = "-" if scaled < 0 else ""
    scaled = abs(scaled)
    whole, frac = divmod(scaled, _PRECISION)
    if frac == 0:
        return f"{sign}{whole}"
    return f"{sign}{whole}.{str(frac).zfill(9).rstrip('0')}"


def _ring_path(ring: Sequence[Point]) -> str:
    steps = [f"M {_fmt(ring[0].x)} {_fmt(ring[0].y)}"]
    for p in ring[1:]:
        steps.append(f"L {_fmt(p.x)} {_fmt(p.y)}")
    steps.append("Z")
    return " ".join(steps)


def _polygon_path(P: Polygon) -> str:
    return " ".join(_ring_path(ring) for ring in P.rings())


def emit_svg(P: Polygon,
             guards: Sequence[Point] = (),
             visibility: Sequence[VisibilityPolygon] = (),
             grid: Optional[CandidateGrid] = None,
             witnesses: Sequence[Point] = (),
             inflated: Optional[Polygon] = None) -> str:
    """Render the polygon with overlays, in a fixed stacking order:
    polygon, inflated outline, grid points, visibility regions, witnesses,
    guards."""
    boxes = [P.bbox()]
    if inflated is not None:
        boxes.append(inflated.bbox())
    minx = min(b[0] for b in boxes)
    miny = min(b[1] for b in boxes)
    maxx = max(b[2] for b in boxes)
    maxy = max(b[3] for b in boxes)
    span = max(maxx - minx, maxy - miny, Fraction(1))
    margin = span / 20
    vx, vy = minx - margin, miny - margin
    vw = (maxx - minx) + 2 * margin
    vh = (maxy - miny) + 2 * margin
    sw = _fmt(span / 200)
    dot = span / 150
    flip = miny + maxy  # mirror vertically: svg y grows downward

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'viewBox="{_fmt(vx)} {_fmt(vy)} {_fmt(vw)} {_fmt(vh)}" '
        f'width="640" height="640">',
        f'<g transform="translate(0 {_fmt(flip)}) scale(1 -1)">',
        f'<path d="{_polygon_path(P)}" fill-rule="evenodd" '
        + _POLY_STYLE.format(sw=sw) + "/>",
    ]
    if inflated is not None:
        parts.append(
            f'<path d="{_polygon_path(inflated)}" fill-rule="evenodd" '
            + _INFLATED_STYLE.format(sw=sw, dash=_fmt(span / 50)) + "/>")
    if grid is not None:
        for p in grid.points_in(P):
            parts.append(f'<circle cx="{_fmt(p.x)}" cy="{_fmt(p.y)}" '
                         f'r="{_fmt(dot / 2)}" ' + _GRID_STYLE + "/>")
    for region in visibility:
        parts.append(f'<path d="{_ring_path(region.boundary)}" '
                     + _VIS_STYLE.format(sw=sw) + "/>")
    for p in witnesses:
        parts.append(f'<circle cx="{_fmt(p.x)}" cy="{_fmt(p.y)}" '
                     f'r="{_fmt(dot)}" ' + _WITNESS_STYLE.format(sw=sw) + "/>")
    for p in guards:
        parts.append(f'<circle cx="{_fmt(p.x)}" cy="{_fmt(p.y)}" '
                     f'r="{_fmt(dot)}" ' + _GUARD_STYLE.format(sw=sw) + "/>")
    parts.append("</g>")
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
