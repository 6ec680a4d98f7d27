"""Line-based exact-rational polygon file format, plus guard-list parsing.

Format (comments start with '#', blank lines ignored):

    L <positive integer>
    outer <n>
    <num>/<den> <num>/<den>     # n coordinate lines
    holes <h>
    hole <m>                    # h blocks shaped like the outer block
    <num>/<den> <num>/<den>

No floating point is admitted anywhere; a bare integer token is accepted as
shorthand for <int>/1.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .errors import PolygonSyntaxError, ValidityError
from .geometry import Point, Polygon, validate_polygon


def parse_fraction(token: str, line: int | None = None) -> Fraction:
    token = token.strip()
    if "/" in token:
        parts = token.split("/")
        if len(parts) != 2:
            raise PolygonSyntaxError(f"malformed rational {token!r}", line)
        num_s, den_s = parts
    else:
        num_s, den_s = token, "1"
    try:
        num = int(num_s)
        den = int(den_s)
    except ValueError:
        raise PolygonSyntaxError(f"malformed rational {token!r}", line) from None
    if den == 0:
        raise PolygonSyntaxError(f"zero denominator in {token!r}", line)
    return Fraction(num, den)


def format_fraction(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def _content_lines(text: str) -> list[tuple[int, str]]:
    out = []
    for i, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        out.append((i, stripped))
    return out


class _Reader:
    def __init__(self, text: str):
        self.lines = _content_lines(text)
        self.pos = 0

    def next(self, what: str) -> tuple[int, str]:
        if self.pos >= len(self.lines):
            last = self.lines[-1][0] if self.lines else 0
            raise PolygonSyntaxError(f"unexpected end of file, expected {what}",
                                     last)
        item = self.lines[self.pos]
        self.pos += 1
        return item

    def done(self) -> bool:
        return self.pos >= len(self.lines)


def _expect_header(reader: _Reader, keyword: str) -> int:
    line_no, text = reader.next(f"'{keyword} <count>'")
    parts = text.split()
    if len(parts) != 2 or parts[0] != keyword:
        raise PolygonSyntaxError(f"expected '{keyword} <count>', got {text!r}",
                                 line_no)
    try:
        count = int(parts[1])
    except ValueError:
        raise PolygonSyntaxError(f"malformed count {parts[1]!r}",
                                 line_no) from None
    return count


def _read_ring(reader: _Reader, count: int) -> list[Point]:
    ring = []
    for _ in range(count):
        line_no, text = reader.next("a coordinate line")
        parts = text.split()
        if len(parts) != 2:
            raise PolygonSyntaxError(
                f"expected two coordinates, got {text!r}", line_no)
        ring.append(Point(parse_fraction(parts[0], line_no),
                          parse_fraction(parts[1], line_no)))
    return ring


def parse_polygon(text: str, validate: bool = True) -> Polygon:
    """Parse and fully validate a polygon; raises PolygonSyntaxError or
    ValidityError (the latter embeds the validity report).  With
    validate=False the structural check is skipped (the validate subcommand
    wants the report rather than an exception)."""
    reader = _Reader(text)
    line_no, header = reader.next("'L <int>'")
    parts = header.split()
    if len(parts) != 2 or parts[0] != "L":
        raise PolygonSyntaxError(f"expected 'L <int>', got {header!r}", line_no)
    try:
        bound = int(parts[1])
    except ValueError:
        raise PolygonSyntaxError(f"malformed bound {parts[1]!r}",
                                 line_no) from None
    if bound <= 0:
        raise PolygonSyntaxError("bound L must be a positive integer", line_no)

    n = _expect_header(reader, "outer")
    outer = _read_ring(reader, n)
    h = _expect_header(reader, "holes")
    holes = []
    for _ in range(h):
        m = _expect_header(reader, "hole")
        holes.append(tuple(_read_ring(reader, m)))
    if not reader.done():
        line_no, text = reader.lines[reader.pos]
        raise PolygonSyntaxError(f"trailing content {text!r}", line_no)

    poly = Polygon(tuple(outer), tuple(holes), bound)
    if validate:
        report = validate_polygon(poly)
        if not report.ok:
            raise ValidityError(str(report), report=report)
    return poly


def emit_polygon(P: Polygon) -> str:
    """Canonical text representation; parse(emit(P)) == P exactly."""
    out = [f"L {P.L}", f"outer {len(P.outer)}"]
    for p in P.outer:
        out.append(f"{format_fraction(p.x)} {format_fraction(p.y)}")
    out.append(f"holes {len(P.holes)}")
    for hole in P.holes:
        out.append(f"hole {len(hole)}")
        for p in hole:
            out.append(f"{format_fraction(p.x)} {format_fraction(p.y)}")
    return "\n".join(out) + "\n"


def parse_guards(text: str) -> list[Point]:
    """Guard list: space-separated points, each 'x<num>/<den>,y<num>/<den>'."""
    guards = []
    for token in text.split():
        parts = token.split(",")
        if len(parts) != 2:
            raise PolygonSyntaxError(
                f"guard {token!r} must be '<x>,<y>' with rational coordinates")
        guards.append(Point(parse_fraction(parts[0]), parse_fraction(parts[1])))
    return guards


def format_guards(points: Sequence[Point]) -> str:
    return " ".join(
        f"{format_fraction(p.x)},{format_fraction(p.y)}" for p in points)
