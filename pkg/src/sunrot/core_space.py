"""Exact geometry of a lifted sun graph.

A lifted sun graph is the real line with, for every branch ``i`` and every
integer ``m``, a copy of the segment ``[0, len_i]`` glued at the abscissa
``attach_i + m``.  Points are either on the line or on a translated branch
copy; all coordinates are :class:`fractions.Fraction`.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Optional, Union

__all__ = [
    "LinePoint",
    "BranchPoint",
    "Point",
    "Branch",
    "SunGraphShape",
    "TSegment",
    "translate",
    "retract_line",
    "branch_compare",
    "as_fraction",
    "format_rational",
    "GeometryError",
]


class GeometryError(ValueError):
    """A point or segment is not valid for the sun graph it is used with."""


def as_fraction(value) -> Fraction:
    """Convert ``value`` to an exact Fraction.

    Strings are parsed as ``"p/q"`` or ``"p"``; floats are rejected so that
    no rounding can sneak into exact computations.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if not text or any(c in text for c in ".eE"):
            raise ValueError(f"not an exact rational: {value!r}")
        return Fraction(text)
    raise TypeError(f"cannot convert {type(value).__name__} to an exact rational")


def format_rational(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class LinePoint:
    x: Fraction

    def __repr__(self) -> str:
        return f"LinePoint({format_rational(self.x)})"


@dataclass(frozen=True)
class BranchPoint:
    """Point at distance ``t > 0`` from the attachment on copy ``m`` of branch ``branch``."""

    branch: int
    t: Fraction
    m: int

    def __repr__(self) -> str:
        return f"BranchPoint({self.branch}, {format_rational(self.t)}, {self.m})"


Point = Union[LinePoint, BranchPoint]


@dataclass(frozen=True)
class Branch:
    attach: Fraction
    length: Fraction


@dataclass(frozen=True)
class TSegment:
    """Closed interval ``[lo, hi]`` inside one chart.

    ``branch is None`` means the line (and ``m`` is ignored, kept at 0);
    otherwise the chart is copy ``m`` of branch ``branch`` with coordinate
    ``t`` measured from the attachment point.
    """

    branch: Optional[int]
    m: int
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        if self.lo > self.hi:
            raise GeometryError(f"segment endpoints out of order: {self.lo} > {self.hi}")

    @property
    def on_line(self) -> bool:
        return self.branch is None

    @property
    def chart(self) -> tuple:
        return ("R",) if self.branch is None else ("B", self.branch, self.m)

    def contains(self, u: Fraction) -> bool:
        return self.lo <= u <= self.hi

    def translated(self, k: int) -> "TSegment":
        if self.branch is None:
            return TSegment(None, 0, self.lo + k, self.hi + k)
        return TSegment(self.branch, self.m + k, self.lo, self.hi)

    def __repr__(self) -> str:
        where = "R" if self.branch is None else f"B{self.branch}{self.m:+d}"
        return f"{where}[{format_rational(self.lo)}, {format_rational(self.hi)}]"


class SunGraphShape:
    """Branch attachment data for a lifted sun graph.

    >>> shape = SunGraphShape([(0, 1)])
    >>> shape.branch_point(0, 0, 1)
    LinePoint(1)
    """

    def __init__(self, branches: Iterable):
        items = []
        for b in branches:
            if isinstance(b, Branch):
                items.append(b)
            else:
                attach, length = b
                items.append(Branch(as_fraction(attach), as_fraction(length)))
        for i, b in enumerate(items):
            if not (0 <= b.attach < 1):
                raise GeometryError(f"branch {i}: attach {b.attach} not in [0,1)")
            if b.length <= 0:
                raise GeometryError(f"branch {i}: length must be positive")
        attaches = [b.attach for b in items]
        if len(set(attaches)) != len(attaches):
            raise GeometryError("branch attachment abscissae must be pairwise distinct")
        self.branches: tuple[Branch, ...] = tuple(items)
        self._by_attach = {b.attach: i for i, b in enumerate(items)}

    def __len__(self) -> int:
        return len(self.branches)

    def __eq__(self, other) -> bool:
        return isinstance(other, SunGraphShape) and self.branches == other.branches

    def __hash__(self) -> int:
        return hash(self.branches)

    def __repr__(self) -> str:
        return f"SunGraphShape({[(str(b.attach), str(b.length)) for b in self.branches]})"

    def attach(self, i: int) -> Fraction:
        return self.branches[i].attach

    def length(self, i: int) -> Fraction:
        return self.branches[i].length

    def branch_point(self, i: int, t, m: int) -> Point:
        """Canonical point at coordinate ``t`` of copy ``m`` of branch ``i``."""
        t = as_fraction(t)
        if not (0 <= t <= self.length(i)):
            raise GeometryError(f"t={t} outside branch {i} of length {self.length(i)}")
        if t == 0:
            return LinePoint(self.attach(i) + m)
        return BranchPoint(i, t, int(m))

    def canonical(self, pt: Point) -> Point:
        if isinstance(pt, BranchPoint):
            return self.branch_point(pt.branch, pt.t, pt.m)
        return pt

    def check_point(self, pt: Point) -> None:
        if isinstance(pt, BranchPoint):
            if not (0 <= pt.branch < len(self.branches)):
                raise GeometryError(f"unknown branch {pt.branch}")
            if not (0 < pt.t <= self.length(pt.branch)):
                raise GeometryError(f"{pt!r}: t outside (0, len]")

    def attached_branch(self, x: Fraction) -> Optional[tuple[int, int]]:
        """Return ``(i, m)`` if the line abscissa ``x`` is ``attach_i + m``."""
        m = x.__floor__()
        i = self._by_attach.get(x - m)
        return None if i is None else (i, m)

    def chart_coord(self, pt: Point, chart: tuple) -> Optional[Fraction]:
        """Coordinate of ``pt`` in ``chart`` or ``None`` if the point is not on it."""
        if chart[0] == "R":
            if isinstance(pt, LinePoint):
                return pt.x
            return None
        _, i, m = chart
        if isinstance(pt, BranchPoint):
            return pt.t if (pt.branch, pt.m) == (i, m) else None
        if pt.x == self.attach(i) + m:
            return Fraction(0)
        return None

    def point_on(self, seg_or_chart, u: Fraction) -> Point:
        chart = seg_or_chart.chart if isinstance(seg_or_chart, TSegment) else seg_or_chart
        if chart[0] == "R":
            return LinePoint(u)
        return self.branch_point(chart[1], u, chart[2])


def translate(pt: Point, m: int) -> Point:
    if isinstance(pt, LinePoint):
        return LinePoint(pt.x + m)
    return BranchPoint(pt.branch, pt.t, pt.m + m)


def retract_line(shape: SunGraphShape, pt: Point) -> Fraction:
    if isinstance(pt, LinePoint):
        return pt.x
    return shape.attach(pt.branch) + pt.m


def branch_compare(shape: SunGraphShape, a: Point, b: Point) -> int:
    """Compare two points of one branch copy by distance from its attachment.

    Returns -1, 0 or 1.  The attachment point itself (a line point) is the
    minimum of the copy.
    """
    ca = _branch_chart(shape, a)
    cb = _branch_chart(shape, b)
    if ca is None and cb is None:
        raise GeometryError("neither point lies on a branch copy")
    if ca is None:
        ca = cb if shape.chart_coord(a, ("B",) + cb) is not None else None
    if cb is None:
        cb = ca if shape.chart_coord(b, ("B",) + ca) is not None else None
    if ca is None or cb is None or ca != cb:
        raise GeometryError(f"{a!r} and {b!r} are not on a common branch copy")
    ta = shape.chart_coord(a, ("B",) + ca)
    tb = shape.chart_coord(b, ("B",) + cb)
    return (ta > tb) - (ta < tb)


def _branch_chart(shape: SunGraphShape, pt: Point) -> Optional[tuple[int, int]]:
    if isinstance(pt, BranchPoint):
        return (pt.branch, pt.m)
    return None
