"""Degree-one piecewise-linear sun-like maps.

Only the fundamental domain is stored: the line part on ``[0, 1]`` and each
branch part on ``[0, len_i]``.  Every pair of consecutive control-point
values must lie in one chart, and the map is linear in that chart's
coordinate between them.  The rest of the map follows from
``F(x + m) = F(x) + m``.
"""
from __future__ import annotations

import json
from bisect import bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import NamedTuple, Optional, Sequence

from .core_space import (
    BranchPoint,
    GeometryError,
    LinePoint,
    Point,
    SunGraphShape,
    TSegment,
    as_fraction,
    format_rational,
    translate,
)
from .plfunc import PLFunc, solve_linear

__all__ = [
    "Piece",
    "PLMap",
    "MapSpecError",
    "ValidationReport",
    "Preimage",
    "load_map",
    "map_from_dict",
    "map_to_dict",
    "point_from_json",
    "point_to_json",
    "covered_set",
]

LINE = ("R",)


class MapSpecError(ValueError):
    """The map document is malformed (schema-level problem)."""


@dataclass(frozen=True)
class Piece:
    """One linear piece ``[u0, u1] -> chart`` with chart coordinates ``v0 -> v1``."""

    u0: Fraction
    u1: Fraction
    chart: tuple
    v0: Fraction
    v1: Fraction

    def value(self, u: Fraction) -> Fraction:
        if self.u0 == self.u1:
            return self.v0
        return self.v0 + (self.v1 - self.v0) * (u - self.u0) / (self.u1 - self.u0)

    @property
    def constant(self) -> bool:
        return self.v0 == self.v1

    def solve(self, v: Fraction) -> Optional[Fraction]:
        return solve_linear(self.u0, self.u1, self.v0, self.v1, v)


def shift_chart(chart: tuple, k: int) -> tuple:
    if chart[0] == "R" or k == 0:
        return chart
    return ("B", chart[1], chart[2] + k)


@dataclass
class ValidationReport:
    ok: bool
    problems: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    def first(self) -> Optional[dict]:
        return self.problems[0] if self.problems else None


class Preimage(NamedTuple):
    values: list
    degenerate: bool


class PLMap:
    """A degree-one PL map of a lifted sun graph.

    Parameters
    ----------
    shape : SunGraphShape
    line : sequence of ``(x, Point)`` control points on ``[0, 1]``
    branch_maps : one control-point sequence per branch, on ``[0, len_i]``
    tr : per-branch length ``s_i`` of the initial branch segment declared to
        belong to the invariant skeleton; missing entries default to 0.
    """

    def __init__(self, shape: SunGraphShape, line, branch_maps, tr=None):
        self.shape = shape
        if len(branch_maps) != len(shape):
            raise MapSpecError(f"expected {len(shape)} branch maps, got {len(branch_maps)}")
        self.line = [(as_fraction(x), shape.canonical(v)) for x, v in line]
        self.branch_maps = [
            [(as_fraction(t), shape.canonical(v)) for t, v in bm] for bm in branch_maps
        ]
        s = [Fraction(0)] * len(shape)
        for i, upto in (tr or {}).items():
            s[i] = as_fraction(upto)
        self.tr = tuple(s)
        self._check_syntax()
        self.chart_violations: list[dict] = []
        self.line_pieces = self._pieces(self.line, None)
        self.branch_pieces = [self._pieces(bm, i) for i, bm in enumerate(self.branch_maps)]
        self._line_breaks = [p.u0 for p in self.line_pieces]
        self._branch_breaks = [[p.u0 for p in ps] for ps in self.branch_pieces]
        self._transfer_cache: dict = {}

    # construction helpers -------------------------------------------------

    def _check_syntax(self) -> None:
        def increasing(pts, lo, hi, what):
            if len(pts) < 2:
                raise MapSpecError(f"{what}: need at least two control points")
            if pts[0][0] != lo or pts[-1][0] != hi:
                raise MapSpecError(f"{what}: control points must span [{lo}, {hi}]")
            for (a, _), (b, _) in zip(pts, pts[1:]):
                if not a < b:
                    raise MapSpecError(f"{what}: abscissae not strictly increasing at {b}")

        increasing(self.line, 0, 1, "line")
        for i, bm in enumerate(self.branch_maps):
            increasing(bm, 0, self.shape.length(i), f"branch {i}")
        for i, s in enumerate(self.tr):
            if not (0 <= s <= self.shape.length(i)):
                raise MapSpecError(f"tr: branch {i} upto {s} outside [0, len]")
        for pts in [self.line, *self.branch_maps]:
            for _, v in pts:
                try:
                    self.shape.check_point(v)
                except GeometryError as exc:
                    raise MapSpecError(str(exc)) from None

    def _common_chart(self, a: Point, b: Point) -> Optional[tuple]:
        if isinstance(a, LinePoint) and isinstance(b, LinePoint):
            return LINE
        for p in (a, b):
            if isinstance(p, BranchPoint):
                chart = ("B", p.branch, p.m)
                if all(self.shape.chart_coord(q, chart) is not None for q in (a, b)):
                    return chart
        return None

    def _pieces(self, pts, branch) -> list[Piece]:
        out = []
        for (u0, a), (u1, b) in zip(pts, pts[1:]):
            chart = self._common_chart(a, b)
            if chart is None:
                self.chart_violations.append(
                    {"domain": "line" if branch is None else f"branch {branch}",
                     "u0": u0, "u1": u1, "value0": a, "value1": b})
                # placeholder keeps indices aligned; validate() reports it
                chart = LINE
                v0 = v1 = Fraction(0)
            else:
                v0 = self.shape.chart_coord(a, chart)
                v1 = self.shape.chart_coord(b, chart)
            out.append(Piece(u0, u1, chart, v0, v1))
        return out

    # basic queries ----------------------------------------------------------

    @property
    def residual_branches(self) -> list[int]:
        """Indices ``i`` with a non-degenerate branch of F, ``X^i = [s_i, len_i]``."""
        return [i for i in range(len(self.shape)) if self.tr[i] < self.shape.length(i)]

    def is_residual(self, i: int) -> bool:
        return self.tr[i] < self.shape.length(i)

    def line_maps_into_line(self) -> bool:
        return all(p.chart == LINE for p in self.line_pieces)

    def in_X_plus_Z(self, pt: Point) -> Optional[tuple[int, int]]:
        """``(branch, m)`` if ``pt`` lies in ``X^branch + m``, else ``None``."""
        if isinstance(pt, BranchPoint):
            if self.is_residual(pt.branch) and pt.t >= self.tr[pt.branch]:
                return (pt.branch, pt.m)
            return None
        hit = self.shape.attached_branch(pt.x)
        if hit is not None and self.tr[hit[0]] == 0 and self.is_residual(hit[0]):
            return hit
        return None

    def in_T_R(self, pt: Point) -> bool:
        if isinstance(pt, LinePoint):
            return True
        return pt.t <= self.tr[pt.branch]

    # evaluation -------------------------------------------------------------

    def _locate(self, pt: Point) -> tuple[Piece, Fraction, int]:
        if isinstance(pt, LinePoint):
            k = pt.x.__floor__()
            u = pt.x - k
            idx = bisect_right(self._line_breaks, u) - 1
            return self.line_pieces[idx], u, k
        self.shape.check_point(pt)
        ps = self.branch_pieces[pt.branch]
        idx = min(bisect_right(self._branch_breaks[pt.branch], pt.t) - 1, len(ps) - 1)
        return ps[idx], pt.t, pt.m

    def eval(self, pt: Point) -> Point:
        piece, u, k = self._locate(pt)
        return self.shape.point_on(shift_chart(piece.chart, k), piece.value(u) + (k if piece.chart == LINE else 0))

    __call__ = eval

    def iterate(self, pt: Point, n: int) -> Point:
        for _ in range(n):
            pt = self.eval(pt)
        return pt

    def _domain_pieces(self, seg: TSegment):
        """Yield ``(u0, u1, piece, k)`` covering ``seg`` in domain order.

        ``u0, u1`` are fundamental-domain coordinates and ``k`` the translate.
        A degenerate segment yields exactly one (degenerate) piece.
        """
        degenerate = seg.lo == seg.hi
        if seg.branch is None:
            k = seg.lo.__floor__()
            while k < seg.hi or (degenerate and k == seg.lo.__floor__()):
                lo = max(seg.lo - k, Fraction(0))
                hi = min(seg.hi - k, Fraction(1))
                for p in self.line_pieces:
                    a, b = max(lo, p.u0), min(hi, p.u1)
                    if a < b:
                        yield a, b, p, k
                    elif degenerate and a == b:
                        yield a, b, p, k
                        return
                k += 1
        else:
            if seg.hi > self.shape.length(seg.branch) or seg.lo < 0:
                raise GeometryError(f"{seg!r} outside branch {seg.branch}")
            for p in self.branch_pieces[seg.branch]:
                a, b = max(seg.lo, p.u0), min(seg.hi, p.u1)
                if a < b:
                    yield a, b, p, seg.m
                elif degenerate and a == b:
                    yield a, b, p, seg.m
                    return

    def image_segment(self, seg: TSegment) -> list[TSegment]:
        """Chain of chart segments whose union is ``F(seg)``, in domain order."""
        out = []
        for a, b, p, k in self._domain_pieces(seg):
            va, vb = p.value(a), p.value(b)
            lo, hi = min(va, vb), max(va, vb)
            if p.chart == LINE:
                out.append(TSegment(None, 0, lo + k, hi + k))
            else:
                out.append(TSegment(p.chart[1], p.chart[2] + k, lo, hi))
        return out

    def preimage_in_segment(self, seg: TSegment, target: Point) -> Preimage:
        """Coordinates ``u`` in ``seg`` with ``F(u) = target``, ascending.

        A piece constantly equal to ``target`` contributes both endpoints and
        sets ``degenerate``.
        """
        sols: set[Fraction] = set()
        degenerate = False
        for a, b, p, k in self._domain_pieces(seg):
            v = self.shape.chart_coord(target, shift_chart(p.chart, k))
            if v is None:
                continue
            if p.chart == LINE:
                v -= k
            off = k if seg.branch is None else 0
            va, vb = p.value(a), p.value(b)
            if va == vb:
                if va == v:
                    sols.update((a + off, b + off))
                    degenerate = degenerate or a != b
                continue
            u = solve_linear(a, b, va, vb, v)
            if u is not None:
                sols.add(u + off)
        return Preimage(sorted(sols), degenerate)

    # transfer functions -------------------------------------------------------

    def transfer(self, i: int, ell: int, p: int) -> PLFunc:
        """``t -> r_ell(F(t) - p)`` on branch ``i``, as a PL function.

        ``t`` ranges over ``[0, len_i]``; the value is the coordinate of the
        retraction onto ``X^ell`` (so it is at least ``s_ell``).
        """
        key = (i, ell, p)
        f = self._transfer_cache.get(key)
        if f is not None:
            return f
        s = self.tr[ell]
        pts = []
        for piece in self.branch_pieces[i]:
            if piece.chart == ("B", ell, p):
                sub = PLFunc([piece.u0, piece.u1], [piece.v0, piece.v1]).clamped_below(s)
                pts.extend(zip(sub.xs, sub.ys))
            else:
                pts.extend([(piece.u0, s), (piece.u1, s)])
        f = PLFunc.from_points(pts)
        self._transfer_cache[key] = f
        return f

    # validation -------------------------------------------------------------

    def validate(self) -> ValidationReport:
        rep = ValidationReport(ok=True)
        for v in self.chart_violations:
            rep.problems.append({
                "check": "chart-pair",
                "message": (f"{v['domain']}: control values {v['value0']!r} at {v['u0']} and "
                            f"{v['value1']!r} at {v['u1']} share no chart; refine with an "
                            "intermediate control point"),
                "witness": format_rational(v["u0"]),
            })
        if rep.problems:
            rep.ok = False
            return rep
        v0, v1 = self.line[0][1], self.line[-1][1]
        if translate(v0, 1) != v1:
            rep.problems.append({
                "check": "degree-1",
                "message": f"line value at 1 is {v1!r}, expected {translate(v0, 1)!r}",
                "witness": "1",
            })
        for i, bm in enumerate(self.branch_maps):
            expect = self.eval(LinePoint(self.shape.attach(i)))
            if bm[0][1] != expect:
                rep.problems.append({
                    "check": "continuity",
                    "message": f"branch {i} value at t=0 is {bm[0][1]!r}, line gives {expect!r}",
                    "witness": format_rational(self.shape.attach(i)),
                })
        if rep.problems:
            rep.ok = False
            return rep
        # F(T_R) inside T_R, piece by piece
        segs = [TSegment(None, 0, Fraction(0), Fraction(1))]
        segs += [TSegment(i, 0, Fraction(0), s) for i, s in enumerate(self.tr) if s > 0]
        for seg in segs:
            for a, b, p, k in self._domain_pieces(seg):
                if p.chart == LINE:
                    continue
                j = p.chart[1]
                top = max(p.value(a), p.value(b))
                if top > self.tr[j]:
                    w = a if p.value(a) == top else b
                    where = "line" if seg.branch is None else f"branch {seg.branch}"
                    rep.problems.append({
                        "check": "invariance",
                        "message": (f"F({where} at {w}) reaches branch {j} coordinate {top}, "
                                    f"beyond the declared skeleton upto {self.tr[j]}"),
                        "witness": format_rational(w),
                    })
                    break
        if self.line_maps_into_line() and any(s > 0 for s in self.tr):
            rep.warnings.append(
                "F(R) lies in R, so the invariant skeleton is R itself; declared initial "
                "branch segments enlarge it and the R-part is then only estimated")
        for p in [p for ps in self.branch_pieces for p in ps] + self.line_pieces:
            if p.constant:
                rep.warnings.append(f"constant plateau on [{p.u0}, {p.u1}]")
                break
        rep.ok = not rep.problems
        return rep


def covered_set(segments: Sequence[TSegment]) -> list[TSegment]:
    """Merge a chain of chart segments into disjoint per-chart segments."""
    by_chart: dict[tuple, list[TSegment]] = {}
    for s in segments:
        by_chart.setdefault(s.chart, []).append(s)
    out = []
    for chart in sorted(by_chart, key=lambda c: (c[0], c[1:])):
        segs = sorted(by_chart[chart], key=lambda s: (s.lo, s.hi))
        cur = segs[0]
        for s in segs[1:]:
            if s.lo <= cur.hi:
                cur = TSegment(cur.branch, cur.m, cur.lo, max(cur.hi, s.hi))
            else:
                out.append(cur)
                cur = s
        out.append(cur)
    return out


# JSON -------------------------------------------------------------------------

def point_from_json(obj, shape: SunGraphShape) -> Point:
    if not isinstance(obj, dict) or len(obj) != 1:
        raise MapSpecError(f"bad point encoding: {obj!r}")
    if "R" in obj:
        return LinePoint(as_fraction(obj["R"]))
    if "B" in obj:
        i, t, m = obj["B"]
        if not isinstance(i, int) or not isinstance(m, int):
            raise MapSpecError(f"bad branch point encoding: {obj!r}")
        try:
            return shape.branch_point(i, as_fraction(t), m)
        except (GeometryError, IndexError) as exc:
            raise MapSpecError(f"bad branch point {obj!r}: {exc}") from None
    raise MapSpecError(f"bad point encoding: {obj!r}")


def point_to_json(pt: Point) -> dict:
    if isinstance(pt, LinePoint):
        return {"R": format_rational(pt.x)}
    return {"B": [pt.branch, format_rational(pt.t), pt.m]}


def map_from_dict(doc: dict) -> PLMap:
    try:
        shape = SunGraphShape(
            (as_fraction(b["attach"]), as_fraction(b["length"])) for b in doc.get("branches", []))
        tr = {}
        for entry in doc.get("tr", []):
            tr[int(entry["branch"])] = as_fraction(entry["upto"])
        line = [(as_fraction(x), point_from_json(v, shape)) for x, v in doc["line"]]
        bmaps = [
            [(as_fraction(t), point_from_json(v, shape)) for t, v in bm]
            for bm in doc.get("branch_maps", [])
        ]
    except MapSpecError:
        raise
    except (KeyError, TypeError, ValueError, GeometryError, ZeroDivisionError) as exc:
        raise MapSpecError(f"malformed map document: {exc}") from None
    return PLMap(shape, line, bmaps, tr)


def map_to_dict(fmap: PLMap) -> dict:
    return {
        "branches": [{"attach": format_rational(b.attach), "length": format_rational(b.length)}
                     for b in fmap.shape.branches],
        "tr": [{"branch": i, "upto": format_rational(s)} for i, s in enumerate(fmap.tr)],
        "line": [[format_rational(x), point_to_json(v)] for x, v in fmap.line],
        "branch_maps": [[[format_rational(t), point_to_json(v)] for t, v in bm]
                        for bm in fmap.branch_maps],
    }


def load_map(path) -> PLMap:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise MapSpecError(f"{path}: invalid JSON: {exc}") from None
    return map_from_dict(doc)
