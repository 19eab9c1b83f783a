"""Brute-force ground truth: exact orbits, itineraries and small-graph cycles.

Nothing here uses the covering graph machinery beyond reading a finished
graph, so it can cross-check the fast paths.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .core_space import BranchPoint, Point, retract_line, translate
from .cover_graph import CoveringGraph
from .partition import DUSTBIN, BasicPartition, classify_point
from .pl_map import PLMap

__all__ = ["OrbitRecord", "simulate", "itinerary_rho_check", "itinerary_path",
           "enumerate_cycles", "GraphTooLarge", "TR"]

TR = "T_R"


class GraphTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class OrbitRecord:
    start: Point
    points: tuple                 # F^0(x) ... F^N(x)
    itinerary: tuple              # N entries: cell id, "dustbin" or "T_R"
    displacements: tuple          # r_R(F^n x) - r_R(x), n = 0..N
    entered_TR: bool

    @property
    def steps(self) -> int:
        return len(self.points) - 1

    @property
    def rho(self) -> tuple:
        """Empirical rotation numbers ``d_n / n`` for ``n = 1..N``."""
        return tuple(Fraction(d, n) for n, d in enumerate(self.displacements) if n)

    @property
    def in_X(self) -> bool:
        return all(isinstance(c, int) for c in self.itinerary)


def _symbol(part: BasicPartition, fmap: PLMap, pt: Point) -> Union[int, str]:
    if fmap.in_X_plus_Z(pt) is not None:
        return classify_point(part, fmap, pt)
    return TR if fmap.in_T_R(pt) else DUSTBIN


def simulate(fmap: PLMap, part: BasicPartition, x: Point, n: int) -> OrbitRecord:
    shape = fmap.shape
    x = shape.canonical(x)
    r0 = retract_line(shape, x)
    pts, itin, disp = [x], [], [Fraction(0)]
    entered = False
    for _ in range(n):
        sym = _symbol(part, fmap, pts[-1])
        entered = entered or sym == TR
        itin.append(sym)
        y = fmap.eval(pts[-1])
        pts.append(y)
        disp.append(retract_line(shape, y) - r0)
    return OrbitRecord(x, tuple(pts), tuple(itin), tuple(disp), entered)


def itinerary_rho_check(fmap: PLMap, part: BasicPartition, rec: OrbitRecord) -> bool:
    """Translate bookkeeping along an itinerary in ``X + Z``.

    With ``s_n = p(A_0) + ... + p(A_{n-1})`` and ``x`` in ``A_0 + k``, each
    ``F^n(x) - k - s_n`` lies in ``A_n`` and the displacement after ``n``
    steps is ``s_n`` plus the offset between the attachments of the
    branches of ``A_n`` and ``A_0``.  Raises ``ValueError`` if the orbit left
    ``X + Z``.
    """
    if not rec.in_X:
        raise ValueError("orbit leaves X + Z; precondition unmet")
    k = fmap.in_X_plus_Z(rec.start)[1]
    s = 0
    shape = fmap.shape
    base = shape.attach(part[rec.itinerary[0]].branch) if rec.itinerary else 0
    for n, cid in enumerate(rec.itinerary):
        cell = part[cid]
        pt = translate(rec.points[n], -(k + s))
        t = pt.t if isinstance(pt, BranchPoint) else Fraction(0)
        on_branch = (isinstance(pt, BranchPoint) and pt.branch == cell.branch and pt.m == 0) or (
            not isinstance(pt, BranchPoint) and shape.attached_branch(pt.x) == (cell.branch, 0))
        if not on_branch or not (cell.a <= t <= cell.b):
            return False
        if rec.displacements[n] != s + shape.attach(cell.branch) - base:
            return False
        s += cell.p
    last = rec.points[-1]
    hit = fmap.in_X_plus_Z(last)
    if hit is None:
        return True
    return rec.displacements[-1] == s + shape.attach(hit[0]) - base


def itinerary_path(fmap: PLMap, g: CoveringGraph, rec: OrbitRecord):
    """Vertex path followed by an orbit in ``X + Z``, or ``None`` if the graph lacks it.

    From ``alpha_0 = A_0`` the next vertex is the unique successor hosted by
    the next itinerary cell; each step also checks that the translated orbit
    point lies in the vertex interval.
    """
    if not rec.in_X or not rec.itinerary:
        raise ValueError("orbit leaves X + Z; precondition unmet")
    part = g.part
    k = fmap.in_X_plus_Z(rec.start)[1]
    key = (rec.itinerary[0],)
    path, s = [key], 0
    for n, cid in enumerate(rec.itinerary):
        if n:
            nxt = [w for w in g.successors(key) if w[-1] == cid]
            if len(nxt) != 1:
                return None
            key = nxt[0]
            path.append(key)
        v = g.vertices[key]
        pt = translate(rec.points[n], -(k + s))
        t = pt.t if isinstance(pt, BranchPoint) else Fraction(0)
        if not (v.lo <= t <= v.hi):
            return None
        s += part[cid].p
    return path


def enumerate_cycles(g: CoveringGraph, max_vertices: int = 12) -> list[tuple[int, int, Fraction, tuple]]:
    """All simple cycles as ``(W, L, mean, keys)``; refuses graphs above ``max_vertices``."""
    keys = sorted(g.vertices)
    if len(keys) > max_vertices:
        raise GraphTooLarge(f"{len(keys)} vertices > {max_vertices}")
    idx = {k: n for n, k in enumerate(keys)}
    succ = [[] for _ in keys]
    for a in g.arrows:
        succ[idx[a.src]].append((idx[a.dst], a.weight))
    out = []

    def walk(start, v, path, weight, on_path):
        for w, x in succ[v]:
            if w == start:
                L = len(path)
                out.append((weight + x, L, Fraction(weight + x, L), tuple(keys[i] for i in path)))
            elif w > start and w not in on_path:
                on_path.add(w)
                path.append(w)
                walk(start, w, path, weight + x, on_path)
                path.pop()
                on_path.discard(w)

    for s in range(len(keys)):
        walk(s, s, [s], 0, {s})
    return out
