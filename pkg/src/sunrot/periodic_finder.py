"""Exact periodic (mod 1) points from loops and from J-tails.

For a loop the chain of positive coverings is refined backwards: each
vertex interval is shrunk to a subinterval mapped exactly onto the next
refined interval, after which the composite of the transfer functions is a
PL self-map of a subinterval and its fixed points are solved piece by
piece.  Every candidate is re-checked with the real map before it is
returned.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .core_space import BranchPoint, LinePoint, Point, format_rational, retract_line, translate
from .cover_graph import CoveringGraph, IPath
from .partition import DUSTBIN, BasicPartition, classify_point
from .pl_map import PLMap, point_to_json
from .plfunc import PLFunc

__all__ = [
    "PeriodicWitness",
    "PeriodicSearchError",
    "Verification",
    "periodic_from_loop",
    "periodic_from_jtail",
    "realize_path",
    "verify_witness",
    "point_distance",
]


class PeriodicSearchError(RuntimeError):
    """The covering chain could not be refined; points at a graph bug."""


@dataclass(frozen=True)
class PeriodicWitness:
    point: Point
    q: int
    p: int
    provenance: str                 # "loop" or "jtail"
    trace: tuple = ()               # (cell id or "dustbin"/"T_R", cumulative displacement)
    degenerate: bool = False

    @property
    def rho(self) -> Fraction:
        return Fraction(self.p, self.q)

    def to_json(self) -> dict:
        return {"point": point_to_json(self.point), "q": self.q, "p": self.p,
                "rho": format_rational(self.rho), "provenance": self.provenance,
                "degenerate": self.degenerate,
                "trace": [[c, w] for c, w in self.trace]}


@dataclass(frozen=True)
class Verification:
    ok: bool
    residual: Fraction
    rho_ok: bool


def point_distance(shape, a: Point, b: Point) -> Fraction:
    """Path distance in the lifted sun graph."""
    def foot(pt):
        if isinstance(pt, LinePoint):
            return pt.x, Fraction(0), None
        return shape.attach(pt.branch) + pt.m, pt.t, (pt.branch, pt.m)

    xa, ta, ca = foot(a)
    xb, tb, cb = foot(b)
    if ca is not None and ca == cb:
        return abs(ta - tb)
    return ta + abs(xa - xb) + tb


def verify_witness(fmap: PLMap, w: PeriodicWitness) -> Verification:
    shape = fmap.shape
    x = w.point
    y = fmap.iterate(x, w.q)
    target = translate(x, w.p)
    residual = point_distance(shape, y, target)
    disp = retract_line(shape, y) - retract_line(shape, x)
    rho_ok = w.q > 0 and Fraction(disp, w.q) == w.rho
    return Verification(residual == 0 and rho_ok, residual, rho_ok)


def _host_data(g: CoveringGraph, key):
    v = g.vertices[key]
    cell = g.part[v.host]
    return cell, v.lo, v.hi


def _pull_back(phi: PLFunc, a: Fraction, c: Fraction, lo: Fraction, hi: Fraction):
    """Subinterval ``[u, v]`` of ``[a, c]`` with ``phi([u, v]) == [lo, hi]`` exactly.

    ``v`` is the leftmost point reaching ``hi`` and ``u`` the rightmost point of
    ``[a, v]`` at level ``lo``.
    """
    v = phi.first_reaching(hi, a, c)
    if v is None:
        return None
    u = phi.rightmost(lo, a, v)
    if u is None:
        return None
    return u, v


def _trace(fmap: PLMap, part: BasicPartition, x: Point, q: int) -> tuple:
    out, disp = [], 0
    shape = fmap.shape
    for _ in range(q):
        hit = fmap.in_X_plus_Z(x)
        if hit is not None:
            out.append((classify_point(part, fmap, x), disp))
        else:
            out.append(("T_R" if fmap.in_T_R(x) else DUSTBIN, disp))
        y = fmap.eval(x)
        disp += retract_line(shape, y) - retract_line(shape, x)
        x = y
    return tuple((c, int(d)) for c, d in out)


def _follows(fmap: PLMap, g: CoveringGraph, x: Point, keys, weights) -> bool:
    """``F^i(x) - W_i`` lies in the vertex interval of ``alpha_i`` for every ``i``."""
    w = 0
    for i, key in enumerate(keys):
        cell, lo, hi = _host_data(g, key)
        pt = translate(x, -w)
        if not (isinstance(pt, BranchPoint) and pt.branch == cell.branch and pt.m == 0
                and lo <= pt.t <= hi):
            if not (isinstance(pt, LinePoint) and lo == 0
                    and fmap.shape.attached_branch(pt.x) == (cell.branch, 0)):
                return False
        if i < len(weights):
            w += weights[i]
            x = fmap.eval(x)
    return True


def _refine(fmap: PLMap, g: CoveringGraph, keys, target: tuple[Fraction, Fraction]):
    """Backward refinement along ``keys[:-1]`` into ``target`` (local coordinates).

    Returns the refined intervals ``K_0 ... K_{n-1}`` and the composite map on ``K_0``.
    """
    intervals = []
    lo, hi = target
    for key in reversed(keys[:-1]):
        cell, a, c = _host_data(g, key)
        phi = fmap.transfer(cell.branch, cell.ell, cell.p)
        got = _pull_back(phi, a, c, lo, hi)
        if got is None:
            raise PeriodicSearchError(
                f"refinement failed at vertex {key}: [{lo}, {hi}] not covered by [{a}, {c}]")
        intervals.append(got)
        lo, hi = got
    intervals.reverse()
    comp = None
    for key, (u, v) in zip(keys[:-1], intervals):
        cell = g.part[g.vertices[key].host]
        phi = fmap.transfer(cell.branch, cell.ell, cell.p).restrict(u, v)
        comp = phi if comp is None else phi.compose_after(comp)
    return intervals, comp


def _candidates(fixed) -> list:
    out = []
    for u, v in fixed:
        out.append((u, u != v))
        if u != v:
            out.append((v, True))
    return out


def periodic_from_loop(fmap: PLMap, g: CoveringGraph, loop) -> PeriodicWitness:
    """Periodic point following ``loop`` (a :class:`~sunrot.rotation_set.LoopSpec`)."""
    keys, weights = loop.keys, loop.weights
    if len(keys) < 2:
        raise ValueError("loop has no arrows")
    cell0, a0, c0 = _host_data(g, keys[0])
    intervals, comp = _refine(fmap, g, keys, (a0, c0))
    u0, v0 = intervals[0]
    W = sum(weights)
    for t, degenerate in _candidates(comp.fixed_points(u0, v0)):
        x = fmap.shape.branch_point(cell0.branch, t, 0)
        if fmap.iterate(x, len(weights)) != translate(x, W):
            continue
        if not _follows(fmap, g, x, keys[:-1], weights):
            continue
        return PeriodicWitness(x, len(weights), W, "loop",
                               _trace(fmap, g.part, x, len(weights)), degenerate)
    raise PeriodicSearchError(f"no verified fixed point of the loop composite on [{u0}, {v0}]")


def realize_path(fmap: PLMap, g: CoveringGraph, keys) -> Optional[Point]:
    """A point whose orbit follows the finite path ``keys`` (leftmost choice)."""
    keys = [tuple(k) for k in keys]
    for a, b in zip(keys, keys[1:]):
        if b not in g.successors(a):
            raise ValueError(f"no arrow {a} -> {b}")
    _, lo, hi = _host_data(g, keys[-1])
    if len(keys) == 1:
        cell, _, _ = _host_data(g, keys[0])
        return fmap.shape.branch_point(cell.branch, lo, 0)
    intervals, _ = _refine(fmap, g, keys, (lo, hi))
    cell, _, _ = _host_data(g, keys[0])
    u, v = intervals[0]
    return fmap.shape.branch_point(cell.branch, (u + v) / 2, 0)


def periodic_from_jtail(fmap: PLMap, part: BasicPartition, tail: IPath) -> PeriodicWitness:
    """Periodic point of a certified J-tail: least verified fixed point of
    ``F^q - p`` (through the transfer functions of the label cycle) above
    ``min B_0``."""
    cycle = list(tail.cycle)
    if not cycle:
        raise ValueError("tail has no label cycle")
    comp = None
    for cid in cycle:
        cell = part[cid]
        phi = fmap.transfer(cell.branch, cell.ell, cell.p)
        comp = phi if comp is None else phi.compose_after(comp)
    b0 = part[cycle[0]]
    p = sum(part[c].p for c in cycle)
    q = len(cycle)
    for t, degenerate in _candidates(comp.fixed_points(b0.a, comp.hi)):
        x = fmap.shape.branch_point(b0.branch, t, 0)
        if fmap.iterate(x, q) != translate(x, p):
            continue
        trace = _trace(fmap, part, x, q)
        if [c for c, _ in trace] != cycle:
            continue
        return PeriodicWitness(x, q, p, "jtail", trace, degenerate)
    raise PeriodicSearchError(f"no verified fixed point for label cycle {cycle}")
