"""Dispatch for the hot loops.

The compiled module ``sunrot._kernels`` is used when it was built; set
``SUNROT_PURE_PYTHON=1`` to force the pure-Python fallback.  Both give
identical results: Karp's algorithm is exact on integers, and the float
orbit performs the same operations in the same order.
"""
from __future__ import annotations

import os
from array import array
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from . import _kernels_py
from .core_space import BranchPoint, LinePoint, Point
from .pl_map import LINE, PLMap

try:
    if os.environ.get("SUNROT_PURE_PYTHON"):
        raise ImportError
    from . import _kernels as _compiled
except ImportError:  # pragma: no cover - depends on the build
    _compiled = None

BACKEND = "compiled" if _compiled is not None else "python"

_INT64_SAFE = 1 << 61

__all__ = ["BACKEND", "FloatTables", "float_tables", "min_cycle_mean", "orbit_average"]


def _impl(backend: Optional[str]):
    if backend is None:
        backend = BACKEND
    if backend == "compiled":
        if _compiled is None:
            raise RuntimeError("compiled kernels are not available")
        return _compiled
    if backend == "python":
        return _kernels_py
    raise ValueError(f"unknown backend {backend!r}")


def min_cycle_mean(n: int, arrows, backend: Optional[str] = None) -> Optional[Fraction]:
    """Exact minimum cycle mean of a directed graph.

    ``arrows`` is a sequence of ``(src, dst, weight)`` with vertices in
    ``range(n)`` and integer weights; ``None`` if there is no cycle.
    """
    src = [a[0] for a in arrows]
    dst = [a[1] for a in arrows]
    w = [int(a[2]) for a in arrows]
    if not _all_reachable(n, src, dst):
        # Karp's recurrence needs every vertex reachable from vertex 0:
        # prepend a source with zero-weight arrows to everything
        src = [0] * n + [s + 1 for s in src]
        dst = list(range(1, n + 1)) + [d + 1 for d in dst]
        w = [0] * n + w
        n += 1
    impl = _impl(backend)
    bound = (n + 1) * (max((abs(x) for x in w), default=0) + 1)
    if impl is _compiled and 2 * bound * (n + 1) >= _INT64_SAFE:
        impl = _kernels_py  # partial sums could overflow int64
    if impl is _compiled:
        res = impl.karp_min_mean(n, array("q", src), array("q", dst), array("q", w))
    else:
        res = impl.karp_min_mean(n, src, dst, w)
    return None if res is None else Fraction(res[0], res[1])


def _all_reachable(n: int, src, dst) -> bool:
    if n == 0:
        return True
    succ = [[] for _ in range(n)]
    for s, d in zip(src, dst):
        succ[s].append(d)
    seen, todo = {0}, [0]
    while todo:
        for d in succ[todo.pop()]:
            if d not in seen:
                seen.add(d)
                todo.append(d)
    return len(seen) == n


@dataclass(frozen=True)
class FloatTables:
    """Flat float description of a map: domain 0 is the line, ``1 + i`` branch ``i``."""

    dom_off: array
    u0: array
    u1: array
    tchart: array
    tm: array
    v0: array
    v1: array
    attach: array
    length: array


def float_tables(fmap: PLMap) -> FloatTables:
    off, u0, u1, tc, tm, v0, v1 = [0], [], [], [], [], [], []
    for pieces in [fmap.line_pieces, *fmap.branch_pieces]:
        for p in pieces:
            u0.append(float(p.u0))
            u1.append(float(p.u1))
            if p.chart == LINE:
                tc.append(-1)
                tm.append(0)
            else:
                tc.append(p.chart[1])
                tm.append(p.chart[2])
            v0.append(float(p.v0))
            v1.append(float(p.v1))
        off.append(len(u0))
    shape = fmap.shape
    return FloatTables(
        array("q", off), array("d", u0), array("d", u1), array("q", tc), array("q", tm),
        array("d", v0), array("d", v1),
        array("d", [float(shape.attach(i)) for i in range(len(shape))]),
        array("d", [float(shape.length(i)) for i in range(len(shape))]),
    )


def orbit_average(tables: FloatTables, pt: Point, steps: int, backend: Optional[str] = None) -> float:
    """Float estimate of ``(r_R(F^n x) - r_R(x)) / n`` for ``n = steps``."""
    if isinstance(pt, LinePoint):
        chart, coord, m = -1, float(pt.x), 0
    elif isinstance(pt, BranchPoint):
        chart, coord, m = pt.branch, float(pt.t), pt.m
    else:
        raise TypeError(f"not a point: {pt!r}")
    t = tables
    return _impl(backend).orbit_average(t.dom_off, t.u0, t.u1, t.tchart, t.tm, t.v0, t.v1,
                                        t.attach, t.length, chart, coord, m, steps)
