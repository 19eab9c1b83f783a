"""Pure-Python versions of the hot loops (used when the compiled core is absent).

Both implementations take the same flat arguments so that they can be
swapped freely; see :mod:`sunrot.kernels` for the dispatch.
"""
from __future__ import annotations

import math

INF = float("inf")


def karp_min_mean(n, src, dst, w):
    """Minimum cycle mean of a digraph whose vertices are all reachable from 0.

    Returns ``(num, den)`` with ``num/den`` the exact minimum mean, or
    ``None`` when the graph has no cycle.
    """
    if n == 0:
        return None
    # D[k][v]: least weight of a walk with exactly k arrows from vertex 0 to v
    none = None
    prev = [none] * n
    prev[0] = 0
    table = [prev]
    for _ in range(n):
        cur = [none] * n
        for s, d, x in zip(src, dst, w):
            ps = prev[s]
            if ps is not none:
                val = ps + x
                cd = cur[d]
                if cd is none or val < cd:
                    cur[d] = val
        table.append(cur)
        prev = cur
    best = None  # (num, den)
    last = table[n]
    for v in range(n):
        if last[v] is none:
            continue
        worst = None
        for k in range(n):
            dk = table[k][v]
            if dk is none:
                continue
            num, den = last[v] - dk, n - k
            if worst is None or num * worst[1] > worst[0] * den:
                worst = (num, den)
        if worst is not None and (best is None or worst[0] * best[1] < best[0] * worst[1]):
            best = worst
    if best is None:
        return None
    g = math.gcd(best[0], best[1])
    return best[0] // g, best[1] // g


def _locate(breaks, lo, hi, u):
    # last index k in [lo, hi) with breaks[k] <= u
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if breaks[mid] <= u:
            lo = mid
        else:
            hi = mid
    return lo


def orbit_average(dom_off, u0, u1, tchart, tm, v0, v1, attach, length, chart, coord, m, steps):
    """Float orbit of a sun-graph PL map; mean line-retraction displacement.

    ``chart`` is -1 for the line (``coord`` is the abscissa, ``m`` unused)
    or a branch index (``coord`` the distance from the attachment, ``m`` the
    translate).  Domain 0 of the tables is the line on [0, 1], domain
    ``1 + i`` is branch ``i``.
    """
    if steps <= 0:
        return 0.0
    start = coord if chart < 0 else attach[chart] + m
    x_chart, x, xm = chart, coord, m
    for _ in range(steps):
        if x_chart < 0:
            k = math.floor(x)
            u = x - k
            d = 0
        else:
            k = xm
            u = x
            d = 1 + x_chart
            if u > length[x_chart]:
                u = length[x_chart]
        lo, hi = dom_off[d], dom_off[d + 1]
        j = _locate(u0, lo, hi, u)
        a, b = u0[j], u1[j]
        val = v0[j] + (v1[j] - v0[j]) * ((u - a) / (b - a))
        tc = tchart[j]
        if tc < 0:
            x_chart, x, xm = -1, val + k, 0
        elif val <= 0.0:
            x_chart, x, xm = -1, attach[tc] + tm[j] + k, 0
        else:
            x_chart, x, xm = tc, val, tm[j] + k
    end = x if x_chart < 0 else attach[x_chart] + xm
    return (end - start) / steps
