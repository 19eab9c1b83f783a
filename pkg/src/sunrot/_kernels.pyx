# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops: minimum cycle mean (int64) and float orbit averages.

Signatures mirror :mod:`sunrot._kernels_py`.  Callers guarantee that all
Karp partial sums fit in int64 (see ``sunrot.kernels``).
"""
from libc.math cimport floor
from libc.stdlib cimport malloc, free

cdef long long NONE = 0x7fffffffffffffff


def karp_min_mean(Py_ssize_t n, long long[:] src, long long[:] dst, long long[:] w):
    cdef Py_ssize_t m = src.shape[0]
    cdef Py_ssize_t k, e, v
    cdef long long ps, val, num, den, wn, wd, bn = 0, bd = 0
    cdef bint have_best = False, have_worst
    if n == 0:
        return None
    cdef long long *table = <long long *> malloc((n + 1) * n * sizeof(long long))
    if table == NULL:
        raise MemoryError()
    try:
        for v in range(n):
            table[v] = NONE
        table[0] = 0
        for k in range(1, n + 1):
            for v in range(n):
                table[k * n + v] = NONE
            for e in range(m):
                ps = table[(k - 1) * n + src[e]]
                if ps != NONE:
                    val = ps + w[e]
                    if val < table[k * n + dst[e]]:
                        table[k * n + dst[e]] = val
        for v in range(n):
            if table[n * n + v] == NONE:
                continue
            have_worst = False
            wn = 0
            wd = 1
            for k in range(n):
                if table[k * n + v] == NONE:
                    continue
                num = table[n * n + v] - table[k * n + v]
                den = n - k
                if not have_worst or num * wd > wn * den:
                    wn, wd, have_worst = num, den, True
            if have_worst and (not have_best or wn * bd < bn * wd):
                bn, bd, have_best = wn, wd, True
    finally:
        free(table)
    if not have_best:
        return None
    a, b = bn, bd
    while b:
        a, b = b, a % b
    a = abs(a)
    return bn // a, bd // a


cdef inline Py_ssize_t _locate(double[:] breaks, Py_ssize_t lo, Py_ssize_t hi, double u) nogil:
    cdef Py_ssize_t mid
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if breaks[mid] <= u:
            lo = mid
        else:
            hi = mid
    return lo


def orbit_average(long long[:] dom_off, double[:] u0, double[:] u1, long long[:] tchart,
                  long long[:] tm, double[:] v0, double[:] v1, double[:] attach,
                  double[:] length, long long chart, double coord, long long m, long long steps):
    cdef long long x_chart = chart, xm = m, k, tc, it
    cdef double x = coord, u, a, b, val, start, end
    cdef Py_ssize_t d, j
    if steps <= 0:
        return 0.0
    start = coord if chart < 0 else attach[chart] + m
    with nogil:
        for it in range(steps):
            if x_chart < 0:
                k = <long long> floor(x)
                u = x - k
                d = 0
            else:
                k = xm
                u = x
                d = 1 + x_chart
                if u > length[x_chart]:
                    u = length[x_chart]
            j = _locate(u0, dom_off[d], dom_off[d + 1], u)
            a = u0[j]
            b = u1[j]
            val = v0[j] + (v1[j] - v0[j]) * ((u - a) / (b - a))
            tc = tchart[j]
            if tc < 0:
                x_chart = -1
                x = val + k
                xm = 0
            elif val <= 0.0:
                x_chart = -1
                x = attach[tc] + tm[j] + k
                xm = 0
            else:
                x_chart = tc
                x = val
                xm = tm[j] + k
    end = x if x_chart < 0 else attach[x_chart] + xm
    return (end - start) / steps
