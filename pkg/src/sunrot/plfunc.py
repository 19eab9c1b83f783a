"""Continuous piecewise-linear real functions with exact rational breakpoints."""
from __future__ import annotations

from bisect import bisect_left, bisect_right
from fractions import Fraction
from typing import Iterator, Optional, Sequence

__all__ = ["PLFunc", "solve_linear"]


def solve_linear(x0, x1, y0, y1, y) -> Optional[Fraction]:
    """Abscissa where the segment (x0,y0)-(x1,y1) takes value ``y``.

    Returns ``None`` if ``y`` is outside ``[min(y0,y1), max(y0,y1)]`` or the
    segment is constant.
    """
    if y0 == y1:
        return None
    if not (min(y0, y1) <= y <= max(y0, y1)):
        return None
    return x0 + (y - y0) * (x1 - x0) / (y1 - y0)


class PLFunc:
    """Continuous piecewise-linear function on ``[xs[0], xs[-1]]``.

    Breakpoints must be strictly increasing (a single breakpoint describes a
    function on a degenerate interval).
    """

    __slots__ = ("xs", "ys")

    def __init__(self, xs: Sequence, ys: Sequence):
        if len(xs) != len(ys) or not xs:
            raise ValueError("need matching, non-empty breakpoint lists")
        xs = [Fraction(x) for x in xs]
        ys = [Fraction(y) for y in ys]
        for a, b in zip(xs, xs[1:]):
            if not a < b:
                raise ValueError("breakpoints must be strictly increasing")
        self.xs = xs
        self.ys = ys

    @classmethod
    def from_points(cls, pts) -> "PLFunc":
        xs, ys = [], []
        for x, y in pts:
            x, y = Fraction(x), Fraction(y)
            if xs and x == xs[-1]:
                if y != ys[-1]:
                    raise ValueError(f"discontinuity at {x}")
                continue
            xs.append(x)
            ys.append(y)
        return cls(xs, ys).simplified()

    def __repr__(self) -> str:
        pts = ", ".join(f"({x}, {y})" for x, y in zip(self.xs, self.ys))
        return f"PLFunc([{pts}])"

    def __eq__(self, other) -> bool:
        if not isinstance(other, PLFunc):
            return NotImplemented
        a, b = self.simplified(), other.simplified()
        return a.xs == b.xs and a.ys == b.ys

    @property
    def lo(self) -> Fraction:
        return self.xs[0]

    @property
    def hi(self) -> Fraction:
        return self.xs[-1]

    def __call__(self, x) -> Fraction:
        x = Fraction(x)
        xs = self.xs
        if not (xs[0] <= x <= xs[-1]):
            raise ValueError(f"{x} outside domain [{xs[0]}, {xs[-1]}]")
        k = bisect_right(xs, x) - 1
        if k >= len(xs) - 1:
            return self.ys[-1]
        x0, x1, y0, y1 = xs[k], xs[k + 1], self.ys[k], self.ys[k + 1]
        return y0 + (y1 - y0) * (x - x0) / (x1 - x0)

    def pieces(self) -> Iterator[tuple[Fraction, Fraction, Fraction, Fraction]]:
        xs, ys = self.xs, self.ys
        if len(xs) == 1:
            yield xs[0], xs[0], ys[0], ys[0]
            return
        for k in range(len(xs) - 1):
            yield xs[k], xs[k + 1], ys[k], ys[k + 1]

    def simplified(self) -> "PLFunc":
        xs, ys = self.xs, self.ys
        if len(xs) <= 2:
            return PLFunc.__new_raw(list(xs), list(ys))
        ox, oy = [xs[0]], [ys[0]]
        for k in range(1, len(xs) - 1):
            # drop interior points collinear with neighbours
            x0, y0 = ox[-1], oy[-1]
            x1, y1 = xs[k], ys[k]
            x2, y2 = xs[k + 1], ys[k + 1]
            if (y1 - y0) * (x2 - x1) == (y2 - y1) * (x1 - x0):
                continue
            ox.append(x1)
            oy.append(y1)
        ox.append(xs[-1])
        oy.append(ys[-1])
        return PLFunc.__new_raw(ox, oy)

    @staticmethod
    def __new_raw(xs, ys) -> "PLFunc":
        f = object.__new__(PLFunc)
        f.xs = xs
        f.ys = ys
        return f

    def restrict(self, lo, hi) -> "PLFunc":
        lo, hi = Fraction(lo), Fraction(hi)
        if not (self.lo <= lo <= hi <= self.hi):
            raise ValueError(f"[{lo}, {hi}] not inside [{self.lo}, {self.hi}]")
        i = bisect_right(self.xs, lo)
        j = bisect_left(self.xs, hi)
        xs = [lo] + self.xs[i:j] + ([hi] if hi != lo else [])
        ys = [self(x) for x in xs[:1]] + self.ys[i:j] + ([self(hi)] if hi != lo else [])
        return PLFunc.__new_raw(xs, ys)

    def max_on(self, lo=None, hi=None) -> Fraction:
        f = self if lo is None and hi is None else self.restrict(
            self.lo if lo is None else lo, self.hi if hi is None else hi)
        return max(f.ys)

    def min_on(self, lo=None, hi=None) -> Fraction:
        f = self if lo is None and hi is None else self.restrict(
            self.lo if lo is None else lo, self.hi if hi is None else hi)
        return min(f.ys)

    def is_nondecreasing(self) -> bool:
        return all(a <= b for a, b in zip(self.ys, self.ys[1:]))

    def solutions(self, y, lo=None, hi=None) -> list[Fraction]:
        """Sorted abscissae in ``[lo, hi]`` where the function equals ``y``.

        A constant piece at level ``y`` contributes both of its endpoints.
        """
        y = Fraction(y)
        f = self if lo is None and hi is None else self.restrict(
            self.lo if lo is None else lo, self.hi if hi is None else hi)
        out: list[Fraction] = []
        for x0, x1, y0, y1 in f.pieces():
            if y0 == y1:
                if y0 == y:
                    out.extend((x0, x1))
                continue
            x = solve_linear(x0, x1, y0, y1, y)
            if x is not None:
                out.append(x)
        return sorted(set(out))

    def has_plateau_at(self, y) -> bool:
        return any(y0 == y1 == y and x0 < x1 for x0, x1, y0, y1 in self.pieces())

    def leftmost(self, y, lo=None, hi=None) -> Optional[Fraction]:
        s = self.solutions(y, lo, hi)
        return s[0] if s else None

    def rightmost(self, y, lo=None, hi=None) -> Optional[Fraction]:
        s = self.solutions(y, lo, hi)
        return s[-1] if s else None

    def first_reaching(self, y, lo=None, hi=None) -> Optional[Fraction]:
        """Smallest ``x`` in ``[lo, hi]`` with ``f(x) >= y``."""
        y = Fraction(y)
        f = self if lo is None and hi is None else self.restrict(
            self.lo if lo is None else lo, self.hi if hi is None else hi)
        for x0, x1, y0, y1 in f.pieces():
            if y0 >= y:
                return x0
            if y1 >= y:
                return solve_linear(x0, x1, y0, y1, y)
        return None

    def running_max(self) -> "PLFunc":
        """``x -> max f([lo, x])``, a nondecreasing PL function."""
        pts = [(self.xs[0], self.ys[0])]
        m = self.ys[0]
        for x0, x1, y0, y1 in self.pieces():
            if x0 == x1:
                break
            if y1 > m:
                if y0 < m:
                    xc = solve_linear(x0, x1, y0, y1, m)
                    pts.append((xc, m))
                pts.append((x1, y1))
                m = y1
            else:
                pts.append((x1, m))
        return PLFunc.from_points(pts)

    def running_min_from_right(self) -> "PLFunc":
        """``x -> min f([x, hi])``, a nondecreasing PL function."""
        neg = PLFunc([-x for x in reversed(self.xs)], [y for y in reversed(self.ys)])
        # min over [x, hi] of f == -max over [-hi, -x] of -f(-.)
        m = PLFunc(neg.xs, [-y for y in neg.ys]).running_max()
        return PLFunc([-x for x in reversed(m.xs)], [-y for y in reversed(m.ys)])

    def compose_after(self, inner: "PLFunc") -> "PLFunc":
        """Return ``self o inner``; ``inner``'s range must lie in the domain of ``self``."""
        if inner.min_on() < self.lo or inner.max_on() > self.hi:
            raise ValueError("range of inner function leaves the outer domain")
        pts = []
        for x0, x1, y0, y1 in inner.pieces():
            cuts = {x0, x1}
            if y0 != y1:
                lo_y, hi_y = min(y0, y1), max(y0, y1)
                i = bisect_right(self.xs, lo_y)
                j = bisect_left(self.xs, hi_y)
                for bx in self.xs[i:j]:
                    cuts.add(solve_linear(x0, x1, y0, y1, bx))
            for x in sorted(cuts):
                pts.append((x, self(inner(x))))
        return PLFunc.from_points(pts)

    def fixed_points(self, lo=None, hi=None) -> list[tuple[Fraction, Fraction]]:
        """Closed intervals ``[u, v]`` (often ``u == v``) of fixed points, sorted."""
        f = self if lo is None and hi is None else self.restrict(
            self.lo if lo is None else lo, self.hi if hi is None else hi)
        out: list[tuple[Fraction, Fraction]] = []
        for x0, x1, y0, y1 in f.pieces():
            d0, d1 = y0 - x0, y1 - x1
            if d0 == 0 and d1 == 0:
                cand = (x0, x1)
            elif d0 == d1:
                continue
            else:
                x = solve_linear(x0, x1, d0, d1, Fraction(0))
                if x is None:
                    continue
                cand = (x, x)
            if out and cand[0] <= out[-1][1]:
                out[-1] = (out[-1][0], max(out[-1][1], cand[1]))
            else:
                out.append(cand)
        return out

    def shifted(self, dy) -> "PLFunc":
        dy = Fraction(dy)
        return PLFunc.__new_raw(list(self.xs), [y + dy for y in self.ys])

    def clamped_below(self, floor) -> "PLFunc":
        """``x -> max(f(x), floor)``."""
        floor = Fraction(floor)
        pts = []
        for x0, x1, y0, y1 in self.pieces():
            pts.append((x0, max(y0, floor)))
            if (y0 - floor) * (y1 - floor) < 0:
                xc = solve_linear(x0, x1, y0, y1, floor)
                pts.append((xc, floor))
            pts.append((x1, max(y1, floor)))
        return PLFunc.from_points(pts)
