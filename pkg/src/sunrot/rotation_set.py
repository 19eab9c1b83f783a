"""Rotation numbers of loops, components, J-paths and of the line part.

Everything reported as an exact value is backed by a witness: a loop in
the covering graph (realized by a periodic point in ``periodic_finder``), a
certified J-tail, or an exact fixed-point / periodic-orbit certificate for
a monotone degree-one envelope of the line map.
"""
from __future__ import annotations

import math
from bisect import bisect_right
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from . import kernels
from .core_space import LinePoint, format_rational
from .cover_graph import CoveringGraph, IPath, compute_I_and_J, scc_decompose
from .partition import BasicPartition
from .pl_map import PLMap
from .plfunc import PLFunc

__all__ = [
    "LoopSpec",
    "ComponentInterval",
    "MonotoneRho",
    "RotRInterval",
    "RotationReport",
    "loop_rho",
    "component_interval",
    "synthesize_loop",
    "j_path_rho",
    "line_lift",
    "envelopes",
    "monotone_rho",
    "rot_R_interval",
    "assemble",
]


# loops -------------------------------------------------------------------------

@dataclass(frozen=True)
class LoopSpec:
    """Loop ``alpha_0 ... alpha_n`` (``alpha_n == alpha_0``) with its arrow weights."""

    keys: tuple
    weights: tuple

    def __post_init__(self):
        if len(self.keys) != len(self.weights) + 1:
            raise ValueError("need exactly one weight per arrow")
        if self.keys and self.keys[0] != self.keys[-1]:
            raise ValueError("a loop must end where it starts")

    @classmethod
    def from_keys(cls, g: CoveringGraph, keys: Sequence) -> "LoopSpec":
        keys = tuple(tuple(k) for k in keys)
        for a, b in zip(keys, keys[1:]):
            if b not in g.successors(a):
                raise ValueError(f"no arrow {a} -> {b}")
        return cls(keys, tuple(g.weight_of(k) for k in keys[:-1]))

    @property
    def L(self) -> int:
        return len(self.weights)

    @property
    def W(self) -> int:
        return sum(self.weights)

    @property
    def base(self):
        return self.keys[0]

    def __mul__(self, other: "LoopSpec") -> "LoopSpec":
        if self.base != other.base:
            raise ValueError("loops must share their base vertex")
        return LoopSpec(self.keys + other.keys[1:], self.weights + other.weights)

    def __pow__(self, k: int) -> "LoopSpec":
        if k < 1:
            raise ValueError("exponent must be positive")
        return LoopSpec(self.keys[:1] + self.keys[1:] * k, self.weights * k)

    def rotated(self, start: int) -> "LoopSpec":
        body_k, body_w = self.keys[:-1], self.weights
        ks = body_k[start:] + body_k[:start]
        return LoopSpec(ks + ks[:1], body_w[start:] + body_w[:start])

    def to_json(self) -> list:
        return [list(k) for k in self.keys]


def loop_rho(loop: LoopSpec) -> Fraction:
    if loop.L == 0:
        raise ValueError("empty loop has no rotation number")
    return Fraction(loop.W, loop.L)


def j_path_rho(part: BasicPartition, cycle: Sequence[int]) -> Fraction:
    """``(p(B_0) + ... + p(B_{q-1})) / q`` for a label cycle of cell ids."""
    if not cycle:
        raise ValueError("empty label cycle")
    return Fraction(sum(part[c].p for c in cycle), len(cycle))


# component intervals -------------------------------------------------------------

@dataclass
class ComponentInterval:
    id: int
    lo: Fraction
    hi: Fraction
    witness_lo: LoopSpec
    witness_hi: LoopSpec
    rigor: str
    keys: tuple = ()

    def to_json(self) -> dict:
        return {"id": self.id, "lo": format_rational(self.lo), "hi": format_rational(self.hi),
                "witness_lo": self.witness_lo.to_json(), "witness_hi": self.witness_hi.to_json(),
                "rigor": self.rigor}


def _sub_arrows(g: CoveringGraph, keys: Sequence) -> tuple[dict, list]:
    index = {k: n for n, k in enumerate(keys)}
    arcs = [(index[a.src], index[a.dst], a.weight) for a in g.arrows
            if a.src in index and a.dst in index]
    return index, arcs


def _tight_cycle(n: int, arcs: list, mu: Fraction) -> list[int]:
    """A cycle all of whose arrows are tight for the reweighting ``q*w - p``."""
    p, q = mu.numerator, mu.denominator
    rew = [(s, d, q * w - p) for s, d, w in arcs]
    dist = [0] * n
    for _ in range(n):
        changed = False
        for s, d, w in rew:
            if dist[s] + w < dist[d]:
                dist[d] = dist[s] + w
                changed = True
        if not changed:
            break
    succ = [[] for _ in range(n)]
    for s, d, w in rew:
        if dist[s] + w == dist[d]:
            succ[s].append(d)
    color = [0] * n
    for root in range(n):
        if color[root]:
            continue
        path, pos = [root], {root: 0}
        its = [iter(succ[root])]
        color[root] = 1
        while its:
            nxt = next(its[-1], None)
            if nxt is None:
                color[path[-1]] = 2
                del pos[path[-1]]
                path.pop()
                its.pop()
            elif color[nxt] == 1:
                return path[pos[nxt]:]
            elif color[nxt] == 0:
                color[nxt] = 1
                pos[nxt] = len(path)
                path.append(nxt)
                its.append(iter(succ[nxt]))
    raise AssertionError("no tight cycle for an optimal mean")


def _loop_from_cycle(g: CoveringGraph, keys: Sequence, cyc: list[int]) -> LoopSpec:
    ks = [keys[i] for i in cyc]
    basis = [n for n, k in enumerate(ks) if len(k) == 1]
    start = min(basis or range(len(ks)), key=lambda n: ks[n])
    ks = ks[start:] + ks[:start]
    return LoopSpec.from_keys(g, ks + ks[:1])


def component_interval(g: CoveringGraph, keys: Sequence, cid: int = 0,
                       backend: Optional[str] = None) -> ComponentInterval:
    """Exact ``[min, max]`` cycle mean over the strongly connected set ``keys``."""
    keys = sorted(keys)
    index, arcs = _sub_arrows(g, keys)
    n = len(keys)
    lo = kernels.min_cycle_mean(n, arcs, backend)
    neg = kernels.min_cycle_mean(n, [(s, d, -w) for s, d, w in arcs], backend)
    if lo is None or neg is None:
        raise ValueError("component has no cycle")
    hi = -neg
    w_lo = _loop_from_cycle(g, keys, _tight_cycle(n, arcs, lo))
    w_hi = _loop_from_cycle(g, keys, _tight_cycle(n, [(s, d, -w) for s, d, w in arcs], -hi))
    assert loop_rho(w_lo) == lo and loop_rho(w_hi) == hi
    capped_roots = {(cid_,) for cid_, st in g.towers.items() if st.kind == "capped"}
    rigor = "approximate" if capped_roots & set(keys) else "rigorous"
    return ComponentInterval(cid, lo, hi, w_lo, w_hi, rigor, tuple(keys))


def _path_within(g: CoveringGraph, allowed: set, src, dst) -> list:
    """Shortest vertex path ``src ... dst`` inside ``allowed`` (``[src]`` if equal)."""
    if src == dst:
        return [src]
    prev = {src: None}
    todo = deque([src])
    while todo:
        v = todo.popleft()
        for w in g.successors(v):
            if w in allowed and w not in prev:
                prev[w] = v
                if w == dst:
                    path = [w]
                    while prev[path[-1]] is not None:
                        path.append(prev[path[-1]])
                    return path[::-1]
                todo.append(w)
    raise ValueError(f"{dst} not reachable from {src} inside the component")


def synthesize_loop(g: CoveringGraph, comp, r) -> LoopSpec:
    """Loop of mean exactly ``r`` inside a component.

    ``comp`` is a :class:`ComponentInterval` or a sequence of vertex keys.
    """
    ci = comp if isinstance(comp, ComponentInterval) else component_interval(g, comp)
    r = Fraction(r)
    if not (ci.lo <= r <= ci.hi):
        raise ValueError(f"{r} outside [{ci.lo}, {ci.hi}]")
    g1, g2 = ci.witness_lo, ci.witness_hi
    if r == ci.lo:
        return g1
    if r == ci.hi:
        return g2
    allowed = set(ci.keys)
    u, v = g1.base, g2.base
    there = _path_within(g, allowed, u, v)
    back = _path_within(g, allowed, v, u)
    # B = (u -> v) . gamma_2^k . (v -> u) with the least k giving mean(B) >= r
    w_pq = sum(g.weight_of(k) for k in there[:-1]) + sum(g.weight_of(k) for k in back[:-1])
    l_pq = len(there) - 1 + len(back) - 1
    gap = g2.W - r * g2.L
    k = max(1, math.ceil((r * l_pq - w_pq) / gap))
    b_keys = there[:-1] + list((g2 ** k).keys[:-1]) + back
    a, b = g1, LoopSpec.from_keys(g, b_keys)
    if loop_rho(b) == r:
        return b
    # equalize lengths to a common multiple divisible by the denominator of r
    L = math.lcm(a.L, b.L, r.denominator)
    ka, kb = L // a.L, L // b.L
    w1, w2, pp = a.W * ka, b.W * kb, int(r * L)
    na, nb = ka * (w2 - pp), kb * (pp - w1)
    d = math.gcd(na, nb)
    loop = (a ** (na // d)) * (b ** (nb // d))
    assert loop_rho(loop) == r
    return loop


# the line part ----------------------------------------------------------------

def line_lift(fmap: PLMap, lo: int = -1, hi: int = 2) -> PLFunc:
    """Lift of ``F|R`` on ``[lo, hi]``; requires ``F(R)`` inside ``R``."""
    if not fmap.line_maps_into_line():
        raise ValueError("the line is not invariant")
    pts = []
    for k in range(lo, hi):
        for p in fmap.line_pieces:
            pts.append((p.u0 + k, p.v0 + k))
            pts.append((p.u1 + k, p.v1 + k))
    return PLFunc.from_points(pts)


def envelopes(fmap: PLMap) -> tuple[PLFunc, PLFunc]:
    """Lower and upper monotone envelopes ``(F_l, F_u)`` on ``[0, 1]``.

    ``F_u(x) = max F((-inf, x])`` and ``F_l(x) = min F([x, inf))``; for a
    degree-one lift both extrema are attained within one period.
    """
    lift = line_lift(fmap)
    upper = lift.running_max().restrict(0, 1)
    lower = lift.running_min_from_right().restrict(0, 1)
    return lower.simplified(), upper.simplified()


def _lift_eval(g: PLFunc, x: Fraction) -> Fraction:
    k = x.__floor__()
    return g(x - k) + k


def _extend(g: PLFunc, lo: int, hi: int) -> PLFunc:
    pts = []
    for k in range(lo, hi):
        pts.extend((x + k, y + k) for x, y in zip(g.xs, g.ys))
    return PLFunc.from_points(pts)


def _power(g: PLFunc, q: int) -> PLFunc:
    """``G^q`` on ``[0, 1]`` for a degree-one lift given on ``[0, 1]``."""
    h = g
    for _ in range(q - 1):
        lo, hi = h.min_on().__floor__(), h.max_on().__ceil__()
        h = _extend(g, lo, max(hi, lo + 1)).compose_after(h)
    return h


class _DyadicLift:
    """Outward-rounded evaluation of a monotone lift on the grid ``2^-bits``."""

    def __init__(self, g: PLFunc, bits: int = 64):
        self.scale = scale = 1 << bits
        self.cuts, self.coef = [], []
        for x0, x1, y0, y1 in g.pieces():
            s = (y1 - y0) / (x1 - x0)
            c = y0 - s * x0
            d = math.lcm(c.denominator, s.denominator)
            self.cuts.append(-((-x0 * scale).__floor__()) if x0 else 0)
            self.coef.append((int(c * scale * d), int(s * d), d))

    def step(self, x: int, up: bool) -> int:
        k, r = divmod(x, self.scale)
        a, b, d = self.coef[bisect_right(self.cuts, r) - 1]
        num = a + b * r
        y = -((-num) // d) if up else num // d
        return y + k * self.scale


@dataclass(frozen=True)
class MonotoneRho:
    """Enclosure ``[lo, hi]`` of the rotation number of a monotone lift."""

    lo: Fraction
    hi: Fraction
    method: str        # "periodic-orbit", "fixed-point" or "enclosure"
    steps: int = 0

    @property
    def exact(self) -> bool:
        return self.lo == self.hi


def _periodic_orbit(g: PLFunc, start: Fraction, limit: int, max_bits: int = 600) -> Optional[Fraction]:
    seen = {}
    x = start
    for n in range(limit):
        k = x.__floor__()
        frac = x - k
        if frac in seen:
            n0, x0 = seen[frac]
            return (x - x0) / (n - n0)
        seen[frac] = (n, x)
        if frac.denominator.bit_length() > max_bits:
            return None
        x = _lift_eval(g, x)
    return None


def _certify_rational(g: PLFunc, lo: Fraction, hi: Fraction, qmax: int) -> Optional[Fraction]:
    for q in range(1, qmax + 1):
        for p in range((lo * q).__ceil__(), (hi * q).__floor__() + 1):
            if math.gcd(p, q) != 1:
                continue
            if _power(g, q).shifted(-p).fixed_points():
                return Fraction(p, q)
    return None


def monotone_rho(g: PLFunc, tol: Fraction = Fraction(1, 10 ** 9), budget: int = 1 << 15,
                 qmax: int = 48, orbit_limit: int = 512) -> MonotoneRho:
    """Rotation number of a nondecreasing degree-one lift ``g`` given on ``[0, 1]``.

    Exact when a periodic orbit is found among the orbits of 0 and of the
    plateau levels, or when ``G^q - p`` has a fixed point for a small
    ``q``.  Otherwise the bound ``|G^n(0) - n rho| < 1`` applied to an
    outward-rounded orbit of 0 gives an enclosure after ``budget`` steps.
    """
    if not g.is_nondecreasing() or g.lo != 0 or g.hi != 1 or g.ys[-1] != g.ys[0] + 1:
        raise ValueError("not a nondecreasing degree-one lift on [0, 1]")
    starts = [Fraction(0)] + sorted({y0 for _, _, y0, y1 in g.pieces() if y0 == y1})
    for s in starts:
        rho = _periodic_orbit(g, s, orbit_limit)
        if rho is not None:
            return MonotoneRho(rho, rho, "periodic-orbit")
    dy = _DyadicLift(g)
    scale = dy.scale
    lo_x = hi_x = 0
    lo, hi = Fraction(-10 ** 9), Fraction(10 ** 9)
    checkpoint, n = 64, 0
    while n < budget:
        n += 1
        lo_x, hi_x = dy.step(lo_x, False), dy.step(hi_x, True)
        if n == checkpoint or n == budget:
            lo = max(lo, (Fraction(lo_x, scale) - 1) / n)
            hi = min(hi, (Fraction(hi_x, scale) + 1) / n)
            cand = _certify_rational(g, lo, hi, qmax) if hi - lo < Fraction(1, 2 * qmax) else None
            if cand is not None:
                return MonotoneRho(cand, cand, "fixed-point", n)
            if hi - lo <= tol:
                break
            checkpoint *= 2
    return MonotoneRho(lo, hi, "enclosure", n)


@dataclass(frozen=True)
class RotRInterval:
    """Rotation interval of the invariant skeleton.

    ``lower``/``upper`` enclose the two endpoints; ``rigor`` is
    ``"rigorous-enclosure"`` or ``"estimate"``.
    """

    lower: tuple
    upper: tuple
    rigor: str
    tol: Fraction
    methods: tuple = ()

    @property
    def lo(self) -> Fraction:
        return self.lower[0]

    @property
    def hi(self) -> Fraction:
        return self.upper[1]

    @property
    def exact(self) -> bool:
        return self.lower[0] == self.lower[1] and self.upper[0] == self.upper[1]

    @property
    def width(self) -> Fraction:
        return max(self.lower[1] - self.lower[0], self.upper[1] - self.upper[0])

    def to_json(self) -> dict:
        d = {"lo": format_rational(self.lo), "hi": format_rational(self.hi), "rigor": self.rigor}
        if not self.exact:
            d["lo_enclosure"] = [format_rational(x) for x in self.lower]
            d["hi_enclosure"] = [format_rational(x) for x in self.upper]
            d["width"] = format_rational(self.width)
        if self.methods:
            d["methods"] = list(self.methods)
        return d


def _sample_starts(fmap: PLMap, grid: int) -> list:
    pts = [LinePoint(Fraction(k, grid)) for k in range(grid)]
    shape = fmap.shape
    for i, s in enumerate(fmap.tr):
        for k in range(1, 9):
            if s > 0:
                pts.append(shape.branch_point(i, s * k / 8, 0))
    return pts


def rot_R_interval(fmap: PLMap, tol=Fraction(1, 10 ** 9), budget: int = 1 << 15,
                   grid: int = 64, steps: int = 10_000) -> RotRInterval:
    """``Rot_R``: exact enclosure when ``F(R)`` lies in ``R``, else a sampled estimate."""
    tol = Fraction(tol)
    if fmap.line_maps_into_line() and all(s == 0 for s in fmap.tr):
        lower, upper = envelopes(fmap)
        rl = monotone_rho(lower, tol, budget)
        ru = rl if upper == lower else monotone_rho(upper, tol, budget)
        return RotRInterval((rl.lo, rl.hi), (ru.lo, ru.hi), "rigorous-enclosure", tol,
                            (rl.method, ru.method))
    tables = kernels.float_tables(fmap)
    vals = [kernels.orbit_average(tables, p, steps) for p in _sample_starts(fmap, grid)]
    lo = Fraction(min(vals)).limit_denominator(10 ** 9)
    hi = Fraction(max(vals)).limit_denominator(10 ** 9)
    return RotRInterval((lo, lo), (hi, hi), "estimate", tol, ("sampling",))


# assembly -------------------------------------------------------------------

@dataclass
class IsolatedValue:
    rho: Fraction
    kind: str           # "J" or "I\\J"
    basis: int
    cycle: tuple
    start: int
    realized: bool

    def to_json(self, part: BasicPartition) -> dict:
        return {"rho": format_rational(self.rho), "kind": self.kind, "basis": self.basis,
                "cycle": [part[c].name for c in self.cycle], "M": self.start,
                "p": sum(part[c].p for c in self.cycle), "q": len(self.cycle),
                "realized": self.realized}


@dataclass
class RotationReport:
    rot_R: RotRInterval
    components: list
    isolated: list
    exceptional: list
    undetermined: list
    pieces: list
    rigor: str
    part: BasicPartition = field(repr=False, default=None)
    partition_digest: str = ""
    graph_digest: str = ""

    def to_json(self) -> dict:
        return {
            "rot_R": self.rot_R.to_json(),
            "components": [c.to_json() for c in self.components],
            "isolated": [v.to_json(self.part) for v in self.isolated],
            "exceptional_candidates": [format_rational(x) for x in self.exceptional],
            "undetermined": [
                {"basis": u.basis, "height": u.status.height,
                 "candidate_rho": None if u.rho is None else format_rational(u.rho)}
                for u in self.undetermined
            ],
            "rotation_set": [{"lo": format_rational(a), "hi": format_rational(b)}
                             for a, b in self.pieces],
            "rigor": self.rigor,
            "partition_digest": self.partition_digest,
            "graph_digest": self.graph_digest,
        }


def _merge(intervals) -> list:
    out: list = []
    for a, b in sorted(intervals):
        if out and a <= out[-1][1]:
            out[-1] = (out[-1][0], max(out[-1][1], b))
        else:
            out.append((a, b))
    return out


def _loop_realized(fmap: PLMap, g: CoveringGraph, loop: LoopSpec) -> bool:
    from .periodic_finder import PeriodicSearchError, periodic_from_loop, verify_witness

    try:
        w = periodic_from_loop(fmap, g, loop)
    except PeriodicSearchError:
        return False
    return verify_witness(fmap, w).ok


def _jtail_realized(fmap: PLMap, part: BasicPartition, ip: IPath) -> bool:
    from .periodic_finder import PeriodicSearchError, periodic_from_jtail, verify_witness

    try:
        w = periodic_from_jtail(fmap, part, ip)
    except PeriodicSearchError:
        return False
    return verify_witness(fmap, w).ok


def assemble(fmap: PLMap, part: BasicPartition, g: CoveringGraph, tol=Fraction(1, 10 ** 9),
             rot_r: Optional[RotRInterval] = None, realize: bool = True) -> RotationReport:
    """``Rot(F)`` as the union of ``Rot_R``, component intervals and isolated J values."""
    rot_r = rot_r if rot_r is not None else rot_R_interval(fmap, tol)
    scc = scc_decompose(g)
    comps = [component_interval(g, keys, n) for n, keys in enumerate(scc.components)]
    npart = len(part)
    if len(comps) > npart:
        raise AssertionError(f"{len(comps)} components for {npart} cells")
    exceptional = set()
    for ci in comps:
        for value, loop in ((ci.lo, ci.witness_lo), (ci.hi, ci.witness_hi)):
            if value not in exceptional and not (realize and _loop_realized(fmap, g, loop)):
                exceptional.add(value)
    isolated, undetermined = [], []
    ipaths = compute_I_and_J(g)
    if len(ipaths) > npart:
        raise AssertionError(f"{len(ipaths)} I-paths for {npart} cells")
    for ip in ipaths:
        if ip.classification == "undetermined":
            undetermined.append(ip)
            continue
        if ip.status.kind == "lasso":
            loop = LoopSpec.from_keys(g, ip.tail_keys + ip.tail_keys[:1])
            ok = realize and _loop_realized(fmap, g, loop)
        else:
            ok = realize and _jtail_realized(fmap, part, ip)
        if ip.classification == "I\\J" and not ok:
            continue  # rotation value not certified
        isolated.append(IsolatedValue(ip.rho, ip.classification, ip.basis, ip.cycle,
                                      ip.start, ok))
        if not ok:
            exceptional.add(ip.rho)
    if len(exceptional) > 2 * npart:
        raise AssertionError(f"{len(exceptional)} exceptional candidates for {npart} cells")
    intervals = [(rot_r.lo, rot_r.hi)] + [(c.lo, c.hi) for c in comps]
    intervals += [(v.rho, v.rho) for v in isolated]
    pieces = _merge(intervals)
    rigorous = (rot_r.rigor == "rigorous-enclosure" and g.rigor == "rigorous"
                and all(c.rigor == "rigorous" for c in comps) and not undetermined)
    return RotationReport(rot_r, comps, isolated, sorted(exceptional), undetermined, pieces,
                          "rigorous" if rigorous else "approximate", part,
                          part.digest(), g.digest())
