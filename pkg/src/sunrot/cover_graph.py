"""Covering graph of the basic partition.

Vertices are keyed by their significant part, a tuple of cell ids
``(A_0, ..., A_n)``; the height is ``n`` and the host cell is ``A_n``.  The
interval of a vertex is ``[min A_n, c]`` inside its host cell.

Above every basis vertex there is at most one chain of positive-height
vertices (its *tower*).  Towers are followed until they terminate, until
the exact state ``(host cell, c)`` repeats (a lasso, folded back onto the
earlier vertex by an arrow marked ``fold``), or until ``h_max``.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .core_space import format_rational
from .partition import BasicPartition, Cell
from .pl_map import PLMap
from .plfunc import PLFunc

__all__ = [
    "CovVertex",
    "CovArrow",
    "TowerStatus",
    "CoveringGraph",
    "IPath",
    "expand_vertex",
    "build_graph",
    "scc_decompose",
    "compute_I_and_J",
    "strongly_connected_components",
]

Key = tuple


@dataclass(frozen=True)
class CovVertex:
    key: Key
    lo: Fraction
    hi: Fraction

    @property
    def height(self) -> int:
        return len(self.key) - 1

    @property
    def host(self) -> int:
        return self.key[-1]

    @property
    def is_basis(self) -> bool:
        return len(self.key) == 1

    def label(self, part: BasicPartition) -> str:
        word = "".join(part[c].name for c in self.key)
        return f"{word} [{format_rational(self.lo)},{format_rational(self.hi)}] H={self.height}"


@dataclass(frozen=True)
class CovArrow:
    src: Key
    dst: Key
    weight: int
    fold: bool = False


@dataclass(frozen=True)
class TowerStatus:
    """How the tower above one basis vertex ended.

    ``kind`` is ``"terminated"`` (``height`` = top height), ``"lasso"``
    (the vertex at height ``prefix + period`` repeats the one at ``prefix``),
    ``"jtail"`` (certified to continue forever without basis arrows from
    height ``prefix`` on, label period ``period``) or ``"capped"``.
    """

    kind: str
    height: int
    prefix: int = 0
    period: int = 0

    def to_json(self) -> dict:
        d = {"kind": self.kind, "height": self.height}
        if self.kind in ("lasso", "jtail"):
            d.update(prefix=self.prefix, period=self.period)
        return d


@dataclass
class IPath:
    """A tower that never returns to the basis.

    ``classification`` is ``"J"`` (eventually no basis arrows; rotation
    number ``rho`` certified), ``"I\\J"`` (keeps emitting basis arrows; a
    rotation number is attached only for lassos) or ``"undetermined"``.
    """

    basis: int
    classification: str
    status: TowerStatus
    cycle: tuple = ()
    start: int = 0
    rho: Optional[Fraction] = None
    rigorous: bool = False
    tail_keys: tuple = ()


@dataclass
class CoveringGraph:
    part: BasicPartition
    fmap: PLMap
    h_max: int
    vertices: dict = field(default_factory=dict)
    arrows: list = field(default_factory=list)
    out: dict = field(default_factory=dict)
    towers: dict = field(default_factory=dict)
    tower_keys: dict = field(default_factory=dict)

    @property
    def rigor(self) -> str:
        capped = any(t.kind == "capped" for t in self.towers.values())
        return "approximate" if capped else "rigorous"

    @property
    def basis(self) -> list:
        return [(c.id,) for c in self.part]

    def successors(self, key: Key) -> list:
        return [a.dst for a in self.out.get(key, [])]

    def weight_of(self, key: Key) -> int:
        return self.part[key[-1]].p

    def interval(self, key: Key) -> tuple[Fraction, Fraction]:
        v = self.vertices[key]
        return v.lo, v.hi

    def to_json(self) -> dict:
        return {
            "vertices": [
                {"key": list(v.key), "host": v.host, "lo": format_rational(v.lo),
                 "hi": format_rational(v.hi), "height": v.height}
                for v in sorted(self.vertices.values(), key=lambda v: v.key)
            ],
            "arrows": [
                {"from": list(a.src), "to": list(a.dst), "w": a.weight, **({"fold": True} if a.fold else {})}
                for a in self.arrows
            ],
            "towers": {str(k): t.to_json() for k, t in sorted(self.towers.items())},
            "rigor": self.rigor,
        }

    def digest(self) -> str:
        blob = json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def to_dot(self) -> str:
        lines = ["digraph covering {", "  rankdir=TB;"]
        names = {}
        for n, v in enumerate(sorted(self.vertices.values(), key=lambda v: v.key)):
            names[v.key] = f"v{n}"
            shape = "box" if v.is_basis else "ellipse"
            lines.append(f'  v{n} [label="{v.label(self.part)}", shape={shape}];')
        for a in self.arrows:
            style = ", style=dashed" if a.fold else ""
            lines.append(f'  {names[a.src]} -> {names[a.dst]} [label="w={a.weight}"{style}];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def cell_image_top(fmap: PLMap, cell: Cell, c: Fraction) -> Fraction:
    """Largest coordinate in ``X^ell`` reached by ``F([min cell, c]) - p``."""
    phi = fmap.transfer(cell.branch, cell.ell, cell.p)
    return phi.max_on(cell.a, c)


def expand_vertex(fmap: PLMap, part: BasicPartition, host: int, c: Fraction):
    """Successors of the vertex with host cell ``host`` and interval ``[min host, c]``.

    Returns ``(full, partial)``: ids of cells covered entirely (arrows to
    the basis) and either ``None`` or ``(cell id, c')`` for the one cell
    that is covered only on ``[min, c']`` with ``c'`` below its maximum.
    """
    cell = part[host]
    d = cell_image_top(fmap, cell, c)
    full, partial = [], None
    for target in part.by_branch[cell.ell]:
        if target.b <= d:
            full.append(target.id)
        elif target.a <= d:
            partial = (target.id, d)
            break
        else:
            break
    return full, partial


def _add_arrow(g: CoveringGraph, src: Key, dst: Key, fold: bool = False) -> None:
    arrow = CovArrow(src, dst, g.weight_of(src), fold)
    g.arrows.append(arrow)
    g.out.setdefault(src, []).append(arrow)


def build_graph(part: BasicPartition, fmap: PLMap, h_max: int = 512) -> CoveringGraph:
    if h_max < 1:
        raise ValueError("h_max must be at least 1")
    g = CoveringGraph(part, fmap, h_max)
    for cell in part:
        g.vertices[(cell.id,)] = CovVertex((cell.id,), cell.a, cell.b)
    for cell in part:
        key: Key = (cell.id,)
        seen = {}
        chain = [key]
        c = cell.b
        status = None
        while True:
            full, partial = expand_vertex(fmap, part, key[-1], c)
            for t in full:
                _add_arrow(g, key, (t,))
            if partial is None:
                status = TowerStatus("terminated", len(key) - 1)
                break
            state = partial
            if state in seen:
                h1 = seen[state]
                _add_arrow(g, key, chain[h1], fold=True)
                status = TowerStatus("lasso", len(key), prefix=h1, period=len(key) - h1)
                break
            if len(key) > h_max:
                status = TowerStatus("capped", len(key) - 1)
                break
            new = key + (partial[0],)
            g.vertices[new] = CovVertex(new, part[partial[0]].a, partial[1])
            _add_arrow(g, key, new)
            seen[state] = len(new) - 1
            chain.append(new)
            key, c = new, partial[1]
        if status.kind == "capped":
            certified = _certify_jtail(fmap, part, g, chain)
            if certified is not None:
                status = certified
        g.towers[cell.id] = status
        g.tower_keys[cell.id] = tuple(chain)
    return g


# J-tail certification -------------------------------------------------------

def _first_cell(part: BasicPartition, branch: int) -> Optional[Cell]:
    cells = part.by_branch[branch]
    return cells[0] if cells else None


def _tail_start(g: CoveringGraph, chain: list) -> Optional[int]:
    """Smallest height from which no tower vertex emits a basis arrow."""
    m = len(chain)
    while m > 0:
        key = chain[m - 1]
        if any(a.dst != key and len(a.dst) == 1 for a in g.out.get(key, [])):
            break
        m -= 1
    return m if m < len(chain) else None


def _label_cycle(part: BasicPartition, start: int) -> list:
    """Cycle of cells reached from ``start`` by ``A -> first cell of branch ell(A)``."""
    seq, pos = [], {}
    cur = part[start]
    while cur is not None and cur.id not in pos:
        pos[cur.id] = len(seq)
        seq.append(cur.id)
        cur = _first_cell(part, cur.ell)
    if cur is None:
        return []
    return seq[pos[cur.id]:]


def _cell_top_map(fmap: PLMap, cell: Cell) -> PLFunc:
    phi = fmap.transfer(cell.branch, cell.ell, cell.p).restrict(cell.a, cell.b)
    return phi.running_max()


def _step_ok(top: PLFunc, nxt: Cell, c: Fraction) -> Optional[Fraction]:
    d = top(c)
    if nxt.a <= d < nxt.b:
        return d
    return None


def _valid_orbit_point(maps, c: Fraction) -> bool:
    for top, nxt in maps:
        if not (top.lo <= c <= top.hi):
            return False
        c = _step_ok(top, nxt, c)
        if c is None:
            return False
    return True


def _clamped_composite(maps) -> PLFunc:
    comp = None
    for top, nxt in maps:
        pts = list(zip(top.xs, top.ys)) + _crossings(top, nxt.a) + _crossings(top, nxt.b)
        f = PLFunc.from_points(sorted((x, min(max(y, nxt.a), nxt.b)) for x, y in pts))
        comp = f if comp is None else f.compose_after(comp)
    return comp


def _crossings(f: PLFunc, level: Fraction) -> list:
    pts = []
    for x0, x1, y0, y1 in f.pieces():
        if (y0 - level) * (y1 - level) < 0:
            x = x0 + (level - y0) * (x1 - x0) / (y1 - y0)
            pts.append((x, level))
    return pts


def _certify_jtail(fmap: PLMap, part: BasicPartition, g: CoveringGraph, chain: list):
    start = _tail_start(g, chain)
    if start is None:
        return None
    cycle = _label_cycle(part, chain[start][-1])
    if not cycle:
        return None
    # first height >= start whose host is the first cell of the cycle
    m = next((h for h in range(start, len(chain)) if chain[h][-1] == cycle[0]), None)
    if m is None:
        return None
    labels = [k[-1] for k in chain[m:]]
    if any(labels[n] != cycle[n % len(cycle)] for n in range(len(labels))):
        return None
    maps = _period_map_pairs(fmap, part, cycle)
    c = g.vertices[chain[m]].hi
    comp = _clamped_composite(maps)
    if not (comp.lo <= c <= comp.hi):
        return None
    image = comp(c)
    fixed = comp.fixed_points()
    if image == c:
        lo = hi = c
    elif image < c:
        below = [fp for fp in fixed if fp[0] <= c]
        if not below:
            return None
        lo, hi = min(below[-1][1], c), c
    else:
        above = [fp for fp in fixed if fp[1] >= c]
        if not above:
            return None
        lo, hi = c, max(above[0][0], c)
    if not (_valid_orbit_point(maps, lo) and _valid_orbit_point(maps, hi)):
        return None
    return TowerStatus("jtail", len(chain) - 1, prefix=m, period=len(cycle))


def _period_map_pairs(fmap: PLMap, part: BasicPartition, cycle: list) -> list:
    out = []
    for r, cid in enumerate(cycle):
        nxt = part[cycle[(r + 1) % len(cycle)]]
        out.append((_cell_top_map(fmap, part[cid]), nxt))
    return out


# strongly connected components ----------------------------------------------

def strongly_connected_components(nodes, succ) -> list[list]:
    """Tarjan's algorithm, iterative; components in reverse topological order."""
    index, low, on_stack = {}, {}, set()
    stack, comps = [], []
    counter = 0
    for root in nodes:
        if root in index:
            continue
        work = [(root, iter(succ(root)))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(succ(w))))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                comps.append(comp)
    return comps


@dataclass
class SCCResult:
    component_of: dict          # vertex key -> component id (only vertices on cycles)
    components: list            # list of sorted key lists; each meets the basis
    tail_cycles: list           # cyclic SCCs without a basis vertex (lasso tails)


def scc_decompose(g: CoveringGraph) -> SCCResult:
    nodes = sorted(g.vertices)
    comps = strongly_connected_components(nodes, g.successors)
    cyclic = []
    for comp in comps:
        if len(comp) > 1 or comp[0] in g.successors(comp[0]):
            cyclic.append(sorted(comp))
    cyclic.sort()
    components = [c for c in cyclic if any(len(k) == 1 for k in c)]
    tails = [c for c in cyclic if all(len(k) > 1 for k in c)]
    component_of = {}
    for n, comp in enumerate(components):
        for k in comp:
            component_of[k] = n
    return SCCResult(component_of, components, tails)


def compute_I_and_J(g: CoveringGraph) -> list[IPath]:
    part = g.part
    out = []
    for cid in sorted(g.towers):
        st = g.towers[cid]
        chain = g.tower_keys[cid]
        if st.kind == "terminated":
            continue
        if st.kind == "lasso":
            tail = chain[st.prefix:]
            cycle = tuple(k[-1] for k in tail)
            emits = any(len(a.dst) == 1 for k in tail for a in g.out.get(k, []))
            rho = Fraction(sum(part[c].p for c in cycle), len(cycle))
            out.append(IPath(cid, "I\\J" if emits else "J", st, cycle, st.prefix, rho,
                             rigorous=True, tail_keys=tuple(tail)))
        elif st.kind == "jtail":
            tail = chain[st.prefix:st.prefix + st.period]
            cycle = tuple(k[-1] for k in tail)
            rho = Fraction(sum(part[c].p for c in cycle), len(cycle))
            out.append(IPath(cid, "J", st, cycle, st.prefix, rho, rigorous=True,
                             tail_keys=tuple(tail)))
        else:
            start = _tail_start(g, list(chain))
            cycle, rho = (), None
            if start is not None:
                cyc = _label_cycle(part, chain[start][-1])
                if cyc:
                    cycle = tuple(cyc)
                    rho = Fraction(sum(part[c].p for c in cyc), len(cyc))
            out.append(IPath(cid, "undetermined", st, cycle, start or 0, rho, rigorous=False))
    return out
