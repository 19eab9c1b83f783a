"""Basic partition of the branches of a sun-like PL map.

Each residual branch ``X^i = [s_i, len_i]`` is cut into disjoint closed
cells ``X^i_1 < X^i_2 < ...``.  A cell maps into one translated branch
``X^ell + p`` together with the interior of the invariant skeleton, and its
minimum maps exactly onto ``min X^ell + p``.  Points of ``X`` outside every
cell map out of ``X + Z``.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .core_space import BranchPoint, Point, TSegment, format_rational
from .pl_map import LINE, PLMap

__all__ = [
    "Cell",
    "BasicPartition",
    "build_partition",
    "classify_point",
    "DUSTBIN",
    "hit_sets",
    "image_violation",
]

DUSTBIN = "dustbin"


@dataclass(frozen=True)
class Cell:
    id: int
    branch: int
    j: int  # 1-based position inside its branch
    a: Fraction
    b: Fraction
    ell: int
    p: int

    @property
    def segment(self) -> TSegment:
        return TSegment(self.branch, 0, self.a, self.b)

    @property
    def name(self) -> str:
        return f"X{self.branch}_{self.j}"

    def to_json(self) -> dict:
        return {"branch": self.branch, "a": format_rational(self.a), "b": format_rational(self.b),
                "ell": self.ell, "p": self.p}


@dataclass(frozen=True)
class BasicPartition:
    cells: tuple[Cell, ...]
    by_branch: tuple[tuple[Cell, ...], ...]

    def __len__(self) -> int:
        return len(self.cells)

    def __iter__(self):
        return iter(self.cells)

    def __getitem__(self, cid: int) -> Cell:
        return self.cells[cid]

    def to_json(self) -> list:
        return [c.to_json() for c in self.cells]

    def digest(self) -> str:
        blob = json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


def hit_sets(fmap: PLMap, i: int) -> list[tuple[Fraction, Fraction, tuple[int, int]]]:
    """Closed pieces of ``X^i`` whose image lies in some ``X^ell + p``.

    Returns ``(lo, hi, (ell, p))`` triples sorted by ``lo``.  Adjacent
    triples with the same label are not merged here.
    """
    shape = fmap.shape
    s_i = fmap.tr[i]
    out = []
    for piece in fmap.branch_pieces[i]:
        a, b = max(piece.u0, s_i), piece.u1
        if a > b:
            continue
        va, vb = piece.value(a), piece.value(b)
        vlo, vhi = min(va, vb), max(va, vb)
        if piece.chart == LINE:
            for ell in fmap.residual_branches:
                if fmap.tr[ell] != 0:
                    continue
                att = shape.attach(ell)
                for p in range((vlo - att).__ceil__(), (vhi - att).__floor__() + 1):
                    target = att + p
                    if va == vb:
                        out.append((a, b, (ell, p)))
                    else:
                        u = a + (target - va) * (b - a) / (vb - va)
                        out.append((u, u, (ell, p)))
        else:
            _, j, m = piece.chart
            if not fmap.is_residual(j):
                continue
            s_j = fmap.tr[j]
            if vhi < s_j:
                continue
            if va >= s_j and vb >= s_j:
                out.append((a, b, (j, m)))
            else:
                u = a + (s_j - va) * (b - a) / (vb - va)
                out.append((u, b, (j, m)) if vb > va else (a, u, (j, m)))
    out.sort(key=lambda h: (h[0], h[1]))
    return out


def build_partition(fmap: PLMap) -> BasicPartition:
    cells: list[Cell] = []
    per_branch = []
    for i in range(len(fmap.shape)):
        mine: list[Cell] = []
        if fmap.is_residual(i):
            runs: list[list] = []
            for lo, hi, label in hit_sets(fmap, i):
                if runs and runs[-1][2] == label:
                    runs[-1][1] = max(runs[-1][1], hi)
                else:
                    if runs and lo <= runs[-1][1]:
                        raise AssertionError(
                            f"branch {i}: images in two translated branches touch at {lo}")
                    runs.append([lo, hi, label])
            for j, (lo, hi, (ell, p)) in enumerate(runs, start=1):
                cell = Cell(len(cells), i, j, lo, hi, ell, p)
                cells.append(cell)
                mine.append(cell)
        per_branch.append(tuple(mine))
    part = BasicPartition(tuple(cells), tuple(per_branch))
    for c in part.cells:
        img = fmap.eval(fmap.shape.branch_point(c.branch, c.a, 0))
        expect = fmap.shape.branch_point(c.ell, fmap.tr[c.ell], c.p)
        if img != expect:
            raise AssertionError(f"cell {c.name}: F(min) = {img!r}, expected {expect!r}")
    return part


def _local_coord(fmap: PLMap, pt: Point) -> Optional[tuple[int, Fraction]]:
    hit = fmap.in_X_plus_Z(pt)
    if hit is None:
        return None
    i, _ = hit
    t = pt.t if isinstance(pt, BranchPoint) else Fraction(0)
    return i, t


def classify_point(part: BasicPartition, fmap: PLMap, pt: Point) -> Union[int, str]:
    """Id of the cell containing ``pt`` (reduced mod 1 into ``X``), else ``"dustbin"``."""
    loc = _local_coord(fmap, pt)
    if loc is None:
        raise ValueError(f"{pt!r} does not lie in X + Z")
    i, t = loc
    for c in part.by_branch[i]:
        if c.a <= t <= c.b:
            return c.id
    return DUSTBIN


def image_violation(fmap: PLMap, seg: TSegment, ell: int, p: int) -> Optional[Fraction]:
    """Witness coordinate of ``F(seg)`` outside ``(X^ell + p) u Int T_R``, or ``None``."""
    shape = fmap.shape
    for img in fmap.image_segment(seg):
        if img.on_line:
            for j in fmap.residual_branches:
                if fmap.tr[j] != 0:
                    continue
                att = shape.attach(j)
                for m in range((img.lo - att).__ceil__(), (img.hi - att).__floor__() + 1):
                    if (j, m) != (ell, p):
                        return att + m
        elif fmap.is_residual(img.branch) and (img.branch, img.m) != (ell, p):
            if img.hi >= fmap.tr[img.branch]:
                return img.hi
    return None


def point_of_cell(fmap: PLMap, cell: Cell, t) -> Point:
    return fmap.shape.branch_point(cell.branch, t, 0)


def min_point(fmap: PLMap, ell: int, p: int) -> Point:
    return fmap.shape.branch_point(ell, fmap.tr[ell], p)

