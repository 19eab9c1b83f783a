from fractions import Fraction as F

import pytest

from conftest import SUN_FIXTURES, pipeline
from sunrot.core_space import TSegment
from sunrot.cover_graph import (CoveringGraph, CovArrow, CovVertex, build_graph, compute_I_and_J,
                                expand_vertex, scc_decompose, strongly_connected_components)
from sunrot.partition import build_partition


def test_s1_graph():
    _, part, g = pipeline("s1")
    assert list(g.vertices) == [(0,)]
    assert [(a.src, a.dst, a.weight) for a in g.arrows] == [((0,), (0,), 1)]
    assert g.towers[0].kind == "terminated" and g.towers[0].height == 0
    assert g.rigor == "rigorous"
    assert compute_I_and_J(g) == []
    assert scc_decompose(g).components == [[(0,)]]


def test_s1_expand_basis():
    fmap, part, _ = pipeline("s1")
    assert expand_vertex(fmap, part, 0, F(3, 4)) == ([0], None)


def test_partial_cover_creates_tower_vertex():
    fmap, part, g = pipeline("towers")
    # the middle cell reaches 5/8, strictly inside the third cell
    full, partial = expand_vertex(fmap, part, 1, part[1].b)
    assert full == [0, 1] and partial == (2, F(5, 8))
    assert g.vertices[(1, 2)] == CovVertex((1, 2), part[2].a, F(5, 8))
    assert g.towers[1].kind == "terminated" and g.towers[1].height == 1


def test_dead_end_vertex():
    fmap, part, _ = pipeline("s1")
    # [1/4, 1/4 + 1/32] maps into the line and the first 1/8 of the branch
    assert expand_vertex(fmap, part, 0, F(1, 4) + F(1, 32)) == ([], None)


def test_empty_partition_gives_empty_graph():
    _, part, g = pipeline("into_line")
    assert not g.vertices and not g.arrows
    assert scc_decompose(g).components == [] and compute_I_and_J(g) == []


def test_lasso_of_period_two():
    _, part, g = pipeline("lasso_p2")
    for cid in (0, 1):
        st = g.towers[cid]
        assert (st.kind, st.prefix, st.period) == ("lasso", 1, 2)
        chain = g.tower_keys[cid]
        # the state (host cell, top) at height 3 repeats the one at height 1
        fold = [a for a in g.out[chain[-1]] if a.fold]
        assert len(fold) == 1 and fold[0].dst == chain[1]
        assert g.vertices[chain[1]].hi == g.vertices[chain[-1]].hi == F(1, 2)
    assert g.rigor == "rigorous"
    paths = compute_I_and_J(g)
    assert [(p.classification, p.rho, len(p.cycle)) for p in paths] == [("J", F(1, 2), 2)] * 2


def test_jtail_label_cycle():
    _, part, g = pipeline("jtail_q2")
    paths = compute_I_and_J(g)
    assert len(paths) == 2
    for p in paths:
        assert p.classification == "J" and p.status.kind == "jtail"
        assert len(p.cycle) == 2 and p.rho == F(1, 2)


def test_lasso_emitting_basis_arrows():
    _, part, g = pipeline("lasso_ij")
    kinds = {p.basis: p.classification for p in compute_I_and_J(g)}
    assert kinds == {0: "I\\J"}


def test_capped_tower_is_undetermined():
    _, part, g = pipeline("capped", 16)
    assert g.rigor == "approximate"
    paths = compute_I_and_J(g)
    assert paths and all(p.classification == "undetermined" for p in paths)


def test_no_component_without_cycle():
    part = build_partition(pipeline("two_loops")[0])
    g = CoveringGraph(part, None, 1)
    for cid in (0, 1):
        g.vertices[(cid,)] = CovVertex((cid,), part[cid].a, part[cid].b)
    arrow = CovArrow((0,), (1,), 0)
    g.arrows.append(arrow)
    g.out[(0,)] = [arrow]
    assert scc_decompose(g).components == []


def test_tarjan():
    succ = {1: [2], 2: [3], 3: [1, 4], 4: [5], 5: [4], 6: []}
    comps = strongly_connected_components(sorted(succ), succ.__getitem__)
    assert sorted(sorted(c) for c in comps) == [[1, 2, 3], [4, 5], [6]]
    # reverse topological order: the sink component comes first
    assert sorted(comps[0]) == [4, 5] or sorted(comps[0]) == [6]


def test_tarjan_deep_chain_is_iterative():
    n = 20000
    comps = strongly_connected_components(range(n), lambda v: [(v + 1) % n])
    assert len(comps) == 1 and len(comps[0]) == n


@pytest.mark.parametrize("name", SUN_FIXTURES)
def test_arrows_are_positive_coverings(name):
    """Every arrow a -> b: F(min <a>) lies in T_R and max <b> + p lies in F(<a>)."""
    fmap, part, g = pipeline(name)
    shape = fmap.shape
    for a in g.arrows:
        src, dst = g.vertices[a.src], g.vertices[a.dst]
        cell = part[src.host]
        assert part[dst.host].branch == cell.ell and a.weight == cell.p
        assert fmap.in_T_R(fmap.eval(shape.branch_point(cell.branch, src.lo, 0)))
        seg = TSegment(cell.branch, 0, src.lo, src.hi)
        target = shape.branch_point(cell.ell, dst.hi, cell.p)
        assert fmap.preimage_in_segment(seg, target).values


def test_h_max_validation():
    fmap, part, _ = pipeline("s1")
    with pytest.raises(ValueError):
        build_graph(part, fmap, 0)


def test_digest_and_dot_are_stable():
    fmap, part, g = pipeline("towers")
    again = build_graph(build_partition(fmap), fmap, 64)
    assert g.digest() == again.digest()
    dot = g.to_dot()
    assert dot.startswith("digraph") and dot.count("->") == len(g.arrows)
