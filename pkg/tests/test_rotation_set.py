from fractions import Fraction as F
from types import SimpleNamespace

import pytest

from conftest import CIRCLE_MONOTONE, CIRCLE_NONMONOTONE, SUN_FIXTURES, fmap_of, pipeline
from sunrot.cover_graph import compute_I_and_J, scc_decompose
from sunrot.oracle import simulate
from sunrot.periodic_finder import periodic_from_jtail
from sunrot.plfunc import PLFunc
from sunrot.rotation_set import (LoopSpec, assemble, component_interval, envelopes, j_path_rho,
                                 line_lift, loop_rho, monotone_rho, rot_R_interval,
                                 synthesize_loop)

# (components, isolated values, pieces of Rot(F), rigor) at h_max = 64
EXPECTED = {
    "s1": ([(1, 1)], [], [(F(1, 3), F(1, 3)), (1, 1)], "rigorous"),
    "two_loops": ([(0, 1)], [], [(0, 1)], "rigorous"),
    "towers": ([(0, 2)], [], [(0, 2)], "rigorous"),
    "lasso_ij": ([(0, 1), (1, 1)], [1], [(0, 1)], "rigorous"),
    "lasso_j": ([], [1], [(F(1, 3), F(1, 3)), (1, 1)], "rigorous"),
    "plateau": ([], [1], [(F(1, 3), F(1, 3)), (1, 1)], "rigorous"),
    "jtail_q2": ([], [F(1, 2)] * 2, [(F(1, 3), F(1, 3)), (F(1, 2), F(1, 2))], "rigorous"),
    "lasso_p2": ([], [F(1, 2)] * 2, [(F(1, 3), F(1, 3)), (F(1, 2), F(1, 2))], "rigorous"),
    "into_line": ([], [], [(F(1, 3), F(1, 3))], "rigorous"),
    "capped": ([(0, F(64, 65))], [], [(0, F(64, 65))], "approximate"),
    "two_branch": ([(F(5, 2), F(5, 2))], [], [(F(7, 3), F(7, 3)), (F(5, 2), F(5, 2))], "rigorous"),
}


@pytest.mark.parametrize("name", sorted(EXPECTED))
def test_report_values(name):
    comps, iso, pieces, rigor = EXPECTED[name]
    rep = assemble(*pipeline(name))
    assert [(c.lo, c.hi) for c in rep.components] == comps
    assert [v.rho for v in rep.isolated] == iso
    assert rep.pieces == pieces
    assert rep.rigor == rigor
    assert rep.exceptional == []


def test_escaping_line_is_estimated():
    rep = assemble(*pipeline("escaping_line"))
    assert rep.rot_R.rigor == "estimate" and rep.rigor == "approximate"
    assert 0.42 < rep.rot_R.lo <= rep.rot_R.hi < 0.44
    assert [(c.lo, c.hi) for c in rep.components] == [(1, 1)]


def test_loop_rho_and_errors():
    _, _, g = pipeline("s1")
    loop = LoopSpec.from_keys(g, [(0,), (0,)])
    assert loop_rho(loop) == 1
    assert loop.L == 1 and loop.W == 1
    with pytest.raises(ValueError):
        loop_rho(LoopSpec(((0,),), ()))
    with pytest.raises(ValueError):
        LoopSpec.from_keys(pipeline("towers")[2], [(2,), (1,), (2,)])


def test_loop_algebra():
    _, _, g = pipeline("two_loops")
    a = LoopSpec.from_keys(g, [(0,), (0,)])
    b = LoopSpec.from_keys(g, [(0,), (1,), (0,)])
    ab = a ** 2 * b
    assert ab.keys == ((0,), (0,), (0,), (1,), (0,)) and ab.W == 1 and ab.L == 4
    assert b.rotated(1).keys == ((1,), (0,), (1,))
    with pytest.raises(ValueError):
        a * LoopSpec.from_keys(g, [(1,), (1,)])


def test_component_interval_s1():
    _, _, g = pipeline("s1")
    ci = component_interval(g, [(0,)])
    assert (ci.lo, ci.hi) == (1, 1) and ci.rigor == "rigorous"


def test_component_interval_two_loops():
    _, _, g = pipeline("two_loops")
    ci = component_interval(g, scc_decompose(g).components[0])
    assert (ci.lo, ci.hi) == (0, 1)
    assert loop_rho(ci.witness_lo) == 0 and loop_rho(ci.witness_hi) == 1


def test_synthesize_two_fifths():
    _, _, g = pipeline("two_loops")
    ci = component_interval(g, scc_decompose(g).components[0])
    loop = synthesize_loop(g, ci, F(2, 5))
    assert (loop.L, loop.W) == (5, 2)
    assert loop.keys == LoopSpec.from_keys(g, loop.keys).keys


def test_synthesize_boundaries_and_errors():
    _, _, g = pipeline("two_loops")
    ci = component_interval(g, scc_decompose(g).components[0])
    assert synthesize_loop(g, ci, 0) == ci.witness_lo
    assert synthesize_loop(g, ci, 1) == ci.witness_hi
    with pytest.raises(ValueError):
        synthesize_loop(g, ci, F(3, 2))
    _, _, g1 = pipeline("s1")
    assert synthesize_loop(g1, [(0,)], 1).keys == ((0,), (0,))


def test_j_path_rho():
    part = [SimpleNamespace(p=1), SimpleNamespace(p=2), SimpleNamespace(p=-1)]
    assert j_path_rho(part, [0]) == 1
    assert j_path_rho(part, [1, 2]) == F(1, 2)
    with pytest.raises(ValueError):
        j_path_rho(part, [])


def test_j_tail_rho_matches_oracle_orbit():
    fmap, part, g = pipeline("jtail_q2")
    for ip in compute_I_and_J(g):
        w = periodic_from_jtail(fmap, part, ip)
        rec = simulate(fmap, part, w.point, 40)
        assert rec.rho[-1] == ip.rho == j_path_rho(part, ip.cycle)


def test_rigid_rotation_is_exact():
    rot = rot_R_interval(fmap_of("s1"))
    assert (rot.lo, rot.hi) == (F(1, 3), F(1, 3)) and rot.exact
    assert rot.rigor == "rigorous-enclosure"


def test_flat_spot_at_one_half():
    rot = rot_R_interval(fmap_of("monotone_flat_half"))
    assert (rot.lo, rot.hi) == (F(1, 2), F(1, 2))


def test_two_slopes_certified():
    rot = rot_R_interval(fmap_of("monotone_two_slopes"))
    assert (rot.lo, rot.hi) == (F(1, 7), F(1, 7))


@pytest.mark.parametrize("name", CIRCLE_MONOTONE + CIRCLE_NONMONOTONE)
def test_envelope_ordering(name):
    fmap = fmap_of(name)
    lower, upper = envelopes(fmap)
    lift = line_lift(fmap).restrict(0, 1)
    for x in [F(k, 37) for k in range(38)]:
        assert lower(x) <= lift(x) <= upper(x)
    rot = rot_R_interval(fmap)
    assert rot.lower[0] <= rot.lower[1] <= rot.upper[1]
    assert rot.lower[0] <= rot.upper[0] <= rot.upper[1]


def test_nonmonotone_intervals():
    got = {n: (rot_R_interval(fmap_of(n)).lo, rot_R_interval(fmap_of(n)).hi)
           for n in ("nonmonotone_bump", "nonmonotone_tall_bump", "nonmonotone_zigzag",
                     "nonmonotone_double_bump", "nonmonotone_dip")}
    assert got == {"nonmonotone_bump": (0, 0), "nonmonotone_tall_bump": (0, 1),
                   "nonmonotone_zigzag": (0, F(1, 2)), "nonmonotone_double_bump": (0, F(1, 3)),
                   "nonmonotone_dip": (0, 0)}


def test_irrational_like_rotation_enclosure():
    rot = rot_R_interval(fmap_of("monotone_golden"))
    assert not rot.exact and rot.width < F(1, 10 ** 4)
    assert rot.lo <= F(61803, 100000) <= rot.hi


def test_monotone_rho_rejects_non_lifts():
    with pytest.raises(ValueError):
        monotone_rho(PLFunc([0, F(1, 2), 1], [0, F(3, 2), 1]))
    with pytest.raises(ValueError):
        monotone_rho(PLFunc([0, 1], [0, 2]))


def test_report_json_shape():
    doc = assemble(*pipeline("s1")).to_json()
    assert set(doc) == {"rot_R", "components", "isolated", "exceptional_candidates",
                        "undetermined", "rotation_set", "rigor", "partition_digest",
                        "graph_digest"}
    assert doc["rotation_set"] == [{"lo": "1/3", "hi": "1/3"}, {"lo": "1", "hi": "1"}]


@pytest.mark.parametrize("name", SUN_FIXTURES)
def test_finiteness_bounds(name):
    fmap, part, g = pipeline(name)
    rep = assemble(fmap, part, g)
    assert len(rep.components) <= len(part)
    assert len(compute_I_and_J(g)) <= len(part)
    assert len(rep.exceptional) <= 2 * len(part)
