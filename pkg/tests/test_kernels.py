import random
from fractions import Fraction as F
from itertools import permutations

import pytest

from conftest import SUN_FIXTURES, fmap_of
from sunrot import kernels
from sunrot.core_space import LinePoint

BACKENDS = ["python"] + (["compiled"] if kernels.BACKEND == "compiled" else [])


def brute_min_mean(n, arcs):
    """Minimum over simple cycles by trying every vertex sequence."""
    w = {}
    for s, d, x in arcs:
        w[(s, d)] = min(w.get((s, d), x), x)
    best = None
    for k in range(1, n + 1):
        for seq in permutations(range(n), k):
            if seq[0] != min(seq):
                continue
            edges = list(zip(seq, seq[1:] + seq[:1]))
            if all(e in w for e in edges):
                m = F(sum(w[e] for e in edges), k)
                best = m if best is None or m < best else best
    return best


@pytest.mark.parametrize("backend", BACKENDS)
def test_karp_matches_brute_force(backend):
    rng = random.Random(3)
    for _ in range(150):
        n = rng.randint(1, 6)
        arcs = [(rng.randrange(n), rng.randrange(n), rng.randint(-7, 7))
                for _ in range(rng.randint(0, 12))]
        assert kernels.min_cycle_mean(n, arcs, backend) == brute_min_mean(n, arcs)


def test_karp_acyclic_is_none():
    assert kernels.min_cycle_mean(3, [(0, 1, 1), (1, 2, 1)]) is None


@pytest.mark.skipif(kernels.BACKEND != "compiled", reason="compiled extension not built")
def test_backends_agree_on_large_graphs():
    rng = random.Random(9)
    for n in (40, 120):
        arcs = [(k, (k + 1) % n, rng.randint(-9, 9)) for k in range(n)]
        arcs += [(rng.randrange(n), rng.randrange(n), rng.randint(-9, 9)) for _ in range(3 * n)]
        assert kernels.min_cycle_mean(n, arcs, "python") == kernels.min_cycle_mean(n, arcs, "compiled")


@pytest.mark.skipif(kernels.BACKEND != "compiled", reason="compiled extension not built")
@pytest.mark.parametrize("name", SUN_FIXTURES)
def test_orbit_kernels_agree(name):
    tables = kernels.float_tables(fmap_of(name))
    for x in (LinePoint(F(1, 7)), LinePoint(F(5, 9))):
        a = kernels.orbit_average(tables, x, 2000, "python")
        b = kernels.orbit_average(tables, x, 2000, "compiled")
        assert a == pytest.approx(b, abs=1e-9)


def test_orbit_average_rigid():
    tables = kernels.float_tables(fmap_of("monotone_rigid_2_5"))
    assert kernels.orbit_average(tables, LinePoint(F(0)), 1000) == pytest.approx(0.4, abs=1e-9)


def test_unknown_backend():
    with pytest.raises(ValueError):
        kernels.min_cycle_mean(1, [(0, 0, 1)], "fortran")
