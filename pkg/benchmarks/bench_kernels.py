"""Compiled vs pure-Python kernels.

    python benchmarks/bench_kernels.py [--repeat N]

Times the float orbit average on every committed sun-graph fixture and
Karp's minimum cycle mean on random strongly connected graphs, checks that
both backends agree, and prints one line per case.
"""
import argparse
import random
import time
from fractions import Fraction
from pathlib import Path

from sunrot import kernels
from sunrot.core_space import LinePoint
from sunrot.pl_map import load_map

ROOT = Path(__file__).resolve().parents[1]


def best_of(fn, repeat):
    best, out = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def random_scc(n, extra, rng):
    arcs = [(i, (i + 1) % n, rng.randint(-5, 5)) for i in range(n)]
    arcs += [(rng.randrange(n), rng.randrange(n), rng.randint(-5, 5)) for _ in range(extra)]
    return arcs


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--steps", type=int, default=200_000)
    args = ap.parse_args()
    if kernels.BACKEND != "compiled":
        print("compiled kernels not available; only the pure-Python backend is timed")
    backends = ["python"] + (["compiled"] if kernels.BACKEND == "compiled" else [])

    print(f"{'case':<34}{'python [s]':>12}{'compiled [s]':>14}{'speedup':>9}")
    for path in sorted((ROOT / "fixtures").glob("*.json")):
        fmap = load_map(path)
        if not fmap.validate().ok:
            continue
        tables = kernels.float_tables(fmap)
        x = LinePoint(Fraction(1, 7))
        res = {b: best_of(lambda b=b: kernels.orbit_average(tables, x, args.steps, b), args.repeat)
               for b in backends}
        report(f"orbit {path.stem}", res)

    rng = random.Random(1)
    for n in (16, 64, 256):
        arcs = random_scc(n, 3 * n, rng)
        res = {b: best_of(lambda b=b: kernels.min_cycle_mean(n, arcs, b), args.repeat) for b in backends}
        report(f"karp n={n}", res)


def report(name, res):
    tp, vp = res["python"]
    if "compiled" in res:
        tc, vc = res["compiled"]
        assert vp == vc, f"{name}: backends disagree ({vp} vs {vc})"
        print(f"{name:<34}{tp:>12.4f}{tc:>14.4f}{tp / tc:>8.1f}x")
    else:
        print(f"{name:<34}{tp:>12.4f}{'-':>14}{'-':>9}")


if __name__ == "__main__":
    main()
