import functools
from pathlib import Path

import pytest

from sunrot.cover_graph import build_graph
from sunrot.partition import build_partition
from sunrot.pl_map import load_map

ROOT = Path(__file__).resolve().parents[1]
FIXTURES = ROOT / "fixtures"

SUN_FIXTURES = ["s1", "two_loops", "towers", "lasso_ij", "lasso_j", "plateau", "jtail_q2",
                "lasso_p2", "into_line", "capped", "two_branch", "escaping_line"]
CIRCLE_MONOTONE = sorted(p.stem for p in (FIXTURES / "circle").glob("monotone_*.json"))
CIRCLE_NONMONOTONE = sorted(p.stem for p in (FIXTURES / "circle").glob("nonmonotone_*.json"))

# outcome line per acceptance criterion, printed in the terminal summary
ACCEPTANCE = {}


def fixture_path(name: str) -> Path:
    if name.startswith(("monotone_", "nonmonotone_")):
        return FIXTURES / "circle" / f"{name}.json"
    return FIXTURES / f"{name}.json"


@functools.lru_cache(maxsize=None)
def fmap_of(name: str):
    return load_map(fixture_path(name))


@functools.lru_cache(maxsize=None)
def pipeline(name: str, h_max: int = 64):
    fmap = fmap_of(name)
    part = build_partition(fmap)
    return fmap, part, build_graph(part, fmap, h_max)


@pytest.fixture
def s1():
    return pipeline("s1")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[k])
