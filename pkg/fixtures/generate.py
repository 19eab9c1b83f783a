"""Regenerate the committed fixture maps (``python fixtures/generate.py``).

Points are written as ``R x`` (line) or ``B i t m`` (branch ``i`` at
distance ``t`` from its attachment, translated by ``m``).
"""
import json
from pathlib import Path

HERE = Path(__file__).resolve().parent


def R(x):
    return {"R": str(x)}


def B(i, t, m):
    return {"B": [i, str(t), m]}


def sun(branches, line, branch_maps, tr=None):
    return {
        "branches": [{"attach": str(a), "length": str(l)} for a, l in branches],
        "tr": [{"branch": i, "upto": "0"} for i in range(len(branches))] if tr is None else tr,
        "line": [[str(x), v] for x, v in line],
        "branch_maps": [[[str(t), v] for t, v in bm] for bm in branch_maps],
    }


ROT_THIRD = [(0, R("1/3")), (1, R("4/3"))]

SUN = {
    # one cell covering the branch once, shifted by 1
    "s1": sun([(0, 1)], ROT_THIRD, [[
        (0, R("1/3")), ("1/4", B(0, 0, 1)), ("1/2", B(0, 1, 1)), ("3/4", B(0, 0, 1)), (1, R("4/3"))]]),
    # two full cells with displacements 0 and 1: one component, interval [0, 1]
    "two_loops": sun([(0, 1)], ROT_THIRD, [[
        (0, R("1/3")), ("1/8", R(0)), ("1/4", B(0, 1, 0)), ("3/8", R(0)), ("5/8", R(1)),
        ("3/4", B(0, 1, 1)), ("7/8", R(1)), (1, R("4/3"))]]),
    # three cells (p = 0, 1, 2); the middle one reaches only into the third
    "towers": sun([(0, 1)], ROT_THIRD, [[
        (0, R("1/3")), ("1/16", R(0)), ("1/8", B(0, 1, 0)), ("3/16", R(0)), ("5/16", R(1)),
        ("3/8", B(0, "5/8", 1)), ("7/16", R(1)), ("9/16", R(2)), ("5/8", B(0, 1, 2)),
        ("11/16", R(2)), (1, R("7/3"))]]),
    # the tower of the first cell repeats its state at once while still
    # covering the first cell: a lasso that keeps emitting basis arrows
    "lasso_ij": sun([(0, 1)], ROT_THIRD, [[
        (0, R("1/3")), ("1/16", R(0)), ("1/8", B(0, "2/3", 0)), ("1/4", R(0)), ("1/2", R(1)),
        ("3/4", B(0, 1, 1)), ("7/8", R(1)), (1, R("4/3"))]]),
    # a single cell whose image stops at a fixed level of its transfer map:
    # lasso in J, isolated rotation number 1
    "lasso_j": sun([(0, 1)], ROT_THIRD, [[
        (0, R("1/3")), ("1/8", R(1)), ("1/4", B(0, "1/2", 1)), (1, R(1))]]),
    # same with an identity piece in the transfer map: a whole interval of
    # periodic points
    "plateau": sun([(0, 1)], ROT_THIRD, [[
        (0, R("1/3")), ("1/8", R(1)), ("1/4", B(0, "1/4", 1)), ("1/2", B(0, "1/2", 1)), (1, R(1))]]),
    # two branches feeding each other with contracting tops: the towers
    # converge to 7/12 without repeating; J-tail with label period 2
    "jtail_q2": sun([(0, 1), ("1/2", 1)], [(0, R("1/3")), (1, R("4/3"))], [
        [(0, R("1/3")), ("1/8", R("1/2")), ("1/4", B(1, "1/2", 0)), (1, B(1, "11/16", 0))],
        [(0, R("5/6")), ("1/8", R(1)), ("1/4", B(0, "1/2", 1)), (1, B(0, "11/16", 1))],
    ]),
    # the tower state alternates between the two branches and repeats after
    # two steps: lasso of period 2 in J
    "lasso_p2": sun([(0, 1), ("1/2", 1)], [(0, R("1/3")), (1, R("4/3"))], [
        [(0, R("1/3")), ("1/8", R("1/2")), ("1/4", B(1, "1/2", 0)), (1, R("1/2"))],
        [(0, R("5/6")), ("1/8", R(1)), ("1/4", B(0, "1/2", 1)), (1, R(1))],
    ]),
    # the branch falls back into the line: no cells at all
    "into_line": sun([(0, 1)], ROT_THIRD, [[(0, R("1/3")), (1, R("1/2"))]]),
    # towers converge to 31/48 while emitting basis arrows forever: capped
    "capped": sun([(0, 1)], ROT_THIRD, [[
        (0, R("1/3")), ("1/16", R(0)), ("1/8", B(0, "7/10", 0)), ("1/4", R(0)), ("1/2", R(1)),
        ("9/16", B(0, "5/8", 1)), ("3/4", B(0, "43/64", 1)), (1, R(1))]]),
    # branch 0 maps its top across branch 1 + 2
    "two_branch": sun([(0, 1), ("1/2", 1)], [(0, R("7/3")), (1, R("10/3"))], [
        [(0, R("7/3")), ("1/8", R("5/2")), ("1/2", B(1, 1, 2)), (1, B(1, "1/2", 2))],
        [(0, R("17/6")), ("1/4", R(3)), ("1/2", B(0, 1, 3)), (1, B(0, "1/4", 3))],
    ]),
    # the line leaves the line: Rot_R can only be estimated
    "escaping_line": sun(
        [(0, 1)],
        [(0, R("1/3")), ("1/2", R(1)), ("5/8", B(0, "1/4", 1)), ("3/4", R(1)), (1, R("4/3"))],
        [[(0, R("1/3")), ("1/4", B(0, 0, 1)), ("1/2", B(0, 1, 1)), ("3/4", B(0, 0, 1)), (1, R("4/3"))]],
        tr=[{"branch": 0, "upto": "1/4"}]),
}

# consecutive control points on different branch copies: no common chart
BROKEN = sun([(0, 1)], ROT_THIRD, [[
    (0, R("1/3")), ("1/8", R(0)), ("1/4", B(0, "1/2", 0)), ("1/2", B(0, "1/2", 1)), (1, R("4/3"))]])

CIRCLE_MONOTONE = {
    "rigid_2_5": [(0, "2/5"), (1, "7/5")],
    "flat_half": [(0, "1/2"), ("1/4", "1/2"), ("1/2", 1), (1, "3/2")],
    "two_slopes": [(0, "3/10"), ("1/2", "11/20"), (1, "13/10")],
    "golden": [(0, "61803/100000"), (1, "161803/100000")],
    "staircase": [(0, "1/10"), ("3/10", "1/5"), ("3/5", "9/10"), (1, "11/10")],
}

CIRCLE_NONMONOTONE = {
    "bump": [(0, 0), ("1/4", "1/2"), ("1/2", "1/4"), (1, 1)],
    "zigzag": [(0, "1/3"), ("1/3", 1), ("2/3", 0), (1, "4/3")],
    "tall_bump": [(0, 0), ("1/2", "3/2"), (1, 1)],
    "double_bump": [(0, "1/5"), ("1/5", "4/5"), ("2/5", "2/5"), ("3/5", 1), ("4/5", "3/5"), (1, "6/5")],
    "dip": [(0, 0), ("1/5", "-3/10"), ("1/2", "9/10"), ("7/10", "2/5"), (1, 1)],
}


def main():
    for name, doc in SUN.items():
        write(HERE / f"{name}.json", doc)
    write(HERE / "broken_chart.json", BROKEN)
    for kind, table in (("monotone", CIRCLE_MONOTONE), ("nonmonotone", CIRCLE_NONMONOTONE)):
        for name, pts in table.items():
            write(HERE / "circle" / f"{kind}_{name}.json", sun([], [(x, R(y)) for x, y in pts], []))


def write(path: Path, doc) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, indent=1) + "\n", encoding="utf-8")


if __name__ == "__main__":
    main()
