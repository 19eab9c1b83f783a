from fractions import Fraction as F

import pytest

from sunrot.core_space import (BranchPoint, GeometryError, LinePoint, SunGraphShape, TSegment,
                               as_fraction, branch_compare, format_rational, retract_line,
                               translate)


@pytest.fixture
def shape():
    return SunGraphShape([(0, 1), (F(1, 2), F(3, 2))])


def test_translate_line_point():
    assert translate(LinePoint(F(1, 2)), 2) == LinePoint(F(5, 2))


def test_translate_keeps_branch_chart():
    assert translate(BranchPoint(0, F(1, 3), 0), -1) == BranchPoint(0, F(1, 3), -1)


def test_attachment_is_canonicalized_to_the_line(shape):
    assert shape.branch_point(0, 0, 1) == LinePoint(F(1))
    assert shape.canonical(BranchPoint(1, F(0), -2)) == LinePoint(F(-3, 2))


def test_retract_line(shape):
    assert retract_line(shape, LinePoint(F(7, 3))) == F(7, 3)
    assert retract_line(shape, BranchPoint(0, F(1, 2), 3)) == 3
    assert retract_line(shape, BranchPoint(1, F(1), -1)) == F(-1, 2)


def test_branch_compare(shape):
    a, b = BranchPoint(0, F(1, 4), 0), BranchPoint(0, F(3, 4), 0)
    assert branch_compare(shape, a, b) == -1
    assert branch_compare(shape, b, a) == 1
    assert branch_compare(shape, BranchPoint(0, F(1, 2), 0), BranchPoint(0, F(1, 2), 0)) == 0
    # the attachment is the minimum of its copy
    assert branch_compare(shape, LinePoint(F(0)), a) == -1
    assert branch_compare(shape, LinePoint(F(3, 2)), BranchPoint(1, F(1, 10), 1)) == -1


def test_branch_compare_rejects_different_charts(shape):
    with pytest.raises(GeometryError):
        branch_compare(shape, BranchPoint(0, F(1, 4), 0), BranchPoint(0, F(1, 4), 1))
    with pytest.raises(GeometryError):
        branch_compare(shape, BranchPoint(0, F(1, 4), 0), BranchPoint(1, F(1, 4), 0))
    with pytest.raises(GeometryError):
        branch_compare(shape, LinePoint(F(1, 3)), BranchPoint(0, F(1, 4), 0))


def test_shape_validation():
    with pytest.raises(GeometryError):
        SunGraphShape([(0, 1), (0, 2)])
    with pytest.raises(GeometryError):
        SunGraphShape([(1, 1)])
    with pytest.raises(GeometryError):
        SunGraphShape([(0, 0)])


def test_branch_point_range(shape):
    with pytest.raises(GeometryError):
        shape.branch_point(0, F(2), 0)
    assert shape.attached_branch(F(5, 2)) == (1, 2)
    assert shape.attached_branch(F(1, 3)) is None


def test_segments():
    seg = TSegment(0, 1, F(0), F(1, 2))
    assert seg.chart == ("B", 0, 1)
    assert seg.translated(-1) == TSegment(0, 0, F(0), F(1, 2))
    assert TSegment(None, 0, F(1, 3), F(2, 3)).translated(1).lo == F(4, 3)
    with pytest.raises(GeometryError):
        TSegment(None, 0, F(1), F(0))


def test_as_fraction_is_exact():
    assert as_fraction("3/4") == F(3, 4)
    assert as_fraction(2) == 2
    with pytest.raises(TypeError):
        as_fraction(0.5)
    with pytest.raises(ValueError):
        as_fraction("0.5")
    assert format_rational(F(4, 2)) == "2"
    assert format_rational(F(-1, 3)) == "-1/3"
