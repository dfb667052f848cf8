import math

import numpy as np
import pytest

from tesslab.core.errors import DegenerateInputError, InvalidParameterError
from tesslab.core.models.point import Box, MarkDistribution, MarkedConfiguration, MarkedPoint, MarkLaw


@pytest.mark.ut
def test_marked_points_order_by_position_then_mark():
    a = MarkedPoint((0.0, 1.0), 0.5)
    b = MarkedPoint((0.0, 1.0), 0.2)
    c = MarkedPoint((-1.0, 5.0), 3.0)
    assert sorted([a, b, c]) == [c, b, a]


@pytest.mark.ut
def test_marked_point_rejects_negative_mark():
    with pytest.raises(InvalidParameterError):
        MarkedPoint((0.0, 0.0), -0.1)


@pytest.mark.ut
def test_marked_point_rejects_non_finite_position():
    with pytest.raises(InvalidParameterError):
        MarkedPoint((math.inf, 0.0))


@pytest.mark.ut
def test_centered_window_has_requested_volume():
    w = Box.centered(100.0)
    assert w.lower == (-5.0, -5.0)
    assert w.upper == (5.0, 5.0)
    assert w.volume == pytest.approx(100.0)


@pytest.mark.ut
def test_degenerate_box_is_rejected():
    with pytest.raises(DegenerateInputError):
        Box((0.0, 0.0), (0.0, 1.0))


@pytest.mark.ut
def test_dilate_and_contains_ball():
    w = Box.centered(4.0).dilate(1.0)
    assert w.sides == (4.0, 4.0)
    assert w.contains_ball((0.0, 0.0), 2.0)
    assert not w.contains_ball((1.5, 0.0), 2.0)


@pytest.mark.ut
def test_box_distance_is_zero_inside():
    w = Box.centered(4.0)
    d = w.distance(np.array([[0.0, 0.0], [3.0, 0.0], [4.0, 5.0]]))
    assert d[0] == 0.0
    assert d[1] == pytest.approx(2.0)
    assert d[2] == pytest.approx(5.0)


@pytest.mark.ut
def test_mark_bounds():
    assert MarkDistribution.point_mass(0.3).mu_bound == 0.3
    assert MarkDistribution.uniform(0.0, 0.5).mu_bound == 0.5
    assert MarkDistribution.discrete([0.1, 0.9, 2.0], [0.5, 0.5, 0.0]).mu_bound == 0.9


@pytest.mark.ut
def test_mark_laws_validate_parameters():
    with pytest.raises(InvalidParameterError):
        MarkDistribution.uniform(0.5, 0.5)
    with pytest.raises(InvalidParameterError):
        MarkDistribution.discrete([0.1, 0.2], [0.5, 0.6])
    with pytest.raises(InvalidParameterError):
        MarkDistribution(MarkLaw.point_mass, low=-1.0)


@pytest.mark.ut
def test_uniform_marks_stay_in_support():
    marks = MarkDistribution.uniform(0.1, 0.4).sample(np.random.default_rng(0), 1000)
    assert marks.min() >= 0.1
    assert marks.max() <= 0.4


@pytest.mark.ut
def test_configuration_rejects_duplicates():
    with pytest.raises(DegenerateInputError):
        MarkedConfiguration(np.array([[0.0, 0.0], [0.0, 0.0]]), np.zeros(2), Box.centered(4.0))


@pytest.mark.ut
def test_configuration_rejects_points_outside_carrier():
    with pytest.raises(InvalidParameterError):
        MarkedConfiguration(np.array([[3.0, 0.0]]), np.zeros(1), Box.centered(4.0))


@pytest.mark.ut
def test_configuration_arrays_are_read_only():
    config = MarkedConfiguration(np.array([[0.0, 0.0]]), np.zeros(1), Box.centered(4.0))
    with pytest.raises(ValueError):
        config.positions[0, 0] = 1.0


@pytest.mark.ut
def test_configuration_edits():
    config = MarkedConfiguration(np.array([[0.0, 0.0], [1.0, 1.0]]), np.array([0.0, 0.2]), Box.centered(16.0))
    p = MarkedPoint((1.0, 1.0), 0.2)
    assert config.index_of(p) == 1
    assert len(config.without(p)) == 1
    assert len(config.with_points([MarkedPoint((-1.0, 0.5))])) == 3
    assert len(config.within((0.0, 0.0), 1.0)) == 1
    assert list(config)[1] == p
