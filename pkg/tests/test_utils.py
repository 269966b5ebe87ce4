import numpy as np

from pytest import approx, mark, raises
from hypothesis import given
from hypothesis.strategies import floats

from utils.errors import GridMismatchError, PreconditionError
from utils.predicates import ExponentRules, at_least, in_half_open, in_range, one_of, require
from utils.utils import (geometric_grid, geometric_points, is_power_of_two, log_factor, log_weight, tail_slope,
                         unit_ball_volume)


def test_require_returns_value_and_names_parameter():
    assert require("q", 2.0, at_least(1.0), "q >= 1") == 2.0
    with raises(PreconditionError, match="q: expected q >= 1"):
        require("q", 0.5, at_least(1.0), "q >= 1")


@mark.parametrize("predicate value expected".split(),
                  ((in_half_open(0.0, 2.0), 2.0, True),
                   (in_half_open(0.0, 2.0), 0.0, False),
                   (in_range(0.0, 0.5), 0.0, True),
                   (in_range(0.0, 0.5), 0.5, False),
                   (one_of((1, 2)), 2, True),
                   (one_of((1, 2)), 3, False)))
def test_predicates(predicate, value, expected):
    assert predicate(value) is expected


def test_precondition_errors_are_value_errors():
    assert issubclass(PreconditionError, ValueError)
    assert issubclass(GridMismatchError, PreconditionError)


@mark.parametrize("r q".split(), ((2.0, 1.0), (0.5, 1.0)))
def test_ordered_pair_rejects(r, q):
    with raises(PreconditionError):
        ExponentRules.ordered_pair(r, q)


def test_decay_pair_needs_alpha_below_beta_when_r_equals_q():
    ExponentRules.decay_pair(1.0, 1.0, 0.5, 0.5)
    with raises(PreconditionError):
        ExponentRules.decay_pair(2.0, 2.0, 1.0, 0.5)


def test_holder_relation():
    assert ExponentRules.holder_relation(2.0, 2.0, 1.0, 3.0) == approx(2.0)
    with raises(PreconditionError):
        ExponentRules.holder_relation(2.0, 3.0, 0.0, 0.0)


@mark.parametrize("theta".split(), ((0.0,), (2.5,), (-1.0,)))
def test_order_rejects(theta):
    with raises(PreconditionError):
        ExponentRules.order(theta)


def test_log_weight_limits():
    assert log_weight(np.inf, 3.0) == approx(1.0)
    assert log_weight(1.0, 0.0) == 1.0
    assert log_factor(1.0) == approx(np.log(np.e + 1.0))


@given(floats(min_value=1e-30, max_value=1e6), floats(min_value=-3.0, max_value=3.0))
def test_log_weight_is_a_power_of_the_factor(s, alpha):
    assert log_weight(s, alpha) == approx(log_factor(s) ** alpha, rel=1e-12)


def test_geometric_grids_include_endpoints():
    grid = geometric_grid(1e-6, 1.0, 8)
    assert grid[0] == approx(1e-6) and grid[-1] == approx(1.0)
    assert grid.size >= 6 * 8 + 1 and np.all(np.diff(grid) > 0.0)
    points = geometric_points(1e-4, 1.0, 40)
    assert points.size == 40 and np.all(np.diff(points) > 0.0)


@mark.parametrize("value expected".split(), ((1, True), (64, True), (96, False), (0, False)))
def test_is_power_of_two(value, expected):
    assert is_power_of_two(value) is expected


@mark.parametrize("n expected".split(), ((1, 2.0), (2, np.pi)))
def test_unit_ball_volume(n, expected):
    assert unit_ball_volume(n) == approx(expected, rel=1e-14)


def test_tail_slope_of_a_power_law():
    t = geometric_points(1e-4, 1.0, 40)
    assert tail_slope(t, t ** 0.5) == approx(0.5, abs=1e-10)
    assert tail_slope(t, np.ones_like(t)) == approx(0.0, abs=1e-12)
