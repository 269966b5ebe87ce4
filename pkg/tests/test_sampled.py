import numpy as np

from pytest import approx, mark, raises
from hypothesis import given
from hypothesis.strategies import floats

from models.estimates import PowerLogProfile
from models.sampled import (axpy, constant, indicator_ball, make_grid, sample, sample_radial,
                            signed_power, zeros)
from utils.errors import GridMismatchError, NonFiniteSampleError, PreconditionError


def test_grid_geometry():
    grid = make_grid(1, 4.0, 16)
    assert grid.h == 0.5
    assert grid.cell_measure == 0.5
    assert grid.total_measure == 8.0
    assert grid.shape == (16,)
    assert grid.axis()[0] == -3.75 and grid.axis()[-1] == 3.75


@mark.parametrize("n L M".split(), ((3, 1.0, 16), (1, 0.0, 16), (1, 1.0, 12), (1, 1.0, 4)))
def test_invalid_grid(n, L, M):
    with raises(PreconditionError):
        make_grid(n, L, M)


def test_frequencies_are_integer_multiples_of_pi_over_L():
    grid = make_grid(1, np.pi, 8)
    assert np.allclose(grid.frequencies(), [0.0, 1.0, 2.0, 3.0, 4.0], atol=1e-12)
    assert make_grid(2, np.pi, 8).frequencies().shape == (8, 5)


def test_sampling_rejects_non_finite_values():
    grid = make_grid(1, 1.0, 8)
    with raises(NonFiniteSampleError, match="node"):
        sample(grid, lambda x: np.where(x > 0.5, np.inf, 0.0))


def test_values_are_read_only():
    f = constant(make_grid(1, 1.0, 8), 2.0)
    with raises(ValueError):
        f.values[0] = 1.0


def test_integral_of_a_constant_is_exact():
    grid = make_grid(2, 2.0, 16)
    assert constant(grid, 1.0).integral() == grid.total_measure
    assert zeros(grid).lp_norm(2.0) == 0.0


def test_indicator_ball_measure():
    grid = make_grid(1, 4.0, 16)
    f = indicator_ball(grid, 1.0)
    assert f.integral() == 2.0
    lower, upper = f.support_box()
    assert lower[0] == -0.75 and upper[0] == 0.75


def test_lp_norms():
    grid = make_grid(1, 4.0, 16)
    f = indicator_ball(grid, 1.0).scaled(-3.0)
    assert f.lp_norm(1.0) == approx(6.0)
    assert f.lp_norm(2.0) == approx(np.sqrt(18.0))
    assert f.lp_norm(np.inf) == 3.0


def test_axpy_and_grid_mismatch():
    grid = make_grid(1, 1.0, 8)
    f, g = constant(grid, 1.0), constant(grid, 2.0)
    assert np.all(axpy(3.0, f, g).values == 5.0)
    with raises(GridMismatchError):
        axpy(1.0, f, constant(make_grid(1, 2.0, 8), 1.0))


@given(floats(min_value=-1e3, max_value=1e3), floats(min_value=1.0, max_value=4.0))
def test_signed_power_is_odd(s, p):
    assert signed_power(-s, p) == -signed_power(s, p)


def test_signed_power_at_zero_and_pointwise_pow():
    grid = make_grid(1, 1.0, 8)
    f = sample(grid, lambda x: x)
    assert signed_power(0.0, 3.0) == 0.0
    assert np.allclose(f.pointwise_pow(2.0).values, grid.axis() ** 2)
    assert np.allclose(f.signed_power(3.0).values, grid.axis() ** 3)


def test_shift_preserves_the_integral():
    grid = make_grid(2, 2.0, 16)
    f = indicator_ball(grid, 0.7)
    assert f.shift((3, -5)).integral() == approx(f.integral(), rel=1e-14)


def test_origin_cells_take_the_cell_average_in_1d():
    grid = make_grid(1, 4.0, 64)
    f = sample_radial(grid, lambda r: r ** -0.5)
    origin = np.abs(grid.axis()) < grid.h
    assert np.count_nonzero(origin) == 2
    assert f.values[origin] == approx(2.0 / np.sqrt(grid.h), rel=1e-8)
    far = np.abs(grid.axis()) > grid.h
    assert np.allclose(f.values[far], np.abs(grid.axis()[far]) ** -0.5)


def test_origin_cells_take_the_cell_average_in_2d():
    grid = make_grid(2, 1.0, 16)
    f = sample_radial(grid, lambda r: np.ones_like(r), radius=0.5)
    assert f.values[7, 7] == approx(1.0, rel=1e-8)
    assert f.values[0, 0] == 0.0


class UnitProfileWithMass:
    def __call__(self, r):
        return np.ones_like(r)

    def radial_mass(self, R, power):
        return 7.0 * R


def test_profile_supplied_mass_fills_the_origin_cells():
    grid = make_grid(1, 4.0, 64)
    f = sample_radial(grid, UnitProfileWithMass())
    origin = np.abs(grid.axis()) < grid.h
    assert np.allclose(f.values[origin], 7.0, rtol=1e-14)
    assert np.all(f.values[~origin] == 1.0)


def test_log_singular_profile_stays_finite():
    # the generic path stops at r = 1e-150 and misses L(1e-150)^{-2}/2 of the mass
    grid = make_grid(1, 4.0, 64)
    f = sample_radial(grid, lambda r: 1.0 / (r * np.log(np.e + 1.0 / r) ** 3))
    origin = np.abs(grid.axis()) < grid.h
    assert np.all(np.isfinite(f.values))
    exact = PowerLogProfile(1, 3.0).radial_mass(grid.h, 0) / grid.h
    assert f.values[origin][0] == approx(exact, rel=1e-3)


def test_to_frame_columns():
    assert list(constant(make_grid(1, 1.0, 8), 1.0).to_frame().columns) == ["x1", "value"]
    frame = constant(make_grid(2, 1.0, 8), 1.0).to_frame()
    assert list(frame.columns) == ["x1", "x2", "value"] and len(frame) == 64
