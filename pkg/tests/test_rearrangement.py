import numpy as np

from pytest import approx, mark, raises

from models.rearrangement import (Rearrangement, check_equimeasurable, check_oneil, check_product, check_truncation,
                                  distribution_function, oneil_rhs, rearrange)
from models.sampled import SampledFunction, indicator_ball, make_grid
from utils.errors import PreconditionError

GRID = make_grid(1, 4.0, 64)


def random_function(seed: int, grid=GRID) -> SampledFunction:
    rng = np.random.default_rng(seed)
    values = rng.uniform(-1.0, 1.0, grid.shape) * (rng.random(grid.shape) < 0.5)
    return SampledFunction(grid, values)


@mark.parametrize("seed", range(10))
def test_indicator_rearranges_to_a_single_step(seed):
    mask = np.random.default_rng(seed).random(GRID.shape) < 0.3
    r = rearrange(SampledFunction(GRID, mask.astype(float)))
    assert list(r.levels) == [1.0]
    assert list(r.breakpoints) == [0.0, np.count_nonzero(mask) * GRID.h]


def test_zero_function_has_an_empty_rearrangement():
    r = rearrange(SampledFunction(GRID, np.zeros(GRID.shape)))
    assert r.size == 0 and r.sup() == 0.0 and r.mass() == 0.0


@mark.parametrize("q", (1.0, 2.0, 3.5))
def test_mass_identity(q):
    f = random_function(3)
    assert rearrange(f).mass(q) == approx(f.lp_norm(q) ** q, rel=1e-12)


def test_levels_are_strictly_decreasing():
    r = rearrange(random_function(4))
    assert np.all(np.diff(r.levels) < 0.0)
    assert r.sup() == random_function(4).sup_norm()


def test_maximal_average_dominates_rearrangement():
    r = rearrange(random_function(5))
    s = np.geomspace(1e-4, 20.0, 200)
    assert np.all(r.maximal_average(s) >= r.value_at(s) - 1e-15)
    assert np.all(np.diff(r.maximal_average(s)) <= 1e-15)
    with raises(PreconditionError):
        r.maximal_average(0.0)


def test_from_levels_merges_equal_neighbours_and_drops_zeros():
    r = Rearrangement.from_levels([3.0, 3.0, 1.0, 0.0], [1.0, 2.0, 1.0, 5.0])
    assert list(r.levels) == [3.0, 1.0]
    assert list(r.breakpoints) == [0.0, 3.0, 4.0]
    assert r.cumulative(4.0) == approx(10.0)
    assert r.value_at(3.0) == 1.0


@mark.parametrize("breakpoints levels".split(),
                  (([0.0, 1.0, 2.0], [1.0, 2.0]),
                   ([0.0, 2.0, 1.0], [2.0, 1.0]),
                   ([1.0, 2.0], [1.0]),
                   ([0.0, 1.0], [1.0, 0.5])))
def test_invalid_step_functions(breakpoints, levels):
    with raises(PreconditionError):
        Rearrangement(np.array(breakpoints), np.array(levels))


def test_distribution_function():
    f = indicator_ball(GRID, 1.0).scaled(2.0)
    assert distribution_function(f, 1.0) == 2.0
    assert distribution_function(f, 2.0) == 0.0
    with raises(PreconditionError):
        distribution_function(f, 0.0)


@mark.parametrize("seed", range(5))
def test_equimeasurable(seed):
    f = random_function(seed)
    levels = np.linspace(0.05, 1.0, 20)
    assert check_equimeasurable(f, levels) == 0.0


def test_oneil_rhs_of_an_indicator_pair():
    a = 2.0
    r = Rearrangement.from_levels([1.0], [a])
    s = np.array([0.1, 0.5, 1.0, 2.0, 4.0, 16.0])
    expected = np.where(s <= a, 2.0 * a - s, a * a / s)
    assert np.allclose(oneil_rhs(r, r, s), expected, rtol=1e-12)


def test_oneil_holds_for_an_indicator_pair():
    f = indicator_ball(GRID, 1.0)
    report = check_oneil(f, f, np.geomspace(1e-3, 4.0, 40))
    assert report.holds()


@mark.parametrize("seed", range(5))
def test_oneil_holds_on_random_pairs(seed):
    grid = make_grid(1, 4.0, 256)
    f, g = random_function(2 * seed, grid), random_function(2 * seed + 1, grid)
    report = check_oneil(f, g, np.geomspace(1e-3, 8.0, 40))
    assert report.holds()


@mark.parametrize("seed", range(5))
def test_product_inequality_on_random_pairs(seed):
    f, g = random_function(2 * seed), random_function(2 * seed + 1)
    report = check_product(f, g, np.geomspace(1e-3, 8.0, 40))
    assert report.holds()


def test_product_with_itself_is_an_identity():
    f = random_function(7)
    report = check_product(f, f, np.geomspace(1e-3, 8.0, 40))
    assert np.allclose(report.lhs, report.rhs, rtol=1e-12)


def test_truncation_to_a_cell_aligned_set():
    f = random_function(8)
    mask = np.abs(GRID.axis()) < 1.0
    report = check_truncation(f, mask, np.geomspace(1e-3, 8.0, 40))
    assert report.holds()
    assert report.max_violation <= 1e-15


def test_rearrangement_frame_carries_the_tail_row():
    frame = Rearrangement.from_levels([2.0, 1.0], [1.0, 1.0]).to_frame()
    assert list(frame.columns) == ["s_break", "level"]
    assert list(frame["level"]) == [2.0, 1.0, 0.0]
