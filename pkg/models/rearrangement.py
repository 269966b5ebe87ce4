# MODEL: Distribution function, decreasing rearrangement and maximal average
from dataclasses import dataclass, field
from typing import Sequence
import logging

import numpy as np
import pandas as pd
from scipy import fft

from constants import INEQUALITY_RTOL, REARRANGEMENT_COLUMNS
from models.sampled import SampledFunction
from utils.errors import PreconditionError
from utils.predicates import greater_than, require

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Rearrangement:
    """Right-continuous non-increasing step function f* on [0, inf).

    f* equals levels[k] on [breakpoints[k], breakpoints[k+1]) and tail
    beyond breakpoints[-1]. Equal neighbouring levels are merged and zero
    levels are dropped, so levels is strictly decreasing and positive.
    """
    breakpoints: np.ndarray = field(repr=False)
    levels: np.ndarray = field(repr=False)
    tail: float = 0.0

    def __post_init__(self):
        breakpoints = np.array(self.breakpoints, dtype=float)
        levels = np.array(self.levels, dtype=float)
        if breakpoints.shape != (levels.size + 1,) or breakpoints[0] != 0.0:
            raise PreconditionError("breakpoints", "0 = s_0 < ... < s_K, one more than levels")
        if np.any(np.diff(breakpoints) <= 0.0):
            raise PreconditionError("breakpoints", "strictly ascending measures")
        if np.any(np.diff(levels) > 0.0) or (levels.size and levels[-1] < self.tail) or self.tail < 0.0:
            raise PreconditionError("levels", "non-increasing non-negative levels")
        for array in (breakpoints, levels):
            array.setflags(write=False)
        object.__setattr__(self, 'breakpoints', breakpoints)
        object.__setattr__(self, 'levels', levels)

    @classmethod
    def from_values(cls, values: np.ndarray, cell_measure: float) -> 'Rearrangement':
        """Exact rearrangement of a piecewise-constant grid function"""
        magnitudes = np.abs(np.asarray(values, dtype=float)).ravel()
        levels, counts = np.unique(magnitudes[magnitudes > 0.0], return_counts=True)
        levels, counts = levels[::-1], counts[::-1]
        breakpoints = np.concatenate(([0.0], np.cumsum(counts) * cell_measure))
        return cls(breakpoints, levels)

    @classmethod
    def from_levels(cls, levels: Sequence[float], widths: Sequence[float], tail: float = 0.0) -> 'Rearrangement':
        """Step function with the given (non-increasing) levels and interval widths"""
        levels = np.asarray(levels, dtype=float)
        widths = np.asarray(widths, dtype=float)
        keep = (widths > 0.0) & (levels > 0.0)
        levels, widths = levels[keep], widths[keep]
        # merge equal neighbours
        starts = np.concatenate(([True], np.diff(levels) != 0.0)) if levels.size else np.array([], dtype=bool)
        group = np.cumsum(starts) - 1
        merged_widths = np.bincount(group, weights=widths) if levels.size else widths
        breakpoints = np.concatenate(([0.0], np.cumsum(merged_widths)))
        return cls(breakpoints, levels[starts], tail)

    @property
    def size(self) -> int:
        return int(self.levels.size)

    @property
    def total_measure(self) -> float:
        """Measure of the support (inf when the tail is positive)"""
        return np.inf if self.tail > 0.0 else float(self.breakpoints[-1])

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.breakpoints)

    def sup(self) -> float:
        """f*(0) = ||f||_inf"""
        return float(self.levels[0]) if self.size else float(self.tail)

    def mass(self, q: float = 1.0) -> float:
        """int_0^inf (f*)^q ds over the finite part"""
        return float(np.sum(self.levels ** q * self.widths))

    def value_at(self, s) -> np.ndarray:
        """f*(s), right-continuous"""
        s = np.asarray(s, dtype=float)
        index = np.searchsorted(self.breakpoints, s, side='right') - 1
        padded = np.append(self.levels, self.tail)
        return padded[np.clip(index, 0, self.size)]

    def cumulative(self, s) -> np.ndarray:
        """int_0^s f*(tau) dtau, piecewise linear in s"""
        s = np.asarray(s, dtype=float)
        totals = np.concatenate(([0.0], np.cumsum(self.levels * self.widths)))
        index = np.clip(np.searchsorted(self.breakpoints, s, side='right') - 1, 0, self.size)
        return totals[index] + self.value_at(s) * (s - self.breakpoints[index])

    def maximal_average(self, s) -> np.ndarray:
        """f**(s) = (1/s) int_0^s f*"""
        s = np.asarray(s, dtype=float)
        if np.any(s <= 0.0):
            raise PreconditionError("s", "s > 0")
        return self.cumulative(s) / s

    def distribution(self, level: float) -> float:
        """Measure of {f* > level}"""
        if self.tail > level:
            return np.inf
        return float(np.sum(self.widths[self.levels > level]))

    def power(self, q: float) -> 'Rearrangement':
        """(f*)^q, which is (|f|^q)*"""
        return Rearrangement(self.breakpoints, self.levels ** q, self.tail ** q)

    def scaled(self, k: float) -> 'Rearrangement':
        """(k f)* = |k| f*"""
        if k == 0.0:
            return Rearrangement(np.array([0.0]), np.array([]))
        return Rearrangement(self.breakpoints, abs(k) * self.levels, abs(k) * self.tail)

    def to_frame(self) -> pd.DataFrame:
        """Rows s_break, level in ascending s; the last row carries the tail"""
        return pd.DataFrame({
            REARRANGEMENT_COLUMNS[0]: self.breakpoints,
            REARRANGEMENT_COLUMNS[1]: np.append(self.levels, self.tail),
        })


def rearrange(f: SampledFunction) -> Rearrangement:
    """f* of a grid function"""
    r = Rearrangement.from_values(f.values, f.grid.cell_measure)
    logger.debug("rearranged %d cells into %d levels", f.values.size, r.levels.size)
    return r


def distribution_function(f: SampledFunction, level: float) -> float:
    """mu_f(level): measure of the cells where |f| > level"""
    require("lambda", level, greater_than(0.0), "lambda > 0")
    return float(np.count_nonzero(np.abs(f.values) > level) * f.grid.cell_measure)


def maximal_average(r: Rearrangement, s) -> np.ndarray:
    """f**(s) for s > 0"""
    return r.maximal_average(s)


@dataclass
class InequalityReport:
    """Both sides of an inequality lhs <= rhs sampled on an s-grid"""
    s: np.ndarray
    lhs: np.ndarray
    rhs: np.ndarray

    @property
    def max_violation(self) -> float:
        return float(np.max(self.lhs - self.rhs)) if self.s.size else 0.0

    @property
    def max_relative_violation(self) -> float:
        """max (lhs - rhs) / rhs, with 0/0 counted as no violation"""
        excess = self.lhs - self.rhs
        scale = np.where(self.rhs > 0.0, self.rhs, 1.0)
        relative = np.where((self.rhs == 0.0) & (self.lhs <= 0.0), 0.0, excess / scale)
        return float(np.max(relative)) if self.s.size else 0.0

    def holds(self, rtol: float = INEQUALITY_RTOL) -> bool:
        return self.max_relative_violation <= rtol


def circular_convolution(f: SampledFunction, g: SampledFunction) -> SampledFunction:
    """(f * g) on the torus via real FFTs, scaled by the cell measure"""
    f._check_grid(g)
    axes = tuple(range(f.grid.n))
    spectrum = fft.rfftn(f.values, axes=axes) * fft.rfftn(g.values, axes=axes)
    values = fft.irfftn(spectrum, s=f.grid.shape, axes=axes) * f.grid.cell_measure
    return SampledFunction(f.grid, values)


def _linear_pieces(r: Rearrangement, points: np.ndarray):
    """Coefficients of int_0^tau f* = A + B tau on each [points[i], points[i+1])"""
    left = points[:-1]
    slope = r.value_at(left)
    intercept = r.cumulative(left) - slope * left
    return intercept, slope


def oneil_rhs(rf: Rearrangement, rg: Rearrangement, s_grid: np.ndarray) -> np.ndarray:
    """int_s^inf f**(tau) g**(tau) dtau, exact for step rearrangements with zero tail"""
    s_grid = np.asarray(s_grid, dtype=float)
    points = np.unique(np.concatenate((rf.breakpoints, rg.breakpoints, s_grid)))
    points = points[points > 0.0]
    a, b = points[:-1], points[1:]
    a1, b1 = _linear_pieces(rf, points)
    a2, b2 = _linear_pieces(rg, points)
    pieces = (a1 * a2 * (1.0 / a - 1.0 / b) + (a1 * b2 + a2 * b1) * np.log(b / a)
              + b1 * b2 * (b - a))
    # beyond the last point both cumulatives are constant
    tail = rf.mass() * rg.mass() / points[-1]
    from_point = np.concatenate((np.cumsum(pieces[::-1])[::-1], [0.0])) + tail
    return from_point[np.searchsorted(points, s_grid)]


def step_product_cumulative(r1: Rearrangement, r2: Rearrangement, s) -> np.ndarray:
    """int_0^s f1*(tau) f2*(tau) dtau"""
    s = np.asarray(s, dtype=float)
    points = np.unique(np.concatenate((r1.breakpoints, r2.breakpoints)))
    products = r1.value_at(points[:-1]) * r2.value_at(points[:-1])
    totals = np.concatenate(([0.0], np.cumsum(products * np.diff(points))))
    tail = r1.tail * r2.tail
    return np.interp(s, points, totals) + tail * np.maximum(s - points[-1], 0.0)


def check_oneil(f: SampledFunction, g: SampledFunction, s_grid) -> InequalityReport:
    """(f*g)**(s) <= int_s^inf f** g** on the torus"""
    s_grid = np.asarray(s_grid, dtype=float)
    conv = circular_convolution(f, g)
    lhs = rearrange(conv).maximal_average(s_grid)
    rhs = oneil_rhs(rearrange(f), rearrange(g), s_grid)
    return InequalityReport(s_grid, lhs, rhs)


def check_product(f1: SampledFunction, f2: SampledFunction, s_grid) -> InequalityReport:
    """(f1 f2)**(s) <= (1/s) int_0^s f1* f2*"""
    s_grid = np.asarray(s_grid, dtype=float)
    lhs = rearrange(f1.multiply(f2)).maximal_average(s_grid)
    rhs = step_product_cumulative(rearrange(f1), rearrange(f2), s_grid) / s_grid
    return InequalityReport(s_grid, lhs, rhs)


def check_truncation(f: SampledFunction, mask: np.ndarray, s_grid) -> InequalityReport:
    """(f chi_E)**(s) <= (1/s) int_0^min(s,|E|) (f chi_E)* on a cell-aligned E"""
    s_grid = np.asarray(s_grid, dtype=float)
    truncated = rearrange(f.restrict(mask))
    measure = np.count_nonzero(mask) * f.grid.cell_measure
    lhs = truncated.maximal_average(s_grid)
    rhs = truncated.cumulative(np.minimum(s_grid, measure)) / s_grid
    return InequalityReport(s_grid, lhs, rhs)


def check_equimeasurable(f: SampledFunction, levels) -> float:
    """max over levels of |mu_f(level) - |{f* > level}||"""
    r = rearrange(f)
    gaps = [abs(distribution_function(f, level) - r.distribution(level)) for level in levels]
    return float(max(gaps)) if gaps else 0.0
