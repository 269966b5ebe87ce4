# MODEL: Grid representation of functions on a periodic box in R^n
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Tuple
import logging

import numpy as np
import pandas as pd
from scipy import integrate

from constants import MIN_POINTS_PER_AXIS, QUAD_EPSABS, QUAD_EPSREL, QUAD_LIMIT, SUPPORTED_DIMENSIONS
from utils.errors import GridMismatchError, NonFiniteSampleError, PreconditionError
from utils.predicates import greater_than, one_of, require
from utils.utils import is_power_of_two

logger = logging.getLogger(__name__)

# smallest radius reached when integrating a generic profile towards the origin
_RADIAL_FLOOR = 1e-150


@dataclass(frozen=True)
class GridSpec:
    """Uniform periodic grid over [-L, L]^n with M cells per axis"""
    n: int
    L: float
    M: int

    def __post_init__(self):
        require("n", self.n, one_of(SUPPORTED_DIMENSIONS), f"n in {SUPPORTED_DIMENSIONS}")
        require("L", self.L, greater_than(0.0), "L > 0")
        if self.M < MIN_POINTS_PER_AXIS or not is_power_of_two(self.M):
            raise PreconditionError("M", f"a power of two >= {MIN_POINTS_PER_AXIS}", self.M)

    @property
    def h(self) -> float:
        return 2.0 * self.L / self.M

    @property
    def cell_measure(self) -> float:
        return self.h ** self.n

    @property
    def shape(self) -> Tuple[int, ...]:
        return (self.M,) * self.n

    @property
    def total_measure(self) -> float:
        return (2.0 * self.L) ** self.n

    def axis(self) -> np.ndarray:
        """Cell centres along one axis"""
        return -self.L + (np.arange(self.M) + 0.5) * self.h

    def coordinates(self) -> Tuple[np.ndarray, ...]:
        """Cell-centre coordinate arrays, 'ij' indexing"""
        return tuple(np.meshgrid(*([self.axis()] * self.n), indexing='ij'))

    def radius(self) -> np.ndarray:
        """|x| at every cell centre"""
        return np.sqrt(sum(c ** 2 for c in self.coordinates()))

    def periodic_distance(self, center: Sequence[float]) -> np.ndarray:
        """Minimum-image distance from every cell centre to center"""
        period = 2.0 * self.L
        squared = np.zeros(self.shape)
        for coord, z in zip(self.coordinates(), center):
            d = np.abs(coord - z) % period
            d = np.minimum(d, period - d)
            squared = squared + d ** 2
        return np.sqrt(squared)

    def frequencies(self) -> np.ndarray:
        """|xi| on the discrete frequency lattice (integer multiples of pi/L), rfftn layout"""
        full = 2.0 * np.pi * np.fft.fftfreq(self.M, d=self.h)
        half = 2.0 * np.pi * np.fft.rfftfreq(self.M, d=self.h)
        axes = [full] * (self.n - 1) + [half]
        mesh = np.meshgrid(*axes, indexing='ij')
        return np.sqrt(sum(k ** 2 for k in mesh))


def make_grid(n: int, L: float, M: int) -> GridSpec:
    """Build and validate a grid"""
    return GridSpec(n=int(n), L=float(L), M=int(M))


@dataclass(frozen=True)
class SampledFunction:
    """Real values at the cell centres of a grid; immutable"""
    grid: GridSpec
    values: np.ndarray = field(repr=False)
    allow_nonfinite: bool = field(default=False, repr=False, compare=False)

    def __post_init__(self):
        values = np.array(self.values, dtype=float).reshape(self.grid.shape)
        if not self.allow_nonfinite and not np.all(np.isfinite(values)):
            index = tuple(int(i) for i in np.argwhere(~np.isfinite(values))[0])
            point = tuple(float(c[index]) for c in self.grid.coordinates())
            raise NonFiniteSampleError(index, point, float(values[index]))
        values.setflags(write=False)
        object.__setattr__(self, 'values', values)

    # Quadrature

    def integral(self) -> float:
        """Midpoint quadrature: cell measure times the sum of values"""
        return float(self.grid.cell_measure * np.sum(self.values))

    def pair(self, other: 'SampledFunction') -> float:
        """Integral of the pointwise product"""
        self._check_grid(other)
        return float(self.grid.cell_measure * np.sum(self.values * other.values))

    def lp_norm(self, q: float) -> float:
        """L^q norm by midpoint quadrature; q = inf gives max |f|"""
        if np.isinf(q):
            return self.sup_norm()
        return float((self.grid.cell_measure * np.sum(np.abs(self.values) ** q)) ** (1.0 / q))

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    # Elementwise algebra

    def scaled(self, k: float) -> 'SampledFunction':
        return SampledFunction(self.grid, k * self.values)

    def abs(self) -> 'SampledFunction':
        return SampledFunction(self.grid, np.abs(self.values))

    def multiply(self, other: 'SampledFunction') -> 'SampledFunction':
        self._check_grid(other)
        return SampledFunction(self.grid, self.values * other.values)

    def pointwise_pow(self, r: float) -> 'SampledFunction':
        """|f|^r"""
        return SampledFunction(self.grid, np.abs(self.values) ** r)

    def pointwise_apply(self, func: Callable[[np.ndarray], np.ndarray]) -> 'SampledFunction':
        return SampledFunction(self.grid, func(self.values))

    def signed_power(self, p: float) -> 'SampledFunction':
        """F_p(f) = |f|^(p-1) f"""
        return self.pointwise_apply(lambda v: signed_power(v, p))

    def restrict(self, mask: np.ndarray) -> 'SampledFunction':
        """f times the indicator of mask"""
        return SampledFunction(self.grid, np.where(mask, self.values, 0.0))

    def ball_mask(self, center: Sequence[float], radius: float) -> np.ndarray:
        """Cells whose centre lies in the periodic ball B(center, radius)"""
        return self.grid.periodic_distance(center) < radius

    def shift(self, cells: Sequence[int]) -> 'SampledFunction':
        """Translate by whole cells (periodic)"""
        return SampledFunction(self.grid, np.roll(self.values, tuple(cells), axis=tuple(range(self.grid.n))))

    def support_box(self) -> Optional[Tuple[np.ndarray, np.ndarray]]:
        """Bounding box (lower, upper) of the cell centres where f != 0"""
        nonzero = np.argwhere(self.values != 0.0)
        if nonzero.size == 0:
            return None
        axis = self.grid.axis()
        return axis[nonzero.min(axis=0)], axis[nonzero.max(axis=0)]

    # Serialization

    def to_frame(self) -> pd.DataFrame:
        """One row per cell in row-major order: x1[,x2],value"""
        columns = {f"x{i + 1}": c.ravel() for i, c in enumerate(self.grid.coordinates())}
        columns["value"] = self.values.ravel()
        return pd.DataFrame(columns)

    def _check_grid(self, other: 'SampledFunction'):
        if other.grid != self.grid:
            raise GridMismatchError(self.grid, other.grid)


def signed_power(values, p: float):
    """F_p(s) = |s|^(p-1) s, exact for s = 0 and odd in s"""
    values = np.asarray(values, dtype=float)
    return np.sign(values) * np.abs(values) ** p


def axpy(a: float, f: SampledFunction, g: SampledFunction) -> SampledFunction:
    """a*f + g"""
    f._check_grid(g)
    return SampledFunction(f.grid, a * f.values + g.values)


def sample(grid: GridSpec, f: Callable[..., np.ndarray]) -> SampledFunction:
    """Evaluate f(x1[, x2]) at every cell centre"""
    coords = grid.coordinates()
    with np.errstate(divide='ignore', invalid='ignore'):
        values = np.broadcast_to(np.asarray(f(*coords), dtype=float), grid.shape)
    return SampledFunction(grid, values)


def constant(grid: GridSpec, value: float) -> SampledFunction:
    return SampledFunction(grid, np.full(grid.shape, float(value)))


def zeros(grid: GridSpec) -> SampledFunction:
    return constant(grid, 0.0)


def indicator_ball(grid: GridSpec, radius: float, center: Optional[Sequence[float]] = None) -> SampledFunction:
    """Indicator of the periodic ball B(center, radius) on cell centres"""
    center = center if center is not None else (0.0,) * grid.n
    return SampledFunction(grid, (grid.periodic_distance(center) < radius).astype(float))


def sample_radial(grid: GridSpec, profile: Callable[[np.ndarray], np.ndarray],
                  radius: Optional[float] = None) -> SampledFunction:
    """Sample a radial profile singular at the origin.

    Cells away from the origin take the centre value. The cells touching the
    origin take the cell average of the profile so the local mass is kept.
    An optional radius truncates the profile to B(0, radius).
    """
    r = grid.radius()
    with np.errstate(divide='ignore', invalid='ignore'):
        values = np.asarray(profile(r), dtype=float)
    origin_cells = np.all(np.abs(np.stack(grid.coordinates())) < grid.h, axis=0)
    values = np.where(origin_cells, _origin_cell_average(grid, profile), values)
    if radius is not None:
        values = np.where(r < radius, values, 0.0)
    return SampledFunction(grid, values)


def _origin_cell_average(grid: GridSpec, profile: Callable) -> float:
    """Average of the radial profile over a cell with a corner at the origin.

    A profile exposing radial_mass(R, power) supplies int_0^R profile(r) r^power dr
    itself; any other profile is integrated in u = log(R/r) down to _RADIAL_FLOOR.
    """
    h = grid.h
    options = dict(epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL, limit=QUAD_LIMIT)
    radial_mass = getattr(profile, "radial_mass", None)

    if radial_mass is None:
        def radial_mass(R: float, power: int) -> float:
            def integrand(u):
                r = np.exp(np.log(R) - u)
                return float(profile(np.array(r))) * r ** (power + 1)
            value, _ = integrate.quad(integrand, 0.0, np.log(R / _RADIAL_FLOOR), **options)
            return value

    if grid.n == 1:
        average = radial_mass(h, 0) / h
    else:
        # polar coordinates over the square [0, h]^2, folded along the diagonal
        angular, _ = integrate.quad(lambda phi: radial_mass(h / np.cos(phi), 1), 0.0, np.pi / 4.0, **options)
        average = 2.0 * angular / h ** 2
    if not np.isfinite(average):
        raise NonFiniteSampleError("origin cell", (0.0,) * grid.n, float(average))
    logger.debug("origin cell average %.6g on h=%.3g", average, h)
    return average
