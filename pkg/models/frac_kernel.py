# MODEL: Fractional heat kernel, its majorant and the spectral semigroup
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Sequence, Union
import logging

import numpy as np
from scipy import fft, integrate, special

from constants import FOURIER_EPSABS, FOURIER_QUAD_LIMIT, QUAD_EPSABS, SUPPORTED_DIMENSIONS, WYNN_PANELS
from models.sampled import GridSpec, SampledFunction
from utils.errors import NotConvergedError, PreconditionError
from utils.predicates import ExponentRules, greater_than, one_of, require

logger = logging.getLogger(__name__)

_PANEL_LIMIT = 400
_TAIL_CUTOFF = 1e-18


class KernelMethod(Enum):
    CLOSED_FORM_GAUSS = "gauss"
    CLOSED_FORM_POISSON = "poisson"
    FOURIER_INVERSION = "fourier"


@dataclass(frozen=True)
class KernelSpec:
    """Fractional heat kernel G_theta in dimension n and how to evaluate it"""
    n: int
    theta: float
    method: Optional[KernelMethod] = None

    def __post_init__(self):
        require("n", self.n, one_of(SUPPORTED_DIMENSIONS), f"n in {SUPPORTED_DIMENSIONS}")
        ExponentRules.order(self.theta)
        if self.method is None:
            default = {2.0: KernelMethod.CLOSED_FORM_GAUSS, 1.0: KernelMethod.CLOSED_FORM_POISSON}
            object.__setattr__(self, 'method', default.get(float(self.theta), KernelMethod.FOURIER_INVERSION))
        if self.method is KernelMethod.CLOSED_FORM_GAUSS and self.theta != 2.0:
            raise PreconditionError("method", "gauss closed form only for theta = 2", self.theta)
        if self.method is KernelMethod.CLOSED_FORM_POISSON and self.theta != 1.0:
            raise PreconditionError("method", "poisson closed form only for theta = 1", self.theta)

    @property
    def critical_exponent(self) -> float:
        """p_theta = 1 + theta/n"""
        return 1.0 + self.theta / self.n

    @property
    def alpha(self) -> float:
        """n/theta"""
        return self.n / self.theta


def _radius(x) -> float:
    return float(np.linalg.norm(np.atleast_1d(np.asarray(x, dtype=float))))


def _check_time(t: float) -> None:
    require("t", t, greater_than(0.0), "t > 0")


# Pointwise kernel values

def _gauss(n: int, r: float, t: float) -> float:
    return float((4.0 * np.pi * t) ** (-n / 2.0) * np.exp(-r ** 2 / (4.0 * t)))


def _poisson(n: int, r: float, t: float) -> float:
    constant = special.gamma((n + 1) / 2.0) / np.pi ** ((n + 1) / 2.0)
    return float(constant * t / (t ** 2 + r ** 2) ** ((n + 1) / 2.0))


def wynn_epsilon(partial_sums: Sequence[float]) -> float:
    """Wynn's epsilon extrapolation of a sequence of partial sums"""
    previous = np.zeros(len(partial_sums) + 1)
    current = np.asarray(partial_sums, dtype=float)
    best = current[-1]
    column = 0
    while current.size > 1:
        diff = np.diff(current)
        if np.any(diff == 0.0):
            break
        following = previous[1:current.size] + 1.0 / diff
        previous, current = current, following
        column += 1
        if column % 2 == 0:
            best = current[-1]
    return float(best)


def _panel_sum(integrand, edges: np.ndarray, envelope) -> float:
    """Sum of integrals over consecutive panels, Wynn-accelerated unless the envelope dies first"""
    partial_sums: List[float] = []
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        panel, _ = integrate.quad(integrand, a, b, epsabs=QUAD_EPSABS, limit=FOURIER_QUAD_LIMIT)
        total += panel
        partial_sums.append(total)
        if envelope(b) < _TAIL_CUTOFF:
            return total
    logger.debug("wynn acceleration on %d panels", len(partial_sums))
    return wynn_epsilon(partial_sums[-WYNN_PANELS:])


def _unit_time_1d(rho: float, theta: float) -> float:
    """(1/pi) int_0^inf cos(rho r) exp(-r^theta) dr"""
    if rho == 0.0:
        return float(special.gamma(1.0 + 1.0 / theta) / np.pi)
    result = integrate.quad(lambda r: np.exp(-r ** theta), 0.0, np.inf, weight='cos', wvar=rho,
                            epsabs=FOURIER_EPSABS, limlst=200, limit=FOURIER_QUAD_LIMIT, full_output=1)
    value = result[0]
    # a message past the info dict means QAWF stopped early
    if len(result) > 3 or not np.isfinite(value):
        logger.debug("QAWF failed at rho=%.4g theta=%.4g, switching to cosine panels", rho, theta)
        edges = np.concatenate(([0.0], (np.arange(_PANEL_LIMIT) + 0.5) * np.pi / rho))
        value = _panel_sum(lambda r: np.cos(rho * r) * np.exp(-r ** theta), edges,
                           lambda r: np.exp(-r ** theta))
        if not np.isfinite(value):
            raise NotConvergedError(f"kernel transform did not converge at rho={rho:.6g}, theta={theta:.6g}")
    return float(value / np.pi)


def _unit_time_2d(rho: float, theta: float) -> float:
    """(1/2pi) int_0^inf r J0(rho r) exp(-r^theta) dr, panels between zeros of J0"""
    if rho == 0.0:
        return float(special.gamma(2.0 / theta) / (2.0 * np.pi * theta))
    edges = np.concatenate(([0.0], special.jn_zeros(0, _PANEL_LIMIT) / rho))
    value = _panel_sum(lambda r: r * special.j0(rho * r) * np.exp(-r ** theta), edges,
                       lambda r: r * np.exp(-r ** theta))
    if not np.isfinite(value):
        raise NotConvergedError(f"kernel transform did not converge at rho={rho:.6g}, theta={theta:.6g}")
    return value / (2.0 * np.pi)


def kernel_eval(spec: KernelSpec, x, t: float) -> float:
    """G_theta(x, t) for a point x (or a radius)"""
    _check_time(t)
    r = _radius(x)
    if spec.method is KernelMethod.CLOSED_FORM_GAUSS:
        return _gauss(spec.n, r, t)
    if spec.method is KernelMethod.CLOSED_FORM_POISSON:
        return _poisson(spec.n, r, t)
    scale = t ** (-1.0 / spec.theta)
    unit = _unit_time_1d if spec.n == 1 else _unit_time_2d
    return scale ** spec.n * unit(scale * r, spec.theta)


def kernel_profile(spec: KernelSpec, radii, t: float) -> np.ndarray:
    """G_theta along a ray"""
    return np.array([kernel_eval(spec, r, t) for r in np.atleast_1d(radii)])


def majorant_eval(n: int, theta: float, x, t: float) -> float:
    """h_{theta,t}(x) = t^(-n/theta) (1 + t^(-1/theta) |x|)^(-n-theta)"""
    _check_time(t)
    r = _radius(x)
    return float(t ** (-n / theta) * (1.0 + t ** (-1.0 / theta) * r) ** (-n - theta))


@dataclass
class ComparabilityReport:
    """Range of G_theta / h_{theta,t} over a set of points"""
    radii: np.ndarray
    times: np.ndarray
    ratios: np.ndarray

    @property
    def lower(self) -> float:
        return float(self.ratios.min())

    @property
    def upper(self) -> float:
        return float(self.ratios.max())

    @property
    def spread(self) -> float:
        return self.upper / self.lower


def comparability(spec: KernelSpec, radii, times) -> ComparabilityReport:
    """G_theta / h_{theta,t} on every (radius, time) pair"""
    radii = np.asarray(radii, dtype=float)
    times = np.asarray(times, dtype=float)
    ratios = np.array([[kernel_eval(spec, r, t) / majorant_eval(spec.n, spec.theta, r, t)
                        for r in radii] for t in times])
    return ComparabilityReport(radii, times, ratios)


# Spectral semigroup

@dataclass(frozen=True)
class SemigroupSymbol:
    """Multiplier exp(-t |xi|^theta) on the frequency lattice of a grid"""
    grid: GridSpec
    t: float
    theta: float
    multiplier: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        require("t", self.t, lambda v: v >= 0.0, "t >= 0")
        multiplier = np.exp(-self.t * symbol_power(self.grid, self.theta))
        multiplier.setflags(write=False)
        object.__setattr__(self, 'multiplier', multiplier)


def symbol_power(grid: GridSpec, theta: float) -> np.ndarray:
    """|xi|^theta on the rfftn frequency lattice"""
    return grid.frequencies() ** theta


def product_integration_multiplier(grid: GridSpec, dt: float, theta: float) -> np.ndarray:
    """(1 - exp(-dt |xi|^theta)) / |xi|^theta, equal to dt at xi = 0"""
    a = symbol_power(grid, theta)
    with np.errstate(divide='ignore', invalid='ignore'):
        m = -np.expm1(-dt * a) / a
    return np.where(a > 0.0, m, dt)


def forward(grid: GridSpec, values: np.ndarray) -> np.ndarray:
    return fft.rfftn(values, axes=tuple(range(grid.n)))


def inverse(grid: GridSpec, spectrum: np.ndarray) -> np.ndarray:
    return fft.irfftn(spectrum, s=grid.shape, axes=tuple(range(grid.n)))


def semigroup_apply(kernel: Union[KernelSpec, SemigroupSymbol], t: float, phi: SampledFunction) -> SampledFunction:
    """S_theta(t) phi by forward transform, multiplier and inverse transform"""
    if t < 0.0:
        raise PreconditionError("t", "t >= 0", t)
    if t == 0.0:
        return phi
    if isinstance(kernel, SemigroupSymbol) and kernel.grid == phi.grid and kernel.t == t:
        symbol = kernel
    else:
        symbol = SemigroupSymbol(phi.grid, t, kernel.theta)
    values = inverse(phi.grid, forward(phi.grid, phi.values) * symbol.multiplier)
    return SampledFunction(phi.grid, values)


@dataclass
class SmoothingTrace:
    """||S(t) phi||_q t^{(n/theta)(1/r - 1/q)} / ||phi||_r over a t-grid"""
    t: np.ndarray
    ratio: np.ndarray

    @property
    def max_ratio(self) -> float:
        return float(self.ratio.max())


def smoothing_check(phi: SampledFunction, r: float, q: float, t_grid, spec: KernelSpec) -> SmoothingTrace:
    """L^r -> L^q smoothing ratios of the semigroup"""
    ExponentRules.ordered_pair(r, q)
    t_grid = np.asarray(t_grid, dtype=float)
    exponent = (phi.grid.n / spec.theta) * (1.0 / r - (0.0 if np.isinf(q) else 1.0 / q))
    source = phi.lp_norm(r)
    ratios = np.array([semigroup_apply(spec, t, phi).lp_norm(q) * t ** exponent / source for t in t_grid])
    return SmoothingTrace(t_grid, ratios)


def strong_continuity_trace(spec: KernelSpec, eta: SampledFunction, t_grid) -> np.ndarray:
    """||S(t) eta - eta||_inf for each t"""
    return np.array([float(np.max(np.abs(semigroup_apply(spec, t, eta).values - eta.values)))
                     for t in np.asarray(t_grid, dtype=float)])
