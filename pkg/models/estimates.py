# MODEL: Numerical verification of the weighted-integral and semigroup decay estimates
from dataclasses import dataclass
from typing import Optional
import logging

import numpy as np
import pandas as pd
from scipy import integrate

from constants import DECAY_COLUMNS, DEFAULT_T_MIN, DEFAULT_T_POINTS, QUAD_LIMIT, TAIL_SLOPE_LIMIT
from models.frac_kernel import KernelSpec, semigroup_apply
from models.rearrangement import rearrange
from models.sampled import GridSpec, SampledFunction, sample_radial
from models.zygmund import frak_norm, ul_frak_norm
from utils.errors import PreconditionError
from utils.predicates import ExponentRules
from utils.utils import geometric_points, log_weight, log_weight_at, tail_slope, unit_ball_volume

logger = logging.getLogger(__name__)

_QUAD = dict(epsabs=1e-15, epsrel=1e-12, limit=QUAD_LIMIT)


@dataclass
class DecayTrace:
    """Measured values against an envelope over a t- (or s-) grid"""
    t: np.ndarray
    measured: np.ndarray
    envelope: np.ndarray
    ratio: np.ndarray

    @classmethod
    def from_values(cls, t, measured, envelope, source: float = 1.0) -> 'DecayTrace':
        t, measured, envelope = (np.asarray(a, dtype=float) for a in (t, measured, envelope))
        return cls(t, measured, envelope, measured / (envelope * source))

    @property
    def max_ratio(self) -> float:
        return float(np.max(self.ratio)) if self.ratio.size else 0.0

    @property
    def min_ratio(self) -> float:
        return float(np.min(self.ratio)) if self.ratio.size else 0.0

    @property
    def tail_slope(self) -> float:
        """Slope of log(ratio) against log(t) over the smallest-t decade"""
        return tail_slope(self.t, self.ratio)

    def is_finite_positive(self) -> bool:
        return bool(np.all(np.isfinite(self.ratio)) and np.all(self.ratio > 0.0))

    def is_bounded(self) -> bool:
        """Finite, positive, and not growing toward the small-t end"""
        return self.is_finite_positive() and self.tail_slope > -TAIL_SLOPE_LIMIT

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(dict(zip(DECAY_COLUMNS, (self.t, self.measured, self.envelope, self.ratio))))


def default_t_grid(T: float = 1.0, points: int = DEFAULT_T_POINTS, t_min: float = DEFAULT_T_MIN) -> np.ndarray:
    """Geometric t-grid on [t_min, T]"""
    return geometric_points(t_min, T, points)


# Weighted integral bounds

def lemma31_lhs(variant: int, q: float, alpha: float, s: float) -> float:
    """The three weighted integrals at a single s, by quadrature in a log variable"""
    log_s = np.log(s)
    if variant == 1:
        # tau = s e^{-u}
        value, _ = integrate.quad(lambda u: np.exp(-(q + 1.0) * u) * log_weight_at(log_s - u, alpha),
                                  0.0, np.inf, **_QUAD)
        return s ** (q + 1.0) * value
    if variant == 2:
        value, _ = integrate.quad(lambda u: log_weight_at(log_s - u, alpha), 0.0, np.inf, **_QUAD)
        return value
    # tau = s e^{u}
    value, _ = integrate.quad(lambda u: np.exp((q + 1.0) * u) * log_weight_at(log_s + u, alpha),
                              0.0, np.inf, **_QUAD)
    return s ** (q + 1.0) * value


def _lemma31_envelope(variant: int, q: float, alpha: float, s: np.ndarray) -> np.ndarray:
    if variant == 2:
        return log_weight(s, alpha + 1.0)
    return s ** (q + 1.0) * log_weight(s, alpha)


def lemma31_check(variant: int, q: float, alpha: float, S: Optional[float], s_grid) -> DecayTrace:
    """Ratios of the weighted integrals to s^{q+1} L^alpha, L^{alpha+1}, s^{q+1} L^alpha"""
    s_grid = np.asarray(s_grid, dtype=float)
    if variant == 1 and not q > -1.0:
        raise PreconditionError("q", "q > -1 for variant 1", q)
    if variant == 2:
        if not alpha < -1.0:
            raise PreconditionError("alpha", "alpha < -1 for variant 2", alpha)
        if S is None or np.any(s_grid >= S):
            raise PreconditionError("s_grid", f"every s < S = {S}")
    if variant == 3 and not q < -1.0:
        raise PreconditionError("q", "q < -1 for variant 3", q)
    if variant not in (1, 2, 3):
        raise PreconditionError("variant", "1, 2 or 3", variant)
    measured = np.array([lemma31_lhs(variant, q, alpha, s) for s in s_grid])
    return DecayTrace.from_values(s_grid, measured, _lemma31_envelope(variant, q, alpha, s_grid))


def lemma31_closed_form_check(alpha: float, s_grid) -> float:
    """Max relative error of quadrature against int_0^s L^alpha/(e tau^2 + tau) = L(s)^{alpha+1}/(-(alpha+1))"""
    if not alpha < -1.0:
        raise PreconditionError("alpha", "alpha < -1", alpha)
    errors = []
    for s in np.asarray(s_grid, dtype=float):
        # tau = s e^{-u}: the integrand becomes L^alpha / (e tau + 1)
        value, _ = integrate.quad(lambda u: log_weight_at(np.log(s) - u, alpha) / (np.e * s * np.exp(-u) + 1.0),
                                  0.0, np.inf, **_QUAD)
        exact = float(log_weight(s, alpha + 1.0)) / (-(alpha + 1.0))
        errors.append(abs(value - exact) / exact)
    return float(max(errors))


def rearranged_majorant(n: int, theta: float, t: float, s):
    """h_t*(s) = h_t at |x| = (s/omega_n)^{1/n}"""
    radius = (np.asarray(s, dtype=float) / unit_ball_volume(n)) ** (1.0 / n)
    return t ** (-n / theta) * (1.0 + t ** (-1.0 / theta) * radius) ** (-n - theta)


def lemma32_lhs(n: int, theta: float, r: float, q: float, gamma: float, t: float) -> float:
    """int_0^inf tau^{q(1-1/r)} L(tau)^gamma h_t*(tau)^q dtau"""
    power = q * (1.0 - 1.0 / r)
    scale = unit_ball_volume(n) * t ** (n / theta)
    normalizer = t ** (-n * q / theta)
    shift = -np.log(t) / theta - np.log(unit_ball_volume(n)) / n

    def integrand(y):
        # tau = e^y and h_t*(tau) t^{n/theta} = (1 + e^z)^{-(n+theta)}
        z = shift + y / n
        exponent = (power + 1.0) * y - q * (n + theta) * np.logaddexp(0.0, z)
        return np.exp(exponent) * log_weight_at(y, gamma)

    pivot = np.log(scale)
    lower, _ = integrate.quad(integrand, -np.inf, pivot, **_QUAD)
    upper, _ = integrate.quad(integrand, pivot, np.inf, **_QUAD)
    return normalizer * (lower + upper)


def lemma32_check(n: int, theta: float, r: float, q: float, gamma: float, t_grid) -> DecayTrace:
    """Rearranged majorant integral against t^{-(nq/theta)(1/r-1/q)} L(t)^gamma"""
    ExponentRules.ordered_pair(r, q)
    if np.isinf(q):
        raise PreconditionError("q", "finite q", q)
    if r == q and gamma < 0.0:
        raise PreconditionError("gamma", "gamma >= 0 when r = q", gamma)
    t_grid = np.asarray(t_grid, dtype=float)
    measured = np.array([lemma32_lhs(n, theta, r, q, gamma, t) for t in t_grid])
    envelope = t_grid ** (-(n * q / theta) * (1.0 / r - 1.0 / q)) * log_weight(t_grid, gamma)
    return DecayTrace.from_values(t_grid, measured, envelope)


# Semigroup decay in the weak Zygmund-type norms

def decay_envelope(n: int, theta: float, r: float, q: float, alpha: float, beta: float, t) -> np.ndarray:
    """t^{-(n/theta)(1/r-1/q)} [log(e+1/t)]^{-alpha/r+beta/q}"""
    inverse_q = 0.0 if np.isinf(q) else 1.0 / q
    t = np.asarray(t, dtype=float)
    return t ** (-(n / theta) * (1.0 / r - inverse_q)) * log_weight(t, -alpha / r + beta * inverse_q)


def _decay_trace(phi: SampledFunction, r, q, alpha, beta, theta, t_grid, norm) -> DecayTrace:
    ExponentRules.decay_pair(r, q, alpha, beta)
    spec = KernelSpec(phi.grid.n, theta)
    t_grid = np.asarray(t_grid, dtype=float)
    source = norm(phi, r, alpha)
    measured = []
    for t in t_grid:
        evolved = semigroup_apply(spec, t, phi)
        measured.append(norm(evolved, q, beta))
    envelope = decay_envelope(phi.grid.n, theta, r, q, alpha, beta, t_grid)
    logger.debug("decay trace r=%s q=%s alpha=%s beta=%s source=%.6g", r, q, alpha, beta, source)
    return DecayTrace.from_values(t_grid, measured, envelope, source)


def prop31_check(phi: SampledFunction, r: float, q: float, alpha: float, beta: float,
                 theta: float, t_grid) -> DecayTrace:
    """||S(t) phi||_{q,beta} against the decay envelope times ||phi||_{r,alpha}"""
    return _decay_trace(phi, r, q, alpha, beta, theta, t_grid, frak_norm)


def prop32_check(phi: SampledFunction, r: float, q: float, alpha: float, beta: float,
                 theta: float, T: float, t_grid) -> DecayTrace:
    """Uniformly local version with balls of radius T^{1/theta}"""
    t_grid = np.asarray(t_grid, dtype=float)
    if np.any(t_grid > T):
        raise PreconditionError("t_grid", f"every t <= T = {T}")
    rho = T ** (1.0 / theta)

    def norm(f, exponent, weight_exponent):
        return ul_frak_norm(f, exponent, weight_exponent, rho)

    return _decay_trace(phi, r, q, alpha, beta, theta, t_grid, norm)


# Critical profile

@dataclass(frozen=True)
class PowerLogProfile:
    """x -> |x|^{-n} [log(e + 1/|x|)]^{-exponent} as a radial profile"""
    n: int
    exponent: float

    def __call__(self, radius):
        radius = np.asarray(radius, dtype=float)
        with np.errstate(divide='ignore'):
            return radius ** (-float(self.n)) * log_weight(radius, -self.exponent)

    def radial_mass(self, R: float, power: int) -> float:
        """int_0^R profile(r) r^power dr for power = n - 1"""
        if power != self.n - 1:
            raise PreconditionError("power", f"n - 1 = {self.n - 1}", power)
        a = self.exponent
        if a <= 1.0:
            raise PreconditionError("exponent", "> 1 for a finite mass at the origin", a)
        # int_0^R L^{-a} dr/r = L(R)^{1-a}/(a-1) + e int_0^R L^{-a}/(e r + 1) dr
        bounded, _ = integrate.quad(lambda r: log_weight(r, -a) / (np.e * r + 1.0), 0.0, R, **_QUAD)
        return float(log_weight_at(np.log(R), 1.0 - a) / (a - 1.0) + np.e * bounded)


def power_log_profile(n: int, exponent: float) -> PowerLogProfile:
    return PowerLogProfile(n, exponent)


def phi_c(n: int, theta: float, grid: GridSpec, radius: Optional[float] = 1.0) -> SampledFunction:
    """Critical profile |x|^{-n} [log(e+1/|x|)]^{-n/theta-1}, truncated to B(0, radius)"""
    if grid.n != n:
        raise PreconditionError("grid.n", f"grid dimension {n}", grid.n)
    return sample_radial(grid, power_log_profile(n, n / theta + 1.0), radius)


def phi_c_rearrangement_bound(phi: SampledFunction, n: int, theta: float, s_grid) -> DecayTrace:
    """phi*(s) against s^{-1} [log(e+1/s)]^{-n/theta-1}"""
    s_grid = np.asarray(s_grid, dtype=float)
    measured = rearrange(phi).value_at(s_grid)
    envelope = log_weight(s_grid, -n / theta - 1.0) / s_grid
    return DecayTrace.from_values(s_grid, measured, envelope)


def critical_data_norm(phi: SampledFunction, theta: float, T: float) -> float:
    """|||phi|||_{1,n/theta;T^{1/theta}}, the smallness quantity for local solvability"""
    return ul_frak_norm(phi, 1.0, phi.grid.n / theta, T ** (1.0 / theta))

