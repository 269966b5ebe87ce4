# MODEL: Comparisons between the weak Zygmund-type space and classical Zygmund spaces
from typing import Dict, Iterable, List, Sequence, Tuple
import logging

import numpy as np
import pandas as pd
from scipy import integrate, special

from constants import APPENDIX_A1_COLUMNS, APPENDIX_A2_COLUMNS, INEQUALITY_RTOL, QUAD_LIMIT
from models.estimates import power_log_profile
from models.rearrangement import Rearrangement, rearrange
from models.sampled import GridSpec, SampledFunction, sample_radial
from models.zygmund import NormInput, doublestar_norm, frak_norm, weak_zygmund_norm, zygmund_norm
from utils.errors import PreconditionError
from utils.utils import geometric_grid, log_weight, log_weight_at

logger = logging.getLogger(__name__)

_QUAD = dict(epsabs=1e-15, epsrel=1e-12, limit=QUAD_LIMIT)


# Analytic rearrangements

def _right_endpoint_steps(profile, s_min: float, s_max: float, per_decade: int) -> Rearrangement:
    """Step function taking profile(b) on each geometric cell (a, b] of [0, s_max]"""
    right = geometric_grid(s_min, s_max, per_decade)
    widths = np.diff(np.concatenate(([0.0], right)))
    return Rearrangement.from_levels(profile(right), widths)


def fn_family(index: int, alpha: float) -> Rearrangement:
    """f_n*(s) = n [log(e+n)]^{-alpha-1} on (0, 1/n)"""
    if index < 1:
        raise PreconditionError("n", "n >= 1", index)
    level = index * float(np.log(np.e + index)) ** (-alpha - 1.0)
    return Rearrangement.from_levels([level], [1.0 / index])


def weak_zygmund_witness(q: float, alpha: float, delta: float, s_min: float,
                         per_decade: int = 16) -> Rearrangement:
    """f*(s) = s^{-1/q} [log(e+1/s)]^{-alpha/q} on (0, delta): weak Zygmund norm 1, frak norm unbounded"""
    return _right_endpoint_steps(lambda s: s ** (-1.0 / q) * log_weight(s, -alpha / q), s_min, delta, per_decade)


def zygmund_gap_witness(q: float, alpha: float, delta: float, s_min: float,
                        per_decade: int = 16) -> Rearrangement:
    """f* = (g*)^{1/q}, g*(s) = alpha/(e s^2 + s) [log(e+1/s)]^{-alpha-1} on (0, delta)

    The frak norm stays at most 1 while the Zygmund norm grows without bound.
    """
    def profile(s):
        return (alpha / (np.e * s ** 2 + s) * log_weight(s, -alpha - 1.0)) ** (1.0 / q)
    return _right_endpoint_steps(profile, s_min, delta, per_decade)


def power_log_rearrangement(exponent: float, s_min: float, s_max: float = 1.0,
                            per_decade: int = 16) -> Rearrangement:
    """f*(s) = s^{-1} [log(e+1/s)]^{-exponent} on (0, s_max)"""
    return _right_endpoint_steps(lambda s: log_weight(s, -exponent) / s, s_min, s_max, per_decade)


def appendix_a2_trace(alpha: float, indices: Sequence[int]) -> pd.DataFrame:
    """frak_norm(f_n, 1, alpha) / weak_zygmund_norm(f_n, 1, alpha+1) along the f_n family"""
    rows = []
    for index in indices:
        r = fn_family(index, alpha)
        frak = frak_norm(r, 1.0, alpha)
        weak = weak_zygmund_norm(r, 1.0, alpha + 1.0)
        rows.append((index, frak, weak, frak / weak))
    return pd.DataFrame(rows, columns=APPENDIX_A2_COLUMNS)


def appendix_a1_trace(q: float, alpha: float, delta: float, s_mins: Iterable[float],
                      per_decade: int = 16) -> pd.DataFrame:
    """Norms of the weak Zygmund witness as its singular part is resolved; ratio = frak / weak"""
    rows = []
    for s_min in s_mins:
        r = weak_zygmund_witness(q, alpha, delta, s_min, per_decade)
        frak = frak_norm(r, q, alpha)
        weak = weak_zygmund_norm(r, q, alpha)
        rows.append((s_min, frak, weak, zygmund_norm(r, q, alpha), frak / weak))
    return pd.DataFrame(rows, columns=APPENDIX_A1_COLUMNS)


def zygmund_gap_trace(q: float, alpha: float, delta: float, s_mins: Iterable[float],
                      per_decade: int = 16) -> pd.DataFrame:
    """Norms of the Zygmund gap witness; ratio = zygmund / frak"""
    rows = []
    for s_min in s_mins:
        r = zygmund_gap_witness(q, alpha, delta, s_min, per_decade)
        frak = frak_norm(r, q, alpha)
        zygmund = zygmund_norm(r, q, alpha)
        rows.append((s_min, frak, weak_zygmund_norm(r, q, alpha), zygmund, zygmund / frak))
    return pd.DataFrame(rows, columns=APPENDIX_A1_COLUMNS)


# Inclusion chain

def inclusion_corpus(grid: GridSpec, seed: int) -> List[Tuple[str, SampledFunction]]:
    """30 test functions: indicators, truncated power-log profiles and random steps"""
    rng = np.random.default_rng(seed)
    corpus: List[Tuple[str, SampledFunction]] = []
    r = grid.radius()
    for k in range(10):
        radius = grid.h * (1 + rng.integers(1, grid.M // 4))
        corpus.append((f"indicator_{k}", SampledFunction(grid, (r < radius).astype(float))))
    for k in range(10):
        exponent = 1.5 + 0.25 * k
        corpus.append((f"power_log_{k}", sample_radial(grid, power_log_profile(grid.n, exponent), radius=1.0)))
    for k in range(10):
        blocks = rng.integers(2, 9)
        edges = np.sort(rng.choice(grid.M, size=blocks, replace=False))
        levels = rng.uniform(0.0, 3.0, size=blocks)
        axis_values = np.zeros(grid.M)
        for start, stop, level in zip(edges[:-1], edges[1:], levels):
            axis_values[start:stop] = level
        values = axis_values if grid.n == 1 else np.outer(axis_values, axis_values)
        corpus.append((f"random_steps_{k}", SampledFunction(grid, values)))
    return corpus


def inclusion_chain_check(f: NormInput, q: float, alpha: float) -> Dict[str, float]:
    """weak_zygmund <= frak <= zygmund"""
    weak = weak_zygmund_norm(f, q, alpha)
    frak = frak_norm(f, q, alpha)
    zygmund = zygmund_norm(f, q, alpha)
    holds = weak <= frak * (1.0 + INEQUALITY_RTOL) and frak <= zygmund * (1.0 + INEQUALITY_RTOL)
    return {"weak_zygmund": weak, "frak": frak, "zygmund": zygmund, "holds": holds}


def fitted_a2_constant(corpus: Iterable[NormInput], q: float, alpha: float) -> np.ndarray:
    """frak_norm(f, q, alpha) / weak_zygmund_norm(f, q, alpha+1) for each f"""
    ratios = []
    for f in corpus:
        weak = weak_zygmund_norm(f, q, alpha + 1.0)
        if weak > 0.0:
            ratios.append(frak_norm(f, q, alpha) / weak)
        else:
            logger.debug("skipping a function with zero weak Zygmund norm")
    return np.array(ratios)


# Exchanging f* and f**

def doublestar_reverse_check(f: NormInput, p: float, alpha: float) -> Tuple[float, float]:
    """doublestar(|f|^p, 1, alpha) against doublestar(f, p, alpha)^p; lhs >= rhs"""
    powered = f.power(p) if isinstance(f, Rearrangement) else f.pointwise_pow(p)
    return doublestar_norm(powered, 1.0, alpha), doublestar_norm(f, p, alpha) ** p


def zygmund_parts_identity(f: NormInput, alpha: float) -> Tuple[float, float]:
    """int L^alpha f* against alpha int L^{alpha-1} f**/(es+1) ds + ||f||_1"""
    r = f if isinstance(f, Rearrangement) else rearrange(f)
    lhs = zygmund_norm(r, 1.0, alpha)
    total = r.mass()
    bp = r.breakpoints
    integral = 0.0
    for k in range(r.size + 1):
        a = bp[k]
        b = bp[k + 1] if k < r.size else np.inf
        slope = r.levels[k] if k < r.size else 0.0
        intercept = float(r.cumulative(a)) - slope * a

        # f** = (intercept + slope s)/s on [a, b), in the variable y = log s;
        # 1/(e s + 1) = expit(-(y + 1)) and s/(e s + 1) = expit(y + 1)/e stay finite for every y
        def integrand(y):
            spread = intercept * special.expit(-(y + 1.0)) + slope * special.expit(y + 1.0) / np.e
            return log_weight_at(y, alpha - 1.0) * spread

        lower = np.log(a) if a > 0.0 else -np.inf
        value, _ = integrate.quad(integrand, lower, np.log(b), **_QUAD)
        integral += value
    return lhs, alpha * integral + total


def fstar_ratio_trace(r: Rearrangement, s_grid) -> np.ndarray:
    """f*(s) / f**(s)"""
    s_grid = np.asarray(s_grid, dtype=float)
    return r.value_at(s_grid) / r.maximal_average(s_grid)
