# MODEL: Weak Zygmund-type norms, their uniformly local versions and norm calculus
"""
Four norm families built on the decreasing rearrangement, all weighted by
w(s) = [log(e + 1/s)]^alpha:

    frak          sup_s { w(s) int_0^s (f*)^q }^(1/q)
    zygmund       { int_0^inf w(s) f*(s)^q ds }^(1/q)
    weak_zygmund  sup_s { w(s) s f*(s)^q }^(1/q)
    doublestar    sup_s { w(s) s f**(s)^q }^(1/q)

Suprema are taken over segment endpoints (with right limits), a geometric
s-grid and golden-section maxima inside every segment. Grid functions are
handled as uniform-width sorted rows so that many ball restrictions can be
evaluated in one vectorized pass.
"""
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Optional, Tuple, Union
import itertools
import logging

import numpy as np
from scipy import integrate

from constants import (FAMILY_DOUBLESTAR, FAMILY_FRAK, FAMILY_WEAK_ZYGMUND, FAMILY_ZYGMUND,
                       GAUSS_LEGENDRE_ORDER, GEOMETRIC_LOWER_FACTOR, GEOMETRIC_UPPER_FACTOR,
                       GOLDEN_SECTION_ITERATIONS, QUAD_EPSABS, QUAD_EPSREL, QUAD_LIMIT)
from models.rearrangement import Rearrangement, rearrange
from models.sampled import SampledFunction
from utils.errors import PreconditionError
from utils.predicates import ExponentRules, greater_than, require
from utils.utils import geometric_grid, log_weight, log_weight_at

logger = logging.getLogger(__name__)

NormInput = Union[SampledFunction, Rearrangement]

_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0
_FIRST_SEGMENT_DECADES = 40.0
_BALL_CHUNK_CELLS = 4_000_000


class NormFamily(Enum):
    FRAK = FAMILY_FRAK
    ZYGMUND = FAMILY_ZYGMUND
    WEAK_ZYGMUND = FAMILY_WEAK_ZYGMUND
    DOUBLESTAR = FAMILY_DOUBLESTAR


@dataclass(frozen=True)
class LogWeight:
    """s -> [log(e + 1/s)]^alpha"""
    alpha: float

    def __call__(self, s):
        return log_weight(s, self.alpha)


@dataclass(frozen=True)
class NormSpec:
    """Selects a norm family, its exponents and an optional ball radius"""
    family: NormFamily
    q: float
    alpha: float = 0.0
    rho: Optional[float] = None

    def __post_init__(self):
        ExponentRules.integrability(self.q)
        ExponentRules.log_exponent(self.alpha)
        if self.rho is not None:
            require("rho", self.rho, greater_than(0.0), "rho > 0")
            if self.family is not NormFamily.FRAK:
                raise PreconditionError("rho", "a ball radius only with the frak family", self.family.value)

    def evaluate(self, f: NormInput) -> float:
        if self.rho is not None:
            return ul_frak_norm(f, self.q, self.alpha, self.rho)
        evaluators = {
            NormFamily.FRAK: frak_norm,
            NormFamily.ZYGMUND: zygmund_norm,
            NormFamily.WEAK_ZYGMUND: weak_zygmund_norm,
            NormFamily.DOUBLESTAR: doublestar_norm,
        }
        return evaluators[self.family](f, self.q, self.alpha)


@dataclass
class _SegmentTable:
    """Rows of segments [lo, hi) carrying g = level and G(lo) = base = int_0^lo g.

    The last column of every row is the tail segment [s_K, inf).
    """
    lo: np.ndarray
    hi: np.ndarray
    level: np.ndarray
    base: np.ndarray
    tail_positive: bool = False
    cell: Optional[float] = None

    @classmethod
    def from_rearrangement(cls, r: Rearrangement, power: float) -> '_SegmentTable':
        g = r.levels ** power
        bp = r.breakpoints
        base = np.concatenate(([0.0], np.cumsum(g * r.widths)))
        return cls(lo=bp[None, :], hi=np.append(bp[1:], np.inf)[None, :],
                   level=np.append(g, r.tail ** power)[None, :], base=base[None, :],
                   tail_positive=r.tail > 0.0)

    @classmethod
    def from_sorted_rows(cls, rows: np.ndarray, cell: float, power: float) -> '_SegmentTable':
        """Rows of |values| sorted descending, each value one cell wide"""
        batch, count = rows.shape
        g = np.concatenate((rows ** power, np.zeros((batch, 1))), axis=1)
        edges = np.arange(count + 1) * cell
        lo = np.broadcast_to(edges, (batch, count + 1))
        hi = np.broadcast_to(np.append(edges[1:], np.inf), (batch, count + 1))
        base = np.concatenate((np.zeros((batch, 1)), np.cumsum(g[:, :-1], axis=1) * cell), axis=1)
        return cls(lo=lo, hi=hi, level=g, base=base, cell=cell)

    def locate(self, s: np.ndarray) -> np.ndarray:
        """Column index of the segment containing each s, shape (rows, len(s))"""
        last = self.lo.shape[1] - 1
        if self.cell is not None:
            index = np.clip(np.floor(s / self.cell).astype(int), 0, last)
            return np.broadcast_to(index, (self.lo.shape[0], s.size))
        index = np.searchsorted(self.lo[0], s, side='right') - 1
        return np.clip(index, 0, last)[None, :]

    def smallest_width(self) -> float:
        widths = (self.hi - self.lo)[:, :-1]
        positive = widths[widths > 0.0]
        return float(positive.min()) if positive.size else 0.0

    def largest_extent(self) -> float:
        return float(self.lo[:, -1].max())


def _profile(family: NormFamily, q: float, weight: LogWeight, s, lo, level, base):
    """Quantity whose supremum over s defines the weak norms (before the 1/q root)"""
    w = weight(s)
    if family is NormFamily.FRAK:
        return w * (base + level * (s - lo))
    if family is NormFamily.WEAK_ZYGMUND:
        return w * s * level
    return w * s * ((base + level * (s - lo)) / s) ** q


def _golden_maxima(evaluate, ya: np.ndarray, yb: np.ndarray) -> np.ndarray:
    """Vectorized golden-section search for maxima of evaluate(y) on [ya, yb]"""
    a, b = ya.copy(), yb.copy()
    for _ in range(GOLDEN_SECTION_ITERATIONS):
        c = b - _GOLDEN * (b - a)
        d = a + _GOLDEN * (b - a)
        left = evaluate(c) > evaluate(d)
        b = np.where(left, d, b)
        a = np.where(left, a, c)
    return evaluate(0.5 * (a + b))


def _supremum(table: _SegmentTable, family: NormFamily, q: float, alpha: float) -> np.ndarray:
    """sup_s of the family profile, one value per row"""
    weight = LogWeight(alpha)
    lo, hi, level, base = table.lo, table.hi, table.level, table.base
    nonempty = hi > lo
    finite = nonempty & np.isfinite(hi)

    with np.errstate(invalid='ignore', divide='ignore', over='ignore'):
        # left endpoints (f* is right-continuous, so the segment's own level applies)
        left_ok = nonempty & (lo > 0.0)
        s_left = np.where(left_ok, lo, 1.0)
        best = np.where(left_ok, _profile(family, q, weight, s_left, lo, level, base), 0.0)

        # right limits
        s_right = np.where(finite, hi, 1.0)
        right = np.where(finite, _profile(family, q, weight, s_right, lo, level, base), 0.0)
        best = np.maximum(best, right)

        # interior maxima in log s
        if finite.any():
            rows, cols = np.nonzero(finite)
            seg_lo, seg_hi = lo[rows, cols], hi[rows, cols]
            seg_level, seg_base = level[rows, cols], base[rows, cols]
            yb = np.log(seg_hi)
            ya = np.where(seg_lo > 0.0, np.log(np.where(seg_lo > 0.0, seg_lo, 1.0)),
                          yb - _FIRST_SEGMENT_DECADES * np.log(10.0))

            def evaluate(y):
                return _profile(family, q, weight, np.exp(y), seg_lo, seg_level, seg_base)

            interior = _golden_maxima(evaluate, ya, yb)
            interior = np.where(np.isfinite(interior), interior, 0.0)
            np.maximum.at(best, (rows, cols), interior)

        # geometric refinement grid
        smallest, extent = table.smallest_width(), table.largest_extent()
        if smallest > 0.0 and extent > 0.0:
            s_grid = geometric_grid(GEOMETRIC_LOWER_FACTOR * smallest, GEOMETRIC_UPPER_FACTOR * extent)
            index = table.locate(s_grid)
            row_index = np.arange(lo.shape[0])[:, None]
            grid_values = _profile(family, q, weight, s_grid[None, :], lo[row_index, index],
                                   level[row_index, index], base[row_index, index])
            grid_values = np.where(np.isfinite(grid_values), grid_values, 0.0)
            return np.maximum(best.max(axis=1), grid_values.max(axis=1))
    return best.max(axis=1)


def _validate(q: float, alpha: float) -> None:
    ExponentRules.integrability(q)
    ExponentRules.log_exponent(alpha)


def _table(f: NormInput, power: float) -> _SegmentTable:
    if isinstance(f, Rearrangement):
        return _SegmentTable.from_rearrangement(f, power)
    rows = -np.sort(-np.abs(f.values).ravel())[None, :]
    return _SegmentTable.from_sorted_rows(rows, f.grid.cell_measure, power)


def _sup_of(f: NormInput) -> float:
    return f.sup() if isinstance(f, Rearrangement) else f.sup_norm()


def _weak_norm(f: NormInput, q: float, alpha: float, family: NormFamily) -> float:
    _validate(q, alpha)
    if np.isinf(q):
        return _sup_of(f)
    power = 1.0 if family is NormFamily.DOUBLESTAR else q
    table = _table(f, power)
    if table.tail_positive:
        return np.inf
    supremum = float(_supremum(table, family, q, alpha)[0])
    return supremum ** (1.0 / q)


def frak_norm(f: NormInput, q: float, alpha: float) -> float:
    """sup_s { w(s) int_0^s (f*)^q }^(1/q); q = inf gives ||f||_inf"""
    return _weak_norm(f, q, alpha, NormFamily.FRAK)


def weak_zygmund_norm(f: NormInput, q: float, alpha: float) -> float:
    """sup_s { w(s) s f*(s)^q }^(1/q)"""
    return _weak_norm(f, q, alpha, NormFamily.WEAK_ZYGMUND)


def doublestar_norm(f: NormInput, q: float, alpha: float) -> float:
    """sup_s { w(s) s f**(s)^q }^(1/q)"""
    return _weak_norm(f, q, alpha, NormFamily.DOUBLESTAR)


def weight_integrals(lo: np.ndarray, hi: np.ndarray, alpha: float) -> np.ndarray:
    """int_lo^hi [log(e + 1/s)]^alpha ds for every segment"""
    lo, hi = np.asarray(lo, dtype=float), np.asarray(hi, dtype=float)
    if alpha == 0.0:
        return hi - lo
    weight = LogWeight(alpha)
    result = np.zeros(lo.shape)
    wide = (lo <= 0.0) | (hi > 4.0 * lo)
    narrow = ~wide & (hi > lo)

    # Gauss-Legendre in log s on the narrow segments
    nodes, weights = np.polynomial.legendre.leggauss(GAUSS_LEGENDRE_ORDER)
    ya, yb = np.log(lo[narrow]), np.log(hi[narrow])
    half, mid = 0.5 * (yb - ya), 0.5 * (yb + ya)
    y = mid[:, None] + half[:, None] * nodes[None, :]
    s = np.exp(y)
    result[narrow] = half * np.sum(weights[None, :] * weight(s) * s, axis=1)

    options = dict(epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL, limit=QUAD_LIMIT)

    def integrand(y):
        # s w(s) with s = e^y; finite even where e^y underflows
        return float(np.exp(y) * log_weight_at(y, alpha))

    for i in np.flatnonzero(wide & (hi > lo)):
        a, b = lo[i], hi[i]
        if a <= 0.0:
            value, _ = integrate.quad(integrand, -np.inf, np.log(b), **options)
        else:
            value, _ = integrate.quad(integrand, np.log(a), np.log(b), **options)
        result[i] = value
    return result


def zygmund_norm(f: NormInput, q: float, alpha: float) -> float:
    """{ int_0^inf w(s) f*(s)^q ds }^(1/q)"""
    _validate(q, alpha)
    if np.isinf(q):
        return _sup_of(f)
    r = f if isinstance(f, Rearrangement) else rearrange(f)
    if r.tail > 0.0:
        return np.inf
    integrals = weight_integrals(r.breakpoints[:-1], r.breakpoints[1:], alpha)
    return float(np.sum(r.levels ** q * integrals)) ** (1.0 / q)


# Uniformly local norms

def ball_centres(f: SampledFunction, rho: float) -> np.ndarray:
    """Lattice of spacing rho/2 anchored at 0 over the support box inflated by rho"""
    box = f.support_box()
    if box is None:
        return np.zeros((0, f.grid.n))
    spacing = rho / 2.0
    axes = []
    for lower, upper in zip(*box):
        lower = max(lower - rho, -f.grid.L)
        upper = min(upper + rho, f.grid.L)
        k = np.arange(np.ceil(lower / spacing), np.floor(upper / spacing) + 1)
        axes.append(k * spacing)
    return np.array(list(itertools.product(*axes)), dtype=float).reshape(-1, f.grid.n)


def _ball_rows(f: SampledFunction, rho: float) -> Iterator[Tuple[np.ndarray, np.ndarray]]:
    """Yield (sorted |f| rows, cell counts) for chunks of ball centres"""
    grid = f.grid
    centres = ball_centres(f, rho)
    coords = [c.ravel() for c in grid.coordinates()]
    magnitudes = np.abs(f.values).ravel()
    period = 2.0 * grid.L
    chunk = max(1, _BALL_CHUNK_CELLS // magnitudes.size)
    for start in range(0, centres.shape[0], chunk):
        block = centres[start:start + chunk]
        squared = np.zeros((block.shape[0], magnitudes.size))
        for axis, coord in enumerate(coords):
            d = np.abs(coord[None, :] - block[:, axis:axis + 1]) % period
            d = np.minimum(d, period - d)
            squared += d ** 2
        inside = squared < rho ** 2
        rows = np.where(inside, magnitudes[None, :], 0.0)
        width = max(int(inside.sum(axis=1).max()), 1)
        rows = -np.sort(-rows, axis=1)[:, :width]
        yield rows, inside.sum(axis=1)


def ul_frak_norm(f: SampledFunction, q: float, alpha: float, rho: float) -> float:
    """|||f|||_{q,alpha;rho}: max over ball centres of frak_norm(f chi_B(z,rho))"""
    _validate(q, alpha)
    require("rho", rho, greater_than(0.0), "rho > 0")
    best = 0.0
    for rows, _ in _ball_rows(f, rho):
        if np.isinf(q):
            best = max(best, float(rows[:, 0].max()))
            continue
        table = _SegmentTable.from_sorted_rows(rows, f.grid.cell_measure, q)
        best = max(best, float(_supremum(table, NormFamily.FRAK, q, alpha).max()))
    logger.debug("uniformly local norm over balls of radius %g: %g", rho, best)
    return best if np.isinf(q) else best ** (1.0 / q)


def largest_ball_measure(f: SampledFunction, rho: float) -> float:
    """Largest discrete measure |B(z, rho)| over the centre lattice"""
    counts = [int(c.max()) for _, c in _ball_rows(f, rho)]
    return max(counts, default=0) * f.grid.cell_measure


def _norm(f: SampledFunction, q: float, alpha: float, rho: Optional[float]) -> float:
    return frak_norm(f, q, alpha) if rho is None else ul_frak_norm(f, q, alpha, rho)


# Norm calculus

def holder_product_check(f1: SampledFunction, f2: SampledFunction, q1: float, q2: float,
                         alpha1: float, alpha2: float, rho: Optional[float] = None) -> Tuple[float, float]:
    """||f1 f2||_{1,alpha} against ||f1||_{q1,alpha1} ||f2||_{q2,alpha2}"""
    alpha = ExponentRules.holder_relation(q1, q2, alpha1, alpha2)
    lhs = _norm(f1.multiply(f2), 1.0, alpha, rho)
    rhs = _norm(f1, q1, alpha1, rho) * _norm(f2, q2, alpha2, rho)
    return lhs, rhs


def power_identity_check(f: SampledFunction, r: float, q: float, alpha: float,
                         rho: Optional[float] = None) -> Tuple[float, float]:
    """|| |f|^r ||_{q,alpha} against ||f||_{rq,alpha}^r"""
    if r * q < 1.0:
        raise PreconditionError("r*q", "r*q >= 1", r * q)
    lhs = _norm(f.pointwise_pow(r), q, alpha, rho)
    rhs = _norm(f, r * q, alpha, rho) ** r
    return lhs, rhs


def log_interpolation(f: SampledFunction, alpha: float, beta: float, rho: float) -> Tuple[float, float]:
    """|||f|||_{1,alpha;rho} against [log(e + 1/|B|)]^(alpha-beta) |||f|||_{1,beta;rho}

    |B| is the largest discrete ball measure, for which the constant is 1.
    """
    if alpha > beta:
        raise PreconditionError("alpha", f"alpha <= beta = {beta}", alpha)
    lhs = ul_frak_norm(f, 1.0, alpha, rho)
    measure = largest_ball_measure(f, rho)
    factor = float(log_weight(measure, alpha - beta)) if measure > 0.0 else 1.0
    rhs = factor * ul_frak_norm(f, 1.0, beta, rho)
    return lhs, rhs
