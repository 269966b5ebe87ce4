# MODEL: Mild solutions at the critical exponent by Picard iteration of the Duhamel map
"""
u(t) = S(t) phi + int_0^t S(t - s) F_p(u(s)) ds,  p = 1 + theta/n.

Time is discretized on t_k = k T / N_t, k = 1..N_t. Each panel of the Duhamel
integral uses exponential product integration: the semigroup is applied
exactly in Fourier space and F_p is frozen at a node value.
"""
from dataclasses import dataclass, field, replace
from typing import List, Optional, Tuple
import logging

import numpy as np
import pandas as pd

from constants import (BLOWUP_FACTOR, BRACKET_RATIO_TARGET, CONTRACTION_RATIO_LIMIT, DEFAULT_MAX_SWEEPS,
                       DEFAULT_SWEEP_TOLERANCE, MAX_BISECTIONS, METRIC_COLUMNS, SCAN_COLUMNS,
                       STATUS_BLOWUP, STATUS_CONVERGED, STATUS_MAX_SWEEPS, SWEEP_COLUMNS)
from models.frac_kernel import (KernelSpec, forward, inverse, product_integration_multiplier,
                                symbol_power)
from models.sampled import GridSpec, SampledFunction, axpy, sample, signed_power
from models.zygmund import ul_frak_norm
from utils.errors import BracketError, NotConvergedError, PreconditionError
from utils.predicates import at_least, greater_than, in_range, require
from utils.utils import log_weight

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SolverConfig:
    """Discretization and stopping rules for the critical problem"""
    kernel: KernelSpec
    grid: GridSpec
    T: float
    n_steps: int
    gamma: float = 0.0
    max_sweeps: int = DEFAULT_MAX_SWEEPS
    tolerance: float = DEFAULT_SWEEP_TOLERANCE
    blowup_factor: float = BLOWUP_FACTOR

    def __post_init__(self):
        if self.grid.n != self.kernel.n:
            raise PreconditionError("grid.n", f"kernel dimension {self.kernel.n}", self.grid.n)
        require("T", self.T, greater_than(0.0), "T > 0")
        require("n_steps", self.n_steps, at_least(1), "n_steps >= 1")
        require("gamma", self.gamma, in_range(0.0, self.alpha), f"0 <= gamma < n/theta = {self.alpha}")
        require("max_sweeps", self.max_sweeps, at_least(1), "max_sweeps >= 1")
        require("tolerance", self.tolerance, greater_than(0.0), "tolerance > 0")

    @property
    def p(self) -> float:
        """Always the critical exponent 1 + theta/n"""
        return self.kernel.critical_exponent

    @property
    def alpha(self) -> float:
        return self.kernel.alpha

    @property
    def theta(self) -> float:
        return self.kernel.theta

    @property
    def rho(self) -> float:
        """Ball radius T^{1/theta} of the uniformly local norms"""
        return self.T ** (1.0 / self.theta)

    @property
    def dt(self) -> float:
        return self.T / self.n_steps

    def times(self) -> np.ndarray:
        return self.dt * np.arange(1, self.n_steps + 1)

    def refined(self, factor: int = 2) -> 'SolverConfig':
        """Same problem with factor times more time steps"""
        return replace(self, n_steps=self.n_steps * factor)


@dataclass
class MetricTraces:
    """sup-norm and the three weighted metrics along the time grid"""
    t: np.ndarray
    sup_norm: np.ndarray
    m1: np.ndarray
    m2: np.ndarray
    m3: np.ndarray

    @property
    def suprema(self) -> Tuple[float, float, float]:
        return float(self.m1.max()), float(self.m2.max()), float(self.m3.max())

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(dict(zip(METRIC_COLUMNS, (self.t, self.sup_norm, self.m1, self.m2, self.m3))))


@dataclass
class SolutionTrajectory:
    """Snapshots u(t_k), the Picard distance history and the outcome"""
    grid: GridSpec
    times: np.ndarray
    snapshots: np.ndarray = field(repr=False)
    distances: List[Tuple[float, float, float]] = field(default_factory=list)
    status: Optional[str] = None
    t_event: Optional[float] = None
    metrics: Optional[MetricTraces] = None

    @property
    def sweeps(self) -> int:
        return len(self.distances)

    def snapshot(self, k: int) -> SampledFunction:
        """u(t_{k+1}) as a sampled function"""
        return SampledFunction(self.grid, self.snapshots[k], allow_nonfinite=self.status == STATUS_BLOWUP)

    def sup_norms(self) -> np.ndarray:
        return np.max(np.abs(self.snapshots.reshape(self.times.size, -1)), axis=1)

    def distance_totals(self) -> np.ndarray:
        return np.array([sum(d) for d in self.distances])

    def contraction_ratios(self) -> np.ndarray:
        """d_X(u^{k+1}, u^k) / d_X(u^k, u^{k-1}) for consecutive sweeps"""
        totals = self.distance_totals()
        if totals.size < 2:
            return np.array([])
        with np.errstate(divide='ignore', invalid='ignore'):
            return np.where(totals[:-1] > 0.0, totals[1:] / totals[:-1], 0.0)

    def contraction_certified(self, sweeps: int = 3, limit: float = CONTRACTION_RATIO_LIMIT) -> bool:
        """Last ratios (at most three) are at most the limit"""
        ratios = self.contraction_ratios()[-sweeps:]
        return self.status == STATUS_CONVERGED and bool(np.all(ratios <= limit))

    def sweep_frame(self) -> pd.DataFrame:
        rows = [(k + 1,) + tuple(d) for k, d in enumerate(self.distances)]
        return pd.DataFrame(rows, columns=SWEEP_COLUMNS)


# Time stepping

def linear_trajectory(cfg: SolverConfig, phi: SampledFunction) -> SolutionTrajectory:
    """u(t_k) = S(t_k) phi"""
    _check_data(cfg, phi)
    a = symbol_power(cfg.grid, cfg.theta)
    phi_hat = forward(cfg.grid, phi.values)
    times = cfg.times()
    snapshots = np.stack([inverse(cfg.grid, phi_hat * np.exp(-t * a)) for t in times])
    return SolutionTrajectory(cfg.grid, times, snapshots)


def duhamel_map(cfg: SolverConfig, phi: SampledFunction, u: SolutionTrajectory) -> SolutionTrajectory:
    """Phi(u) at every t_k; the first panel [0, t_1] uses u(t_1)"""
    _check_data(cfg, phi)
    grid = cfg.grid
    a = symbol_power(grid, cfg.theta)
    step = np.exp(-cfg.dt * a)
    panel = product_integration_multiplier(grid, cfg.dt, cfg.theta)
    phi_hat = forward(grid, phi.values)
    sup0 = phi.sup_norm()
    cap = cfg.blowup_factor * sup0 if sup0 > 0.0 else np.inf

    times = cfg.times()
    out = np.full_like(u.snapshots, np.inf)
    accumulated = np.zeros_like(phi_hat)
    with np.errstate(over='ignore', invalid='ignore'):
        for i, t in enumerate(times):
            # left endpoint of [t_{i-1}, t_i]; the first panel has no u(0) and takes u(t_1)
            node = u.snapshots[0] if i == 0 else u.snapshots[i - 1]
            accumulated = step * accumulated + panel * forward(grid, signed_power(node, cfg.p))
            values = inverse(grid, phi_hat * np.exp(-t * a) + accumulated)
            if not np.all(np.isfinite(values)) or np.max(np.abs(values)) > cap:
                logger.info("blow-up cap exceeded at t=%.6g", t)
                return SolutionTrajectory(grid, times, out, list(u.distances), STATUS_BLOWUP, float(t))
            out[i] = values
    return SolutionTrajectory(grid, times, out, list(u.distances))


def _check_data(cfg: SolverConfig, phi: SampledFunction) -> None:
    if phi.grid != cfg.grid:
        raise PreconditionError("phi.grid", f"solver grid {cfg.grid}", phi.grid)


# Metrics

def _metric_traces(cfg: SolverConfig, times: np.ndarray, snapshots: np.ndarray) -> MetricTraces:
    n, theta, p, alpha, rho = cfg.grid.n, cfg.theta, cfg.p, cfg.alpha, cfg.rho
    sup_norm, m1, m2, m3 = [], [], [], []
    for t, values in zip(times, snapshots):
        f = SampledFunction(cfg.grid, values)
        sup = f.sup_norm()
        sup_norm.append(sup)
        m1.append(ul_frak_norm(f, 1.0, alpha, rho))
        weight2 = t ** ((n / theta) * (1.0 - 1.0 / p)) * float(log_weight(t, -cfg.gamma / p + alpha))
        m2.append(weight2 * ul_frak_norm(f, p, cfg.gamma, rho))
        m3.append(t ** (n / theta) * float(log_weight(t, alpha)) * sup)
    return MetricTraces(times, *(np.array(v) for v in (sup_norm, m1, m2, m3)))


def xt_metrics(cfg: SolverConfig, u: SolutionTrajectory) -> MetricTraces:
    """m1, m2, m3 of a finite trajectory on t_1..t_N"""
    if not np.all(np.isfinite(u.snapshots)):
        raise PreconditionError("u", "a finite trajectory")
    return _metric_traces(cfg, u.times, u.snapshots)


def xt_distance(cfg: SolverConfig, u: SolutionTrajectory, v: SolutionTrajectory) -> Tuple[float, float, float]:
    """(d1, d2, d3) between two trajectories"""
    traces = _metric_traces(cfg, u.times, u.snapshots - v.snapshots)
    return traces.suprema


def picard_solve(cfg: SolverConfig, phi: SampledFunction) -> SolutionTrajectory:
    """Iterate u^{k+1} = Phi(u^k) from u^0(t) = S(t) phi"""
    u = linear_trajectory(cfg, phi)
    scale = sum(xt_metrics(cfg, u).suprema)
    threshold = cfg.tolerance * scale
    for sweep in range(1, cfg.max_sweeps + 1):
        following = duhamel_map(cfg, phi, u)
        if following.status == STATUS_BLOWUP:
            following.distances.append((np.inf, np.inf, np.inf))
            return following
        with np.errstate(over='ignore', invalid='ignore'):
            distance = xt_distance(cfg, following, u)
        following.distances.append(distance)
        u = following
        total = sum(distance)
        logger.debug("sweep %d: d_X = %.3e", sweep, total)
        if not np.isfinite(total):
            u.status, u.t_event = STATUS_BLOWUP, float(u.times[-1])
            return u
        if total <= threshold:
            u.status = STATUS_CONVERGED
            u.metrics = xt_metrics(cfg, u)
            logger.info("converged after %d sweeps", sweep)
            return u
    logger.warning("no convergence within %d sweeps", cfg.max_sweeps)
    u.status = STATUS_MAX_SWEEPS
    u.metrics = xt_metrics(cfg, u)
    return u


# Initial trace

def smooth_bump(grid: GridSpec, radius: float = 1.0) -> SampledFunction:
    """exp(-1/(1 - |x/radius|^2)) inside the ball, 0 outside"""
    def bump(*coords):
        r2 = sum(c ** 2 for c in coords) / radius ** 2
        return np.where(r2 < 1.0, np.exp(-1.0 / np.where(r2 < 1.0, 1.0 - r2, 1.0)), 0.0)
    return sample(grid, bump)


@dataclass
class InitialTraceReport:
    """|||u(t) - S(t) phi|||_{1,beta;rho} and |<u(t) - phi, eta>| along the time grid"""
    t: np.ndarray
    trace: np.ndarray
    pairing: np.ndarray

    @property
    def decay_factor(self) -> float:
        """trace(t_1) / max trace"""
        peak = float(self.trace.max())
        return float(self.trace[0]) / peak if peak > 0.0 else 0.0

    def decays(self, factor: float = 0.1) -> bool:
        return self.decay_factor < factor

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"t": self.t, "trace": self.trace, "pairing": self.pairing})


def initial_trace_check(cfg: SolverConfig, phi: SampledFunction, u: SolutionTrajectory,
                        beta: float) -> InitialTraceReport:
    """Approach of u(t) to the data as t -> 0, in the weak norm and against a bump"""
    if u.status != STATUS_CONVERGED:
        raise NotConvergedError(f"initial trace needs a converged trajectory, got {u.status}")
    require("beta", beta, in_range(0.0, cfg.alpha), f"0 <= beta < n/theta = {cfg.alpha}")
    linear = linear_trajectory(cfg, phi)
    eta = smooth_bump(cfg.grid)
    trace, pairing = [], []
    for k in range(u.times.size):
        difference = axpy(-1.0, linear.snapshot(k), u.snapshot(k))
        trace.append(ul_frak_norm(difference, 1.0, beta, cfg.rho))
        pairing.append(abs(u.snapshot(k).pair(eta) - phi.pair(eta)))
    return InitialTraceReport(u.times, np.array(trace), np.array(pairing))


# Threshold scan

@dataclass
class ThresholdBracket:
    """Largest converging and smallest blowing-up amplitude found by the scan.

    Amplitudes that ran out of sweeps neither converge nor blow up; they are
    kept in inconclusive and never move the bracket.
    """
    eps_ok: float
    eps_blow: float
    ok_run: SolutionTrajectory = field(repr=False)
    blow_run: SolutionTrajectory = field(repr=False)
    history: List[Tuple[float, str, int, Optional[float]]] = field(default_factory=list, repr=False)
    inconclusive: List[float] = field(default_factory=list)

    @property
    def ratio(self) -> float:
        return self.eps_blow / self.eps_ok

    @property
    def resolved(self) -> bool:
        """No inconclusive amplitude between eps_ok and eps_blow"""
        return not any(self.eps_ok < eps < self.eps_blow for eps in self.inconclusive)

    def to_frame(self) -> pd.DataFrame:
        rows = [(eps, status, sweeps, np.nan if t is None else t) for eps, status, sweeps, t in self.history]
        return pd.DataFrame(rows, columns=SCAN_COLUMNS)


def _attempt(cfg: SolverConfig, profile: SampledFunction, eps: float, history: list) -> SolutionTrajectory:
    run = picard_solve(cfg, profile.scaled(eps))
    history.append((float(eps), run.status, run.sweeps, run.t_event))
    logger.info("eps=%.6g -> %s after %d sweeps", eps, run.status, run.sweeps)
    return run


def epsilon_threshold_scan(cfg: SolverConfig, profile: SampledFunction, eps_grid,
                           ratio_target: float = BRACKET_RATIO_TARGET) -> ThresholdBracket:
    """Bracket the amplitude separating convergence from blow-up, refined by geometric bisection"""
    eps_grid = np.asarray(eps_grid, dtype=float)
    if eps_grid.size < 2 or np.any(np.diff(eps_grid) <= 0.0) or eps_grid[0] <= 0.0:
        raise PreconditionError("eps_grid", "at least two positive ascending amplitudes")
    history: list = []
    inconclusive: List[float] = []
    ok_run: Optional[SolutionTrajectory] = None
    eps_ok = None
    for eps in eps_grid:
        run = _attempt(cfg, profile, eps, history)
        if run.status == STATUS_MAX_SWEEPS:
            inconclusive.append(float(eps))
            continue
        if run.status == STATUS_BLOWUP:
            if ok_run is None:
                raise BracketError(f"amplitude {eps:.6g} blows up before any amplitude converges; "
                                   "widen the grid downward")
            eps_blow, blow_run = float(eps), run
            break
        ok_run, eps_ok = run, float(eps)
    else:
        raise BracketError(f"no amplitude up to {eps_grid[-1]:.6g} blows up "
                           f"({len(inconclusive)} inconclusive); widen the grid upward")

    for _ in range(MAX_BISECTIONS):
        if eps_blow / eps_ok < ratio_target:
            break
        middle = float(np.sqrt(eps_ok * eps_blow))
        run = _attempt(cfg, profile, middle, history)
        if run.status == STATUS_CONVERGED:
            eps_ok, ok_run = middle, run
        elif run.status == STATUS_BLOWUP:
            eps_blow, blow_run = middle, run
        else:
            inconclusive.append(middle)
            logger.warning("eps=%.6g is inconclusive; bracket stays [%.6g, %.6g]", middle, eps_ok, eps_blow)
            break
    return ThresholdBracket(eps_ok, eps_blow, ok_run, blow_run, history, sorted(set(inconclusive)))


def audit_bracket(cfg: SolverConfig, profile: SampledFunction,
                  bracket: ThresholdBracket) -> List[Tuple[float, str]]:
    """Re-run five amplitudes around the bracket"""
    amplitudes = [0.5 * bracket.eps_ok, 0.75 * bracket.eps_ok, bracket.eps_ok,
                  bracket.eps_blow, 2.0 * bracket.eps_blow]
    return [(eps, picard_solve(cfg, profile.scaled(eps)).status) for eps in amplitudes]


def audit_consistent(audit: List[Tuple[float, str]]) -> bool:
    """First three amplitudes converge, last two blow up"""
    statuses = [status for _, status in audit]
    return all(s == STATUS_CONVERGED for s in statuses[:3]) and all(s == STATUS_BLOWUP for s in statuses[3:])


def audit_inconclusive(audit: List[Tuple[float, str]]) -> List[float]:
    """Audited amplitudes that ran out of sweeps"""
    return [eps for eps, status in audit if status == STATUS_MAX_SWEEPS]
