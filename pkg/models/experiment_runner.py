# MODEL: Batch experiment runner dispatching the six subcommands
from dataclasses import dataclass, field
from time import perf_counter
from typing import Callable, Dict, List, Optional, Tuple
import json
import logging

import numpy as np
import pandas as pd
from rich.console import Console
from rich.table import Table

from config import ExperimentConfig
from constants import (A1_DIVERGENCE_FACTOR, A2_CLOSED_FORM_RTOL, A2_COLLAPSE_FACTOR, AUDIT_COLUMNS,
                       BRACKET_RATIO_LIMIT, CHAIN_COLUMNS, CLOSED_FORM_RTOL, COMPARABILITY_SPREAD_LIMIT,
                       EXIT_CHECK_FAILED, EXIT_OK, IDENTITY_RTOL, INEQUALITY_RTOL, INITIAL_TRACE_FACTOR,
                       KERNEL_COLUMNS, MASS_RTOL, METRIC_COLUMNS, NORM_COLUMNS, NORM_FAMILIES, PAIR_COLUMNS,
                       STATUS_COLUMNS, STATUS_CONVERGED, SUMMARY_COLUMNS, VERIFY_COLUMNS)
from models import appendix, estimates, rearrangement, zygmund
from models.frac_kernel import KernelSpec, comparability, kernel_eval, majorant_eval, semigroup_apply, smoothing_check
from models.sampled import GridSpec, SampledFunction, indicator_ball, make_grid, sample_radial
from models.solver import (SolverConfig, audit_bracket, audit_consistent, audit_inconclusive, epsilon_threshold_scan,
                           initial_trace_check, picard_solve)
from utils.errors import BracketError, PreconditionError
from utils.utils import geometric_points, is_power_of_two
from views.shared.plotdata import emit_plotdata
from views.shared.trace_visualizer import TraceVisualizer

logger = logging.getLogger(__name__)

Traces = Dict[str, pd.DataFrame]


@dataclass
class CheckResult:
    """Outcome of one contracted check"""
    check: str
    params: str
    max_ratio: float
    passed: bool
    wall_ms: float = 0.0


@dataclass
class RunSummary:
    """Parameters echo, per-check outcome and the artifacts of one run"""
    subcommand: str
    params: str
    seed: int
    checks: List[CheckResult] = field(default_factory=list)
    artifacts: List[str] = field(default_factory=list)
    wall_ms: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def exit_code(self) -> int:
        return EXIT_OK if self.passed else EXIT_CHECK_FAILED

    def to_frame(self) -> pd.DataFrame:
        rows = [(self.subcommand, c.check, c.params, c.max_ratio, c.passed, round(c.wall_ms, 3))
                for c in self.checks]
        return pd.DataFrame(rows, columns=SUMMARY_COLUMNS)

    def to_table(self) -> Table:
        table = Table(title=f"{self.subcommand} (seed {self.seed})", show_header=True, header_style="bold magenta")
        table.add_column("Check", style="cyan", width=28)
        table.add_column("Max ratio", style="yellow", width=16)
        table.add_column("Pass", width=6)
        table.add_column("ms", style="dim", width=10)
        for c in self.checks:
            colour = "green" if c.passed else "red"
            table.add_row(c.check, f"{c.max_ratio:.6g}", f"[{colour}]{c.passed}[/{colour}]", f"{c.wall_ms:.0f}")
        return table


def _params_json(**params) -> str:
    return json.dumps(params, sort_keys=True)


def _verify_frame(check: str, params: str, t, measured, envelope, ratio) -> pd.DataFrame:
    t = np.atleast_1d(np.asarray(t, dtype=float))
    return pd.DataFrame({
        "check": [check] * t.size,
        "param_json": [params] * t.size,
        "t_or_s": t,
        "measured": np.atleast_1d(measured),
        "envelope": np.atleast_1d(envelope),
        "ratio": np.atleast_1d(ratio),
    }, columns=VERIFY_COLUMNS)


def _random_function(grid: GridSpec, rng: np.random.Generator) -> SampledFunction:
    """Uniform values on about half of the cells, zero elsewhere"""
    values = rng.uniform(-1.0, 1.0, size=grid.shape) * (rng.random(grid.shape) < 0.5)
    return SampledFunction(grid, values)


class ExperimentRunner:
    """Executes a validated config and writes its artifacts"""

    def __init__(self, console: Optional[Console] = None):
        self.console = console or Console()
        self._handlers: Dict[str, Callable[[ExperimentConfig], Tuple[List[CheckResult], Traces]]] = {
            "norm": self._run_norm,
            "kernel": self._run_kernel,
            "verify": self._run_verify,
            "solve": self._run_solve,
            "scan": self._run_scan,
            "appendix": self._run_appendix,
        }

    def run(self, config: ExperimentConfig, emit: bool = True) -> Tuple[RunSummary, Traces]:
        """Run the subcommand; with emit, write CSVs (and figures) to config.out"""
        logger.info("%s: %s", config.subcommand, config.echo())
        start = perf_counter()
        checks, traces = self._handlers[config.subcommand](config)
        summary = RunSummary(config.subcommand, config.echo(), config.seed, checks,
                             wall_ms=(perf_counter() - start) * 1e3)
        if emit:
            written = emit_plotdata(summary, traces, config.out)
            if config['plots']:
                written += TraceVisualizer(config.out).plot_all(traces)
            summary.artifacts = [str(p) for p in written]
        for c in checks:
            log = logger.info if c.passed else logger.warning
            log("%s: max ratio %.6g, pass=%s", c.check, c.max_ratio, c.passed)
        return summary, traces

    def display(self, summary: RunSummary) -> None:
        self.console.print(summary.to_table())
        for path in summary.artifacts:
            self.console.print(f"[dim]{path}[/dim]")

    @staticmethod
    def _timed(check: str, params: str, evaluate: Callable[[], Tuple[float, bool]]) -> CheckResult:
        start = perf_counter()
        max_ratio, passed = evaluate()
        return CheckResult(check, params, float(max_ratio), bool(passed), (perf_counter() - start) * 1e3)

    # Inputs

    @staticmethod
    def _grid(cfg: ExperimentConfig) -> GridSpec:
        return make_grid(cfg['n'], cfg['box_l'], cfg['grid_m'])

    @staticmethod
    def _input_function(cfg: ExperimentConfig, grid: GridSpec) -> SampledFunction:
        kind = cfg['function']
        if kind == "indicator":
            return indicator_ball(grid, cfg['radius'])
        if kind == "phi_c":
            return estimates.phi_c(grid.n, cfg['theta'], grid, cfg['radius'])
        if kind == "power_log":
            return sample_radial(grid, estimates.power_log_profile(grid.n, cfg['profile_exponent']), cfg['radius'])
        raise PreconditionError("function", "indicator, phi_c or power_log", kind)

    @staticmethod
    def _profile(cfg: ExperimentConfig, grid: GridSpec) -> SampledFunction:
        kind = cfg['profile']
        if kind == "phi_c":
            return estimates.phi_c(grid.n, cfg['theta'], grid, cfg['radius'])
        if kind == "power_log":
            if not cfg['profile_exponent'] > 1.0:
                raise PreconditionError("profile_exponent", "a > 1 for local integrability", cfg['profile_exponent'])
            return sample_radial(grid, estimates.power_log_profile(grid.n, cfg['profile_exponent']), cfg['radius'])
        raise PreconditionError("profile", "phi_c or power_log", kind)

    @staticmethod
    def _s_grid(cfg: ExperimentConfig) -> np.ndarray:
        return geometric_points(cfg['s_min'], cfg['s_max'], cfg['s_points'])

    @staticmethod
    def _t_grid(cfg: ExperimentConfig) -> np.ndarray:
        return estimates.default_t_grid(cfg['T'], cfg['t_points'], cfg['t_min'])

    def _solver_config(self, cfg: ExperimentConfig) -> SolverConfig:
        return SolverConfig(KernelSpec(cfg['n'], cfg['theta']), self._grid(cfg), cfg['T'], cfg['n_steps'],
                            gamma=cfg['gamma'], max_sweeps=cfg['max_sweeps'], tolerance=cfg['tolerance'])

    # norm

    def _run_norm(self, cfg: ExperimentConfig) -> Tuple[List[CheckResult], Traces]:
        grid = self._grid(cfg)
        f = self._input_function(cfg, grid)
        q, alpha, rho = cfg['q'], cfg['alpha'], cfg.rho
        families = NORM_FAMILIES if cfg['family'] == "all" else [cfg['family']]
        rows = []
        for family in families:
            try:
                norm_family = zygmund.NormFamily(family)
            except ValueError:
                raise PreconditionError("family", f"all or one of {NORM_FAMILIES}", family)
            global_only = len(families) > 1 and norm_family is not zygmund.NormFamily.FRAK
            spec = zygmund.NormSpec(norm_family, q, alpha, None if global_only else rho)
            rows.append((family, q, alpha, spec.rho or 0.0, spec.evaluate(f)))
        traces = {"norm": pd.DataFrame(rows, columns=NORM_COLUMNS)}

        params = _params_json(q=q, alpha=alpha, function=cfg['function'])

        def chain():
            result = appendix.inclusion_chain_check(f, q, alpha)
            ratios = [result["weak_zygmund"] / result["frak"] if result["frak"] > 0 else 0.0,
                      result["frak"] / result["zygmund"] if result["zygmund"] > 0 else 0.0]
            return max(ratios), result["holds"]

        return [self._timed("inclusion_chain", params, chain)], traces

    # kernel

    def _run_kernel(self, cfg: ExperimentConfig) -> Tuple[List[CheckResult], Traces]:
        spec = KernelSpec(cfg['n'], cfg['theta'])
        radii = np.linspace(0.0, cfg['x_max'], cfg['x_points'])
        times = cfg.float_list('times')
        rows = []
        for t in times:
            for x in radii:
                g = kernel_eval(spec, x, t)
                h = majorant_eval(spec.n, spec.theta, x, t)
                rows.append((x, t, g, h, g / h))
        traces = {"kernel": pd.DataFrame(rows, columns=KERNEL_COLUMNS)}
        params = _params_json(n=spec.n, theta=spec.theta, method=spec.method.value, times=times)

        def spread():
            report = comparability(spec, radii, times)
            if spec.theta == 2.0:
                # the Gauss kernel has no lower bound by h; only G_2 <= C h, C = max ratio
                return report.upper, bool(np.isfinite(report.upper) and report.upper > 0.0)
            return report.spread, report.lower > 0.0 and report.spread < COMPARABILITY_SPREAD_LIMIT

        def mass():
            phi = indicator_ball(self._grid(cfg), cfg['radius'])
            source = phi.integral()
            errors = [abs(semigroup_apply(spec, t, phi).integral() - source) / source for t in times]
            return max(errors), max(errors) < MASS_RTOL

        return [self._timed("comparability", params, spread), self._timed("mass", params, mass)], traces

    # verify

    def _run_verify(self, cfg: ExperimentConfig) -> Tuple[List[CheckResult], Traces]:
        checks = {
            "lemma31": self._verify_lemma31,
            "lemma31_closed_form": self._verify_lemma31_closed_form,
            "lemma32": self._verify_lemma32,
            "prop31": self._verify_decay,
            "prop32": self._verify_decay,
            "phi_c": self._verify_phi_c,
            "smoothing": self._verify_smoothing,
            "oneil": self._verify_pairs,
            "product": self._verify_pairs,
            "power_identity": self._verify_power_identity,
            "holder": self._verify_holder,
            "log_interpolation": self._verify_log_interpolation,
            "equimeasurable": self._verify_equimeasurable,
        }
        check = cfg['check']
        if check not in checks:
            raise PreconditionError("check", f"one of {sorted(checks)}", check)
        start = perf_counter()
        max_ratio, passed, frame = checks[check](cfg)
        params = frame["param_json"].iloc[0] if len(frame) else cfg.echo()
        result = CheckResult(check, params, float(max_ratio), bool(passed), (perf_counter() - start) * 1e3)
        return [result], {f"verify_{check}": frame}

    def _trace_result(self, check: str, params: str, trace: estimates.DecayTrace, passed: bool):
        frame = _verify_frame(check, params, trace.t, trace.measured, trace.envelope, trace.ratio)
        return trace.max_ratio, passed, frame

    def _verify_lemma31(self, cfg):
        params = _params_json(variant=cfg['variant'], q=cfg['q'], alpha=cfg['alpha'], S=cfg['S'])
        trace = estimates.lemma31_check(cfg['variant'], cfg['q'], cfg['alpha'], cfg['S'], self._s_grid(cfg))
        return self._trace_result("lemma31", params, trace, trace.is_bounded())

    def _verify_lemma31_closed_form(self, cfg):
        params = _params_json(alpha=cfg['alpha'])
        error = estimates.lemma31_closed_form_check(cfg['alpha'], self._s_grid(cfg))
        frame = _verify_frame("lemma31_closed_form", params, np.nan, error, CLOSED_FORM_RTOL, error / CLOSED_FORM_RTOL)
        return error / CLOSED_FORM_RTOL, error < CLOSED_FORM_RTOL, frame

    def _verify_lemma32(self, cfg):
        params = _params_json(n=cfg['n'], theta=cfg['theta'], r=cfg['r'], q=cfg['q'], gamma=cfg['gamma'])
        trace = estimates.lemma32_check(cfg['n'], cfg['theta'], cfg['r'], cfg['q'], cfg['gamma'], self._t_grid(cfg))
        return self._trace_result("lemma32", params, trace, trace.is_bounded())

    def _verify_decay(self, cfg):
        grid = self._grid(cfg)
        phi = self._input_function(cfg, grid)
        args = (phi, cfg['r'], cfg['q'], cfg['alpha'], cfg['beta'], cfg['theta'])
        params = _params_json(n=cfg['n'], theta=cfg['theta'], r=cfg['r'], q=cfg['q'], alpha=cfg['alpha'],
                              beta=cfg['beta'], function=cfg['function'], T=cfg['T'])
        if cfg['check'] == "prop31":
            trace = estimates.prop31_check(*args, self._t_grid(cfg))
        else:
            trace = estimates.prop32_check(*args, cfg['T'], self._t_grid(cfg))
        return self._trace_result(cfg['check'], params, trace, trace.is_bounded())

    def _verify_phi_c(self, cfg):
        grid = self._grid(cfg)
        phi = estimates.phi_c(grid.n, cfg['theta'], grid, cfg['radius'])
        params = _params_json(n=grid.n, theta=cfg['theta'], radius=cfg['radius'])
        trace = estimates.phi_c_rearrangement_bound(phi, grid.n, cfg['theta'], self._s_grid(cfg))
        return self._trace_result("phi_c", params, trace, trace.is_finite_positive())

    def _verify_smoothing(self, cfg):
        grid = self._grid(cfg)
        phi = self._input_function(cfg, grid)
        spec = KernelSpec(grid.n, cfg['theta'])
        params = _params_json(n=grid.n, theta=cfg['theta'], r=cfg['r'], q=cfg['q'], function=cfg['function'])
        trace = smoothing_check(phi, cfg['r'], cfg['q'], self._t_grid(cfg), spec)
        frame = _verify_frame("smoothing", params, trace.t, trace.ratio, np.ones_like(trace.ratio), trace.ratio)
        return trace.max_ratio, bool(np.all(np.isfinite(trace.ratio))), frame

    def _pairs(self, cfg, count: int = 2):
        grid = self._grid(cfg)
        rng = np.random.default_rng(cfg.seed)
        for k in range(cfg['pairs']):
            yield k, grid, [_random_function(grid, rng) for _ in range(count)]

    def _verify_pairs(self, cfg):
        check = cfg['check']
        inequality = rearrangement.check_oneil if check == "oneil" else rearrangement.check_product
        frames, worst, holds = [], 0.0, True
        for k, grid, (f, g) in self._pairs(cfg):
            s_grid = geometric_points(grid.cell_measure, grid.total_measure, cfg['s_points'])
            report = inequality(f, g, s_grid)
            params = _params_json(pair=k, seed=cfg.seed, grid_m=grid.M, n=grid.n)
            with np.errstate(divide='ignore', invalid='ignore'):
                ratio = np.where(report.rhs > 0.0, report.lhs / report.rhs, 0.0)
            frames.append(_verify_frame(check, params, report.s, report.lhs, report.rhs, ratio))
            worst = max(worst, float(ratio.max()))
            holds = holds and report.holds(INEQUALITY_RTOL)
        return worst, holds, pd.concat(frames, ignore_index=True)

    def _identity_frame(self, check, cfg, pairs):
        frames, worst, holds = [], 0.0, True
        for k, lhs, rhs, ok in pairs:
            params = _params_json(pair=k, seed=cfg.seed, q=cfg['q'], r=cfg['r'], alpha=cfg['alpha'])
            ratio = lhs / rhs if rhs > 0.0 else 0.0
            frames.append(_verify_frame(check, params, np.nan, lhs, rhs, ratio))
            worst = max(worst, ratio)
            holds = holds and ok
        return worst, holds, pd.concat(frames, ignore_index=True)

    def _verify_power_identity(self, cfg):
        def pairs():
            for k, _, (f,) in self._pairs(cfg, count=1):
                lhs, rhs = zygmund.power_identity_check(f, cfg['r'], cfg['q'], cfg['alpha'], cfg.rho)
                yield k, lhs, rhs, abs(lhs - rhs) <= IDENTITY_RTOL * abs(rhs)
        return self._identity_frame("power_identity", cfg, pairs())

    def _verify_holder(self, cfg):
        q1 = cfg['q']
        if not q1 > 1.0:
            raise PreconditionError("q", "q > 1 for the conjugate pair", q1)
        q2 = q1 / (q1 - 1.0)

        def pairs():
            for k, _, (f, g) in self._pairs(cfg):
                lhs, rhs = zygmund.holder_product_check(f, g, q1, q2, cfg['alpha'], cfg['beta'], cfg.rho)
                yield k, lhs, rhs, lhs <= rhs * (1.0 + INEQUALITY_RTOL)
        return self._identity_frame("holder", cfg, pairs())

    def _verify_log_interpolation(self, cfg):
        if cfg.rho is None:
            raise PreconditionError("rho", "rho > 0 for the uniformly local interpolation")
        f = self._input_function(cfg, self._grid(cfg))
        lhs, rhs = zygmund.log_interpolation(f, cfg['alpha'], cfg['beta'], cfg.rho)
        return self._identity_frame("log_interpolation", cfg,
                                    [(0, lhs, rhs, lhs <= rhs * (1.0 + INEQUALITY_RTOL))])

    def _verify_equimeasurable(self, cfg):
        def pairs():
            for k, grid, (f,) in self._pairs(cfg, count=1):
                levels = np.linspace(0.0, f.sup_norm(), 17)
                gap = rearrangement.check_equimeasurable(f, levels)
                yield k, gap, grid.cell_measure, gap <= IDENTITY_RTOL * grid.cell_measure
        return self._identity_frame("equimeasurable", cfg, pairs())

    # solve

    def _run_solve(self, cfg: ExperimentConfig) -> Tuple[List[CheckResult], Traces]:
        solver_cfg = self._solver_config(cfg)
        phi = self._profile(cfg, solver_cfg.grid).scaled(cfg['eps'])
        params = _params_json(n=cfg['n'], theta=cfg['theta'], T=cfg['T'], n_steps=cfg['n_steps'],
                              eps=cfg['eps'], profile=cfg['profile'], gamma=cfg['gamma'])
        start = perf_counter()
        run = picard_solve(solver_cfg, phi)
        elapsed = (perf_counter() - start) * 1e3
        traces = self._trajectory_traces(run)
        logger.info("status,%s,%s", run.status, "" if run.t_event is None else f"{run.t_event:.17g}")

        ratios = run.contraction_ratios()
        checks = [
            CheckResult("picard", params, float(run.distance_totals()[-1]), run.status == STATUS_CONVERGED, elapsed),
            CheckResult("contraction", params, float(ratios[-3:].max()) if ratios.size else 0.0,
                        run.contraction_certified()),
        ]
        if run.status == STATUS_CONVERGED:
            def trace():
                report = initial_trace_check(solver_cfg, phi, run, cfg['beta'])
                traces["initial_trace"] = report.to_frame()
                return report.decay_factor, report.decays(INITIAL_TRACE_FACTOR)
            checks.append(self._timed("initial_trace", params, trace))
        return checks, traces

    @staticmethod
    def _trajectory_traces(run, suffix: str = "") -> Traces:
        metrics = run.metrics.to_frame() if run.metrics is not None else pd.DataFrame(columns=METRIC_COLUMNS)
        status = pd.DataFrame([(run.status, np.nan if run.t_event is None else run.t_event)], columns=STATUS_COLUMNS)
        return {f"metrics{suffix}": metrics, f"sweeps{suffix}": run.sweep_frame(), f"status{suffix}": status}

    # scan

    def _run_scan(self, cfg: ExperimentConfig) -> Tuple[List[CheckResult], Traces]:
        solver_cfg = self._solver_config(cfg)
        profile = self._profile(cfg, solver_cfg.grid)
        eps_grid = geometric_points(cfg['eps_min'], cfg['eps_max'], cfg['eps_points'])
        params = _params_json(n=cfg['n'], theta=cfg['theta'], T=cfg['T'], n_steps=cfg['n_steps'],
                              profile=cfg['profile'], eps_min=cfg['eps_min'], eps_max=cfg['eps_max'])
        start = perf_counter()
        try:
            bracket = epsilon_threshold_scan(solver_cfg, profile, eps_grid)
        except BracketError as e:
            logger.error("%s", e)
            return [CheckResult("bracket", params, float('nan'), False, (perf_counter() - start) * 1e3)], {}
        tight = bracket.ratio < BRACKET_RATIO_LIMIT and bracket.resolved
        checks = [CheckResult("bracket", params, bracket.ratio, tight, (perf_counter() - start) * 1e3)]
        traces = {"scan": bracket.to_frame()}
        traces.update(self._trajectory_traces(bracket.ok_run, "_ok"))
        traces.update(self._trajectory_traces(bracket.blow_run, "_blow"))

        rows = []

        def audit():
            rows.extend(audit_bracket(solver_cfg, profile, bracket))
            traces["audit"] = pd.DataFrame(rows, columns=AUDIT_COLUMNS)
            return bracket.ratio, audit_consistent(rows)

        checks.append(self._timed("audit", params, audit))
        # runs that hit the sweep limit count towards neither side of the bracket
        unresolved = len(bracket.inconclusive) + len(audit_inconclusive(rows))
        checks.append(CheckResult("inconclusive", params, float(unresolved), unresolved == 0))
        return checks, traces

    # appendix

    def _run_appendix(self, cfg: ExperimentConfig) -> Tuple[List[CheckResult], Traces]:
        props = {
            "A1": self._appendix_a1,
            "A2": self._appendix_a2,
            "gap": self._appendix_gap,
            "chain": self._appendix_chain,
            "doublestar": self._appendix_doublestar,
            "parts": self._appendix_parts,
            "fstar": self._appendix_fstar,
        }
        prop = cfg['prop']
        if prop not in props:
            raise PreconditionError("prop", f"one of {sorted(props)}", prop)
        return props[prop](cfg)

    @staticmethod
    def _s_mins() -> np.ndarray:
        return 10.0 ** -np.arange(4.0, 37.0, 4.0)

    def _appendix_a2(self, cfg):
        n_max = cfg['n_max']
        if not (n_max >= 2 and is_power_of_two(n_max)):
            raise PreconditionError("n_max", "a power of two >= 2", n_max)
        indices = [2 ** k for k in range(1, int(np.log2(n_max)) + 1)]
        frame = appendix.appendix_a2_trace(cfg['alpha'], indices)
        params = _params_json(alpha=cfg['alpha'], n_max=n_max)

        def closed_form():
            exact = 1.0 / np.log(np.e + frame["n"].to_numpy(dtype=float))
            error = float(np.max(np.abs(frame["frak_norm"].to_numpy() - exact) / exact))
            return error, error < A2_CLOSED_FORM_RTOL

        def collapse():
            ratio = frame["ratio"].to_numpy()
            factor = ratio[0] / ratio[-1]
            return factor, bool(np.all(np.diff(ratio) < 0.0)) and factor >= A2_COLLAPSE_FACTOR

        checks = [self._timed("A2_closed_form", params, closed_form), self._timed("A2_collapse", params, collapse)]
        return checks, {"appendix_A2": frame}

    def _appendix_a1(self, cfg):
        frame = appendix.appendix_a1_trace(cfg['q'], cfg['alpha'], cfg['delta'], self._s_mins())
        params = _params_json(q=cfg['q'], alpha=cfg['alpha'], delta=cfg['delta'])
        ratio = frame["ratio"].to_numpy()
        passed = bool(np.all(np.diff(ratio) > 0.0)) and ratio[-1] > A1_DIVERGENCE_FACTOR
        return [CheckResult("A1_divergence", params, float(ratio[-1]), passed)], {"appendix_A1": frame}

    def _appendix_gap(self, cfg):
        frame = appendix.zygmund_gap_trace(cfg['q'], cfg['alpha'], cfg['delta'], self._s_mins())
        params = _params_json(q=cfg['q'], alpha=cfg['alpha'], delta=cfg['delta'])
        ratio = frame["ratio"].to_numpy()
        passed = bool(ratio[-1] > ratio[0]) and bool(np.all(frame["frak_norm"] <= 1.0 + INEQUALITY_RTOL))
        return [CheckResult("zygmund_gap", params, float(ratio[-1]), passed)], {"appendix_gap": frame}

    def _corpus(self, cfg):
        return appendix.inclusion_corpus(self._grid(cfg), cfg.seed)

    def _appendix_chain(self, cfg):
        corpus = self._corpus(cfg)
        params = _params_json(q=cfg['q'], alpha=cfg['alpha'], seed=cfg.seed, n=cfg['n'], grid_m=cfg['grid_m'])
        rows = []
        for name, f in corpus:
            result = appendix.inclusion_chain_check(f, cfg['q'], cfg['alpha'])
            rows.append((name, result["weak_zygmund"], result["frak"], result["zygmund"], result["holds"]))
        frame = pd.DataFrame(rows, columns=CHAIN_COLUMNS)
        constants = appendix.fitted_a2_constant([f for _, f in corpus], cfg['q'], cfg['alpha'])
        checks = [CheckResult("inclusion_chain", params, float(constants.max()), bool(frame["holds"].all()))]
        return checks, {"appendix_chain": frame}

    def _pair_rows(self, cfg, check, evaluate, holds):
        params = _params_json(q=cfg['q'], alpha=cfg['alpha'], seed=cfg.seed, n=cfg['n'], grid_m=cfg['grid_m'])
        rows = []
        for name, f in self._corpus(cfg):
            lhs, rhs = evaluate(f)
            rows.append((name, lhs, rhs, lhs / rhs if rhs > 0.0 else 0.0))
        frame = pd.DataFrame(rows, columns=PAIR_COLUMNS)
        passed = all(holds(lhs, rhs) for lhs, rhs in zip(frame["lhs"], frame["rhs"]))
        return [CheckResult(check, params, float(frame["ratio"].max()), passed)], {f"appendix_{check}": frame}

    def _appendix_doublestar(self, cfg):
        return self._pair_rows(cfg, "doublestar",
                               lambda f: appendix.doublestar_reverse_check(f, cfg['q'], cfg['alpha']),
                               lambda lhs, rhs: lhs >= rhs * (1.0 - INEQUALITY_RTOL))

    def _appendix_parts(self, cfg):
        return self._pair_rows(cfg, "parts",
                               lambda f: appendix.zygmund_parts_identity(f, cfg['alpha']),
                               lambda lhs, rhs: abs(lhs - rhs) <= IDENTITY_RTOL * abs(rhs))

    def _appendix_fstar(self, cfg):
        exponent = cfg['profile_exponent']
        r = appendix.power_log_rearrangement(exponent, s_min=1e-30)
        s_grid = geometric_points(max(cfg['s_min'], 1e-28), min(cfg['s_max'], 1.0), cfg['s_points'])
        ratio = appendix.fstar_ratio_trace(r, s_grid)
        params = _params_json(profile_exponent=exponent)
        frame = _verify_frame("fstar", params, s_grid, r.value_at(s_grid), r.maximal_average(s_grid), ratio)
        passed = bool(ratio[0] < ratio[-1]) and bool(np.all(ratio <= 1.0 + INEQUALITY_RTOL))
        return [CheckResult("fstar_ratio", params, float(ratio.max()), passed)], {"appendix_fstar": frame}
