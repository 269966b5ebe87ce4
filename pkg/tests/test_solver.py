import numpy as np

from pytest import approx, fixture, mark, raises

from constants import STATUS_BLOWUP, STATUS_CONVERGED, STATUS_MAX_SWEEPS
from models.frac_kernel import KernelSpec
from models import solver
from models.estimates import phi_c
from models.sampled import SampledFunction, constant, make_grid, sample, zeros
from models.solver import (SolutionTrajectory, SolverConfig, ThresholdBracket, audit_bracket, audit_consistent,
                           audit_inconclusive, duhamel_map, epsilon_threshold_scan, initial_trace_check,
                           linear_trajectory, picard_solve, smooth_bump, xt_distance, xt_metrics)
from utils.errors import BracketError, NotConvergedError, PreconditionError

GRID = make_grid(1, 4.0, 64)
KERNEL = KernelSpec(1, 2.0)


@fixture
def cfg():
    return SolverConfig(KERNEL, GRID, T=0.25, n_steps=16)


@fixture
def bump():
    return smooth_bump(GRID)


def test_config_properties(cfg):
    assert cfg.p == 3.0 and cfg.alpha == 0.5
    assert cfg.rho == 0.5
    assert cfg.times()[-1] == approx(0.25)
    assert cfg.times().size == 16
    assert cfg.refined().n_steps == 32 and cfg.refined().T == cfg.T


@mark.parametrize("changes", (dict(T=0.0), dict(n_steps=0), dict(gamma=0.5), dict(gamma=-0.1),
                              dict(max_sweeps=0), dict(tolerance=0.0)))
def test_config_rejects(changes):
    options = dict(kernel=KERNEL, grid=GRID, T=0.25, n_steps=16)
    options.update(changes)
    with raises(PreconditionError):
        SolverConfig(**options)


def test_config_rejects_dimension_mismatch():
    with raises(PreconditionError):
        SolverConfig(KernelSpec(2, 2.0), GRID, T=0.25, n_steps=16)


def test_smooth_bump():
    bump = smooth_bump(GRID)
    assert bump.sup_norm() == approx(np.exp(-1.0), rel=1e-2)
    assert np.all(bump.values[np.abs(GRID.axis()) >= 1.0] == 0.0)


def test_duhamel_map_of_zero_is_the_linear_flow(cfg, bump):
    zero = SolutionTrajectory(GRID, cfg.times(), np.zeros((cfg.n_steps,) + GRID.shape))
    assert np.array_equal(duhamel_map(cfg, bump, zero).snapshots, linear_trajectory(cfg, bump).snapshots)


def test_first_duhamel_panel_uses_the_first_node(cfg):
    # constant nodes only feed the zero mode, where the panel weight is dt and the step is 1
    snapshots = np.zeros((cfg.n_steps,) + GRID.shape)
    snapshots[0] = 0.5
    following = duhamel_map(cfg, zeros(GRID), SolutionTrajectory(GRID, cfg.times(), snapshots))
    assert np.allclose(following.snapshots[0], cfg.dt * 0.5 ** 3, rtol=1e-12)
    assert np.allclose(following.snapshots[1], 2.0 * cfg.dt * 0.5 ** 3, rtol=1e-12)
    assert np.allclose(following.snapshots[2], 2.0 * cfg.dt * 0.5 ** 3, rtol=1e-12)


def test_data_on_another_grid_is_rejected(cfg):
    other = smooth_bump(make_grid(1, 2.0, 64))
    zero = SolutionTrajectory(GRID, cfg.times(), np.zeros((cfg.n_steps,) + GRID.shape))
    with raises(PreconditionError):
        linear_trajectory(cfg, other)
    with raises(PreconditionError):
        duhamel_map(cfg, other, zero)


def test_single_mode_decays_exponentially(cfg):
    k = 2
    frequency = np.pi * k / GRID.L
    mode = sample(GRID, lambda x: np.cos(frequency * x))
    linear = linear_trajectory(cfg, mode)
    for t, snapshot in zip(linear.times, linear.snapshots):
        assert np.allclose(snapshot, np.exp(-t * frequency ** 2) * mode.values, atol=1e-12)


def test_zero_data_converges_in_one_sweep(cfg):
    run = picard_solve(cfg, zeros(GRID))
    assert run.status == STATUS_CONVERGED
    assert run.sweeps == 1
    assert np.all(run.snapshots == 0.0)


def test_small_data_converges_with_a_contraction(cfg, bump):
    phi = bump.scaled(0.01)
    run = picard_solve(cfg, phi)
    assert run.status == STATUS_CONVERGED
    assert run.contraction_certified()
    assert run.metrics is not None
    assert np.all(run.sup_norms() >= linear_trajectory(cfg, phi).sup_norms() - 1e-15)


def test_moderate_data_converges(cfg, bump):
    run = picard_solve(cfg, bump)
    assert run.status == STATUS_CONVERGED
    assert np.all(run.contraction_ratios()[-3:] <= 0.6)
    frame = run.sweep_frame()
    assert list(frame.columns) == ["sweep", "dx1", "dx2", "dx3"]
    assert list(frame["sweep"]) == list(range(1, run.sweeps + 1))
    assert list(run.metrics.to_frame().columns) == ["t", "sup_norm", "m1", "m2", "m3"]


def test_time_refinement_changes_little(cfg, bump):
    coarse = picard_solve(cfg, bump)
    fine = picard_solve(cfg.refined(), bump)
    change = np.max(np.abs(fine.snapshots[-1] - coarse.snapshots[-1]))
    assert change <= 0.02 * coarse.sup_norms()[-1]


def test_large_data_blows_up(cfg, bump):
    run = picard_solve(cfg, bump.scaled(50.0))
    assert run.status == STATUS_BLOWUP
    assert run.t_event is not None and 0.0 < run.t_event <= cfg.T
    assert run.snapshot(0).grid == GRID


def test_sweep_limit(cfg, bump):
    run = picard_solve(SolverConfig(KERNEL, GRID, T=0.25, n_steps=16, max_sweeps=1), bump)
    assert run.status == STATUS_MAX_SWEEPS
    assert run.sweeps == 1 and run.metrics is not None


def test_metrics_need_a_finite_trajectory(cfg):
    blown = SolutionTrajectory(GRID, cfg.times(), np.full((cfg.n_steps,) + GRID.shape, np.inf))
    with raises(PreconditionError):
        xt_metrics(cfg, blown)


def test_distance_to_itself_is_zero(cfg, bump):
    linear = linear_trajectory(cfg, bump)
    assert xt_distance(cfg, linear, linear) == (0.0, 0.0, 0.0)


def test_initial_trace_needs_a_converged_run(cfg, bump):
    with raises(NotConvergedError):
        initial_trace_check(cfg, bump, picard_solve(cfg, bump.scaled(50.0)), 0.0)
    with raises(PreconditionError):
        initial_trace_check(cfg, bump, picard_solve(cfg, bump), 0.5)


def test_initial_trace_of_the_linear_flow_vanishes(cfg, bump):
    linear = linear_trajectory(cfg, bump)
    linear.status = STATUS_CONVERGED
    report = initial_trace_check(cfg, bump, linear, 0.0)
    assert np.all(report.trace == 0.0)
    assert report.decay_factor == 0.0


def test_initial_trace_decays(bump):
    cfg = SolverConfig(KERNEL, GRID, T=0.25, n_steps=32)
    run = picard_solve(cfg, bump)
    report = initial_trace_check(cfg, bump, run, 0.0)
    assert report.decays(0.1)
    assert list(report.to_frame().columns) == ["t", "trace", "pairing"]


def test_scaling_coherence(bump):
    # v(x, t) = 2 u(2x, 4t) solves the same problem with data 2 phi(2x)
    run = picard_solve(SolverConfig(KERNEL, GRID, T=0.25, n_steps=16), bump)
    half = make_grid(1, 2.0, 64)
    scaled = picard_solve(SolverConfig(KERNEL, half, T=0.25 / 4.0, n_steps=16),
                          SampledFunction(half, 2.0 * bump.values))
    assert scaled.status == run.status == STATUS_CONVERGED
    assert np.allclose(scaled.snapshots, 2.0 * run.snapshots, rtol=1e-6, atol=1e-12)


def test_scan_rejects_bad_grids(cfg, bump):
    with raises(PreconditionError):
        epsilon_threshold_scan(cfg, bump, [1.0, 0.5])
    with raises(PreconditionError):
        epsilon_threshold_scan(cfg, bump, [1.0])


def test_scan_without_a_failure_is_not_a_bracket(cfg):
    with raises(BracketError):
        epsilon_threshold_scan(cfg, zeros(GRID), [0.1, 1.0, 10.0])


def test_scan_failing_at_the_smallest_amplitude(cfg, bump):
    with raises(BracketError):
        epsilon_threshold_scan(cfg, bump, [50.0, 100.0])


@mark.slow
def test_scan_brackets_the_threshold(cfg, bump):
    bracket = epsilon_threshold_scan(cfg, bump, np.geomspace(0.5, 64.0, 8))
    assert bracket.eps_ok < bracket.eps_blow
    assert bracket.ratio < 1.5
    assert bracket.ok_run.status == STATUS_CONVERGED
    assert bracket.blow_run.status != STATUS_CONVERGED
    frame = bracket.to_frame()
    assert list(frame.columns) == ["eps", "status", "sweeps", "t_event"]
    assert len(frame) == len(bracket.history)
    assert audit_consistent(audit_bracket(cfg, bump, bracket))


def test_audit_consistency_rule():
    assert audit_consistent([(1.0, STATUS_CONVERGED)] * 3 + [(2.0, STATUS_BLOWUP), (4.0, STATUS_BLOWUP)])
    assert not audit_consistent([(1.0, STATUS_CONVERGED)] * 4 + [(4.0, STATUS_BLOWUP)])


def test_audit_keeps_sweep_limits_apart_from_blow_up():
    audit = [(1.0, STATUS_CONVERGED)] * 3 + [(2.0, STATUS_BLOWUP), (4.0, STATUS_MAX_SWEEPS)]
    assert not audit_consistent(audit)
    assert audit_inconclusive(audit) == [4.0]
    assert audit_inconclusive([(1.0, STATUS_CONVERGED)] * 3 + [(2.0, STATUS_BLOWUP)] * 2) == []


def scripted_solver(status_of):
    """Stand-in for picard_solve whose outcome depends only on the data amplitude"""
    def solve(cfg, phi):
        run = SolutionTrajectory(GRID, cfg.times(), np.zeros((cfg.n_steps,) + GRID.shape))
        run.status = status_of(float(np.max(phi.values)))
        run.distances.append((0.0, 0.0, 0.0))
        return run
    return solve


def test_scan_treats_the_sweep_limit_as_inconclusive(cfg, monkeypatch):
    def status_of(eps):
        if eps <= 1.0:
            return STATUS_CONVERGED
        return STATUS_MAX_SWEEPS if eps < 4.0 else STATUS_BLOWUP

    monkeypatch.setattr(solver, "picard_solve", scripted_solver(status_of))
    bracket = epsilon_threshold_scan(cfg, constant(GRID, 1.0), [0.5, 1.0, 2.0, 4.0, 8.0])
    assert (bracket.eps_ok, bracket.eps_blow) == (1.0, 4.0)
    assert bracket.blow_run.status == STATUS_BLOWUP
    assert bracket.inconclusive == [2.0]
    assert not bracket.resolved
    assert list(bracket.to_frame()["eps"]) == [0.5, 1.0, 2.0, 4.0, 2.0]


def test_scan_without_blow_up_is_not_a_bracket(cfg, monkeypatch):
    monkeypatch.setattr(solver, "picard_solve",
                        scripted_solver(lambda eps: STATUS_CONVERGED if eps <= 1.0 else STATUS_MAX_SWEEPS))
    with raises(BracketError):
        epsilon_threshold_scan(cfg, constant(GRID, 1.0), [0.5, 1.0, 2.0, 4.0])


def test_bracket_frame_marks_missing_events():
    empty = SolutionTrajectory(GRID, np.array([0.25]), np.zeros((1,) + GRID.shape))
    bracket = ThresholdBracket(1.0, 2.0, empty, empty, [(1.0, STATUS_CONVERGED, 2, None), (2.0, STATUS_BLOWUP, 1, 0.1)])
    frame = bracket.to_frame()
    assert np.isnan(frame["t_event"][0]) and frame["t_event"][1] == 0.1
    assert bracket.ratio == 2.0


@fixture
def critical():
    return phi_c(1, 2.0, GRID)


def test_small_critical_data_converges(cfg, critical):
    phi = critical.scaled(1e-3)
    run = picard_solve(cfg, phi)
    assert run.status == STATUS_CONVERGED
    assert run.contraction_certified()
    assert np.all(np.isfinite(run.snapshots))
    assert np.all(np.isfinite(run.metrics.suprema))


@mark.slow
def test_initial_trace_decays_for_singular_data(critical):
    cfg = SolverConfig(KERNEL, GRID, T=0.25, n_steps=128)
    phi = critical.scaled(1e-2)
    run = picard_solve(cfg, phi)
    report = initial_trace_check(cfg, phi, run, 0.25)
    assert report.decays(0.1)
    assert report.pairing[0] < report.pairing.max()


@mark.slow
def test_scan_brackets_the_threshold_for_critical_data(cfg, critical):
    bracket = epsilon_threshold_scan(cfg, critical, np.geomspace(1e-2, 1e3, 11))
    assert bracket.eps_ok < bracket.eps_blow
    assert bracket.ok_run.status == STATUS_CONVERGED
    assert bracket.blow_run.status == STATUS_BLOWUP
    assert bracket.ratio < 1.5 or not bracket.resolved
