import numpy as np
import pandas as pd

from pytest import approx

from config import build_config
from constants import EXIT_CHECK_FAILED, EXIT_IO, EXIT_OK, EXIT_USAGE, SUMMARY_COLUMNS
from main import main
from models.experiment_runner import CheckResult, ExperimentRunner, RunSummary
from views.shared.plotdata import emit_plotdata, write_csv
from views.shared.trace_visualizer import TraceVisualizer

SMALL = ["--grid-m", "64", "--box-l", "4"]


def test_verify_run_writes_its_artifacts(tmp_path):
    code = main(["verify", "--check", "lemma31", "--q", "0", "--alpha", "0", "--s-points", "8",
                 "--out", str(tmp_path)] + SMALL)
    assert code == EXIT_OK
    summary = pd.read_csv(tmp_path / "summary.csv")
    assert list(summary.columns) == SUMMARY_COLUMNS
    assert list(summary["check"]) == ["lemma31"] and bool(summary["pass"][0])
    trace = pd.read_csv(tmp_path / "verify_lemma31.csv")
    assert len(trace) == 8
    assert np.allclose(trace["ratio"], 1.0, rtol=1e-10)


def test_usage_errors_write_nothing(tmp_path):
    out = tmp_path / "run"
    assert main(["norm", "--grid-m", "12", "--out", str(out)]) == EXIT_USAGE
    assert not out.exists()
    assert main(["verify", "--check", "nonsense", "--out", str(out)]) == EXIT_USAGE
    assert main(["appendix", "--n-max", "48", "--out", str(out)]) == EXIT_USAGE
    assert not out.exists()


def test_unwritable_output_is_an_io_error(tmp_path):
    blocker = tmp_path / "file.txt"
    blocker.write_text("occupied", encoding="utf-8")
    assert main(["appendix", "--prop", "A2", "--n-max", "8", "--out", str(blocker)]) == EXIT_IO


def test_config_file_feeds_the_run(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text(f"prop = A2\nn-max = 64\nout = {tmp_path / 'a2'}\n", encoding="utf-8")
    assert main(["appendix", "--config", str(path)]) == EXIT_OK
    frame = pd.read_csv(tmp_path / "a2" / "appendix_A2.csv")
    assert list(frame["n"]) == [2, 4, 8, 16, 32, 64]


def test_appendix_a2_passes(tmp_path):
    summary, traces = ExperimentRunner().run(build_config("appendix", cli_values={"out": str(tmp_path)}))
    assert summary.passed and summary.exit_code == EXIT_OK
    assert (tmp_path / "appendix_A2.csv").exists()
    assert str(tmp_path / "summary.csv") == summary.artifacts[-1]


def test_kernel_run_for_the_poisson_kernel(tmp_path):
    config = build_config("kernel", cli_values={"theta": 1.0, "grid_m": 64, "box_l": 4.0, "x_max": 5.0,
                                                "x_points": 11, "out": str(tmp_path)})
    summary, traces = ExperimentRunner().run(config)
    assert [c.check for c in summary.checks] == ["comparability", "mass"]
    assert summary.passed
    assert len(traces["kernel"]) == 22


def test_gauss_kernel_run_reports_the_majorant_constant(tmp_path):
    config = build_config("kernel", cli_values={"theta": 2.0, "grid_m": 64, "x_max": 4.0, "x_points": 9,
                                                "times": "1.0", "out": str(tmp_path)})
    summary, _ = ExperimentRunner().run(config, emit=False)
    assert [c.check for c in summary.checks] == ["comparability", "mass"]
    # G_2 / h = (4 pi)^{-1/2} exp(-rho^2/4) (1 + rho)^3 peaks at rho = 2
    assert summary.checks[0].max_ratio == approx(27.0 * np.exp(-1.0) / np.sqrt(4.0 * np.pi), rel=1e-12)
    assert summary.passed
    assert not (tmp_path / "summary.csv").exists()


def test_seeded_runs_are_byte_identical(tmp_path):
    argv = ["verify", "--check", "oneil", "--pairs", "3", "--s-points", "8", "--seed", "5"] + SMALL
    assert main(argv + ["--out", str(tmp_path / "first")]) == EXIT_OK
    assert main(argv + ["--out", str(tmp_path / "second")]) == EXIT_OK
    first = (tmp_path / "first" / "verify_oneil.csv").read_bytes()
    assert first == (tmp_path / "second" / "verify_oneil.csv").read_bytes()
    assert b"\r\n" not in first


def test_solve_run_writes_the_solver_traces(tmp_path):
    code = main(["solve", "--T", "0.25", "--n-steps", "16", "--eps", "0.01", "--out", str(tmp_path)] + SMALL)
    assert code in (EXIT_OK, EXIT_CHECK_FAILED)
    for name in ("metrics", "sweeps", "status", "initial_trace", "summary"):
        assert (tmp_path / f"{name}.csv").exists(), name
    status = pd.read_csv(tmp_path / "status.csv")
    assert status["status"][0] == "CONVERGED" and np.isnan(status["t_event"][0])
    summary = pd.read_csv(tmp_path / "summary.csv").set_index("check")
    assert bool(summary.loc["picard", "pass"])


def test_norm_run_lists_every_family(tmp_path):
    assert main(["norm", "--out", str(tmp_path)] + SMALL) == EXIT_OK
    frame = pd.read_csv(tmp_path / "norm.csv")
    assert list(frame["family"]) == ["frak", "zygmund", "weak_zygmund", "doublestar"]
    assert np.all(frame["value"] > 0.0)


def test_plots_flag_renders_the_traces(tmp_path):
    argv = ["verify", "--check", "lemma31", "--q", "0", "--alpha", "0", "--s-points", "8", "--plots"]
    assert main(argv + ["--out", str(tmp_path)] + SMALL) == EXIT_OK
    assert (tmp_path / "verify_lemma31.png").exists()


def test_empty_frame_gives_a_header_only_file(tmp_path):
    path = write_csv(pd.DataFrame(columns=["a", "b"]), tmp_path / "nested" / "empty.csv")
    assert path.read_bytes() == b"a,b\n"


def test_floats_keep_seventeen_digits(tmp_path):
    path = write_csv(pd.DataFrame({"x": [0.1, 1.0 / 3.0]}), tmp_path / "floats.csv")
    assert path.read_text(encoding="utf-8") == "x\n0.10000000000000001\n0.33333333333333331\n"


def test_trace_visualizer_writes_figures(tmp_path):
    traces = {"decay": pd.DataFrame({"t": [1e-3, 1e-2, 1e-1], "ratio": [0.5, 0.6, 0.7]})}
    paths = TraceVisualizer(tmp_path).plot_all(traces)
    assert [p.name for p in paths] == ["decay.png"]
    assert paths[0].stat().st_size > 0


def test_emit_writes_traces_in_name_order_then_the_summary(tmp_path):
    summary = RunSummary("norm", "{}", 0, [CheckResult("inclusion_chain", "{}", 0.5, True)])
    traces = {"b": pd.DataFrame({"t": [1.0]}), "a": pd.DataFrame({"t": [2.0]})}
    written = emit_plotdata(summary, traces, tmp_path)
    assert [p.name for p in written] == ["a.csv", "b.csv", "summary.csv"]
    frame = pd.read_csv(written[-1])
    assert list(frame["check"]) == ["inclusion_chain"] and frame["max_ratio"][0] == 0.5
