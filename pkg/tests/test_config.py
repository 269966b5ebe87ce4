import json
import re
from pathlib import Path

from pytest import mark, raises

from config import DEFAULTS, ExperimentConfig, build_config, coerce, load_config_file
from utils.errors import PreconditionError


def test_defaults_echo_excludes_run_switches():
    config = build_config("norm")
    echoed = json.loads(config.echo())
    assert "out" not in echoed and "plots" not in echoed and "log_level" not in echoed
    assert echoed["theta"] == DEFAULTS["theta"]
    assert config.rho is None


def test_load_config_file(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("# desk run\ntheta = 1.5\ngrid-m = 128  # points per axis\n\nplots = yes\nfunction = phi_c\n",
                    encoding="utf-8")
    values = load_config_file(path)
    assert values == {"theta": 1.5, "grid_m": 128, "plots": True, "function": "phi_c"}


@mark.parametrize("text", ("theta: 1.5\n", "colour = red\n", "grid_m = 12.5\n", "plots = maybe\n"))
def test_malformed_config_files(tmp_path, text):
    path = tmp_path / "bad.cfg"
    path.write_text(text, encoding="utf-8")
    with raises(PreconditionError):
        load_config_file(path)


def test_missing_config_file(tmp_path):
    with raises(PreconditionError):
        load_config_file(tmp_path / "absent.cfg")


def test_precedence_defaults_file_command_line():
    config = build_config("solve", {"eps": 0.5, "n_steps": 32}, {"eps": 0.25})
    assert config["eps"] == 0.25
    assert config["n_steps"] == 32
    assert config["max_sweeps"] == DEFAULTS["max_sweeps"]


@mark.parametrize("key raw expected".split(),
                  (("q", "inf", float("inf")), ("seed", "7", 7), ("plots", "False", False),
                   ("plots", "1", True), ("check", " oneil ", "oneil"), ("theta", 1.0, 1.0)))
def test_coerce(key, raw, expected):
    assert coerce(key, raw) == expected


@mark.parametrize("values", ({"seed": -1}, {"rho": -0.5}, {"pairs": 0}, {"t_points": 0}))
def test_invalid_values(values):
    with raises(PreconditionError):
        build_config("verify", values)


def test_unknown_subcommand():
    with raises(PreconditionError):
        ExperimentConfig("plot", dict(DEFAULTS))


def test_float_list_and_rho():
    config = build_config("kernel", cli_values={"times": "0.1, 1.0,", "rho": 0.5})
    assert config.float_list("times") == [0.1, 1.0]
    assert config.rho == 0.5


ROOT = Path(__file__).resolve().parents[1]
SOURCES = ["main.py", "config.py", "constants.py", "models", "utils", "views/shared"]


def test_every_module_opens_with_its_role():
    files = [ROOT / s for s in SOURCES if s.endswith(".py")]
    files += [p for s in SOURCES if not s.endswith(".py") for p in sorted((ROOT / s).glob("*.py"))]
    for path in files:
        first = path.read_text(encoding="utf-8").splitlines()[0]
        assert re.match(r"# [A-Z]+: \S", first), path.name
