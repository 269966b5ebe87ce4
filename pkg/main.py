# MAIN: Command-line entry point parsing a subcommand and running it as a batch
import argparse
import logging
import sys
from typing import List, Optional

from rich.console import Console

from config import APP_DESCRIPTION, APP_VERSION, DEFAULTS, SUBCOMMANDS, build_config, load_config_file
from constants import EXIT_IO, EXIT_USAGE
from models.experiment_runner import ExperimentRunner
from utils.errors import ArtifactWriteError, PreconditionError
from utils.utils import configure_logging

logger = logging.getLogger(__name__)

# Flags shared by every subcommand: (flag, type, help)
_GLOBAL_FLAGS = [
    ("--out", str, "output directory"),
    ("--seed", int, "seed of the randomized checks"),
    ("--grid-m", int, "points per axis"),
    ("--box-l", float, "half-width L of the periodic box [-L, L)^n"),
    ("--log-level", str, "DEBUG, INFO, WARNING or ERROR"),
]

_MODEL_FLAGS = [
    ("--n", int, "dimension (1 or 2)"),
    ("--theta", float, "order of the fractional Laplacian, 0 < theta <= 2"),
    ("--T", float, "time horizon"),
    ("--q", float, "integrability exponent (inf allowed where admissible)"),
    ("--r", float, "source integrability exponent"),
    ("--alpha", float, "log exponent"),
    ("--beta", float, "target log exponent"),
    ("--gamma", float, "secondary log exponent, 0 <= gamma < n/theta"),
    ("--rho", float, "ball radius of the uniformly local norms (0: global)"),
    ("--function", str, "indicator, phi_c or power_log"),
    ("--radius", float, "support radius of the input function"),
    ("--profile-exponent", float, "exponent a of |x|^-n [log(e+1/|x|)]^-a"),
    ("--t-min", float, "smallest t of the geometric t-grid"),
    ("--t-points", int, "points of the t-grid"),
    ("--s-min", float, "smallest s of the geometric s-grid"),
    ("--s-max", float, "largest s of the geometric s-grid"),
    ("--s-points", int, "points of the s-grid"),
]

_SUBCOMMAND_FLAGS = {
    "norm": [("--family", str, "all, frak, zygmund, weak_zygmund or doublestar")],
    "kernel": [("--x-max", float, "largest |x|"), ("--x-points", int, "points along the ray"),
               ("--times", str, "comma-separated times")],
    "verify": [("--check", str, "which estimate to verify"), ("--variant", int, "weighted integral variant 1-3"),
               ("--S", float, "upper limit S of variant 2"), ("--pairs", int, "number of seeded random inputs")],
    "solve": [("--profile", str, "phi_c or power_log"), ("--eps", float, "amplitude of the data"),
              ("--n-steps", int, "time steps"), ("--max-sweeps", int, "Picard sweep limit"),
              ("--tolerance", float, "relative sweep tolerance")],
    "scan": [("--profile", str, "phi_c or power_log"), ("--eps-min", float, "smallest amplitude"),
             ("--eps-max", float, "largest amplitude"), ("--eps-points", int, "amplitudes on the initial grid"),
             ("--n-steps", int, "time steps"), ("--max-sweeps", int, "Picard sweep limit"),
             ("--tolerance", float, "relative sweep tolerance")],
    "appendix": [("--prop", str, "A1, A2, gap, chain, doublestar, parts or fstar"),
                 ("--n-max", int, "largest index of the f_n family (power of two)"),
                 ("--delta", float, "support of the witnesses")],
}


def build_parser() -> argparse.ArgumentParser:
    """Subcommand parser; unset flags stay absent so config files are not overridden"""
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    for flag, kind, text in _GLOBAL_FLAGS + _MODEL_FLAGS:
        common.add_argument(flag, type=kind, help=text)
    common.add_argument("--config", dest="config_file", help="flat key = value config file")
    common.add_argument("--plots", action="store_true", help="also render PNG figures")

    parser = argparse.ArgumentParser(prog="main.py", description=APP_DESCRIPTION)
    parser.add_argument("--version", action="version", version=APP_VERSION)
    subparsers = parser.add_subparsers(dest="subcommand", required=True)
    for name in SUBCOMMANDS:
        sub = subparsers.add_parser(name, parents=[common], argument_default=argparse.SUPPRESS)
        for flag, kind, text in _SUBCOMMAND_FLAGS[name]:
            sub.add_argument(flag, type=kind, help=text)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = vars(build_parser().parse_args(argv))
    subcommand = args.pop("subcommand")
    config_file = args.pop("config_file", None)
    console = Console()
    configure_logging(args.get("log_level", DEFAULTS["log_level"]), console)
    try:
        file_values = load_config_file(config_file) if config_file else {}
        config = build_config(subcommand, file_values, args)
        configure_logging(config["log_level"], console)
        runner = ExperimentRunner(console)
        summary, _ = runner.run(config)
    except PreconditionError as e:
        logger.error("usage error: %s", e)
        return EXIT_USAGE
    except ArtifactWriteError as e:
        logger.error("I/O error: %s", e)
        return EXIT_IO
    runner.display(summary)
    return summary.exit_code


if __name__ == "__main__":
    sys.exit(main())
