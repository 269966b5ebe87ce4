# CONFIG: Layered run configuration from defaults, a key = value file and flags
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional
import json

from utils.errors import PreconditionError

# Application configuration for batch runs from the command line
# Precedence: DEFAULTS < config file < command-line flags

SUBCOMMANDS = ["norm", "kernel", "verify", "solve", "scan", "appendix"]

DEFAULTS: Dict[str, Any] = {
    # Global
    'out': "results",
    'seed': 0,
    'grid_m': 256,
    'box_l': 8.0,
    'log_level': "INFO",
    'plots': False,
    # Problem
    'n': 1,
    'theta': 2.0,
    'T': 1.0,
    # Exponents
    'q': 1.0,
    'r': 1.0,
    'alpha': 0.5,
    'beta': 0.0,
    'gamma': 0.0,
    'rho': 0.0,
    # Sampled input functions
    'function': "indicator",
    'radius': 1.0,
    'profile': "phi_c",
    'profile_exponent': 3.0,
    # t- and s-grids
    't_min': 1e-4,
    't_points': 40,
    's_min': 1e-6,
    's_max': 0.5,
    's_points': 32,
    # norm
    'family': "all",
    # kernel
    'x_max': 10.0,
    'x_points': 41,
    'times': "0.1,1.0",
    # verify
    'check': "lemma31",
    'variant': 1,
    'S': 1.0,
    'pairs': 20,
    # solve / scan
    'eps': 0.1,
    'n_steps': 64,
    'max_sweeps': 15,
    'tolerance': 1e-10,
    'eps_min': 0.01,
    'eps_max': 10.0,
    'eps_points': 8,
    # appendix
    'prop': "A2",
    'n_max': 256,
    'delta': 0.5,
}

# Parameters that are paths or run switches rather than model inputs
RUN_KEYS = {'out', 'log_level', 'plots'}

# Application metadata
APP_VERSION = "1.0.0"
APP_DESCRIPTION = "Weak Zygmund-type norms, fractional heat semigroup and critical Fujita solver"


@dataclass
class ExperimentConfig:
    """A subcommand with its merged parameter map"""
    subcommand: str
    params: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.subcommand not in SUBCOMMANDS:
            raise PreconditionError("subcommand", f"one of {SUBCOMMANDS}", self.subcommand)

    def __getitem__(self, key: str) -> Any:
        return self.params[key]

    @property
    def out(self) -> Path:
        return Path(self.params['out'])

    @property
    def seed(self) -> int:
        return int(self.params['seed'])

    @property
    def rho(self) -> Optional[float]:
        """Ball radius, None for the global norms"""
        return self.params['rho'] if self.params['rho'] > 0.0 else None

    def float_list(self, key: str):
        return [float(v) for v in str(self.params[key]).split(",") if v.strip()]

    def echo(self) -> str:
        """Deterministic JSON echo of the model parameters"""
        return json.dumps({k: v for k, v in sorted(self.params.items()) if k not in RUN_KEYS}, sort_keys=True)


def coerce(key: str, raw: Any) -> Any:
    """Convert a raw value to the type of its default"""
    if key not in DEFAULTS:
        raise PreconditionError(key, "a known parameter", key)
    default = DEFAULTS[key]
    if not isinstance(raw, str):
        return raw
    text = raw.strip()
    try:
        if isinstance(default, bool):
            if text.lower() not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError(text)
            return text.lower() in ("true", "1", "yes")
        if isinstance(default, int):
            return int(text)
        if isinstance(default, float):
            return float(text)
    except ValueError:
        raise PreconditionError(key, f"a value of type {type(default).__name__}", text)
    return text


def load_config_file(path) -> Dict[str, Any]:
    """Parse a flat `key = value` file; `#` starts a comment"""
    values: Dict[str, Any] = {}
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as e:
        raise PreconditionError("config", "a readable config file", str(path)) from e
    for number, line in enumerate(lines, start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise PreconditionError(f"config line {number}", "key = value", line)
        key, raw = (part.strip() for part in line.split("=", 1))
        values[key.replace("-", "_")] = coerce(key.replace("-", "_"), raw)
    return values


def build_config(subcommand: str, file_values: Optional[Dict[str, Any]] = None,
                 cli_values: Optional[Dict[str, Any]] = None) -> ExperimentConfig:
    """Merge defaults < file < command line into a validated config"""
    params = dict(DEFAULTS)
    for source in (file_values or {}, cli_values or {}):
        for key, value in source.items():
            params[key] = coerce(key, value)
    _validate(params)
    return ExperimentConfig(subcommand, params)


def _validate(params: Dict[str, Any]) -> None:
    if params['seed'] < 0:
        raise PreconditionError("seed", "seed >= 0", params['seed'])
    if params['rho'] < 0.0:
        raise PreconditionError("rho", "rho >= 0 (0 selects the global norms)", params['rho'])
    for key in ('t_points', 's_points', 'x_points', 'eps_points', 'pairs'):
        if params[key] < 1:
            raise PreconditionError(key, f"{key} >= 1", params[key])
