# UTILS: Weights, grids and logging helpers
import logging
from typing import Optional

import numpy as np
from rich.console import Console
from scipy.special import gamma
from rich.logging import RichHandler

from constants import GEOMETRIC_POINTS_PER_DECADE


def log_weight(s, alpha: float):
    """[log(e + 1/s)]^alpha, vectorized; s = inf gives 1"""
    s = np.asarray(s, dtype=float)
    with np.errstate(divide='ignore'):
        base = np.log(np.e + 1.0 / s)
    return base ** alpha


def log_weight_at(log_s, alpha: float):
    """[log(e + 1/s)]^alpha from log s; finite wherever log s is"""
    return np.logaddexp(1.0, -np.asarray(log_s, dtype=float)) ** alpha


def log_factor(s):
    """log(e + 1/s), the base of every logarithmic weight"""
    return log_weight(s, 1.0)


def geometric_grid(lo: float, hi: float, points_per_decade: int = GEOMETRIC_POINTS_PER_DECADE) -> np.ndarray:
    """Geometric grid from lo to hi (both included)"""
    decades = np.log10(hi / lo)
    count = max(int(np.ceil(decades * points_per_decade)) + 1, 2)
    return np.geomspace(lo, hi, count)


def geometric_points(lo: float, hi: float, count: int) -> np.ndarray:
    """Exactly count geometric points from lo to hi"""
    return np.geomspace(lo, hi, count)


def is_power_of_two(value: int) -> bool:
    """True for 1, 2, 4, 8, ..."""
    return value > 0 and (value & (value - 1)) == 0


def unit_ball_volume(n: int) -> float:
    """omega_n, the volume of the unit ball in R^n"""
    return float(np.pi ** (n / 2.0) / gamma(n / 2.0 + 1.0))


def tail_slope(t: np.ndarray, ratio: np.ndarray, decades: float = 1.0) -> float:
    """Least-squares slope of log(ratio) against log(t) over the smallest-t decade"""
    t = np.asarray(t, dtype=float)
    ratio = np.asarray(ratio, dtype=float)
    mask = (t <= t.min() * 10.0 ** decades) & (ratio > 0)
    if mask.sum() < 2:
        return 0.0
    slope, _ = np.polyfit(np.log(t[mask]), np.log(ratio[mask]), 1)
    return float(slope)


def configure_logging(level: str = "INFO", console: Optional[Console] = None) -> None:
    """Route the toolkit's loggers through a rich handler"""
    handler = RichHandler(console=console, show_path=False, markup=False)
    logging.basicConfig(level=level.upper(), format="%(name)s: %(message)s",
                        datefmt="[%X]", handlers=[handler], force=True)
