# VIEW: PNG figures of ratio traces and solver metrics
from pathlib import Path
from typing import Dict, List
import logging

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd

from utils.errors import ArtifactWriteError

logger = logging.getLogger(__name__)

# Abscissa candidates, first match wins
_X_COLUMNS = ["t", "s", "t_or_s", "x", "n", "s_min", "sweep", "eps"]
_Y_COLUMNS = ["ratio", "m1", "m2", "m3", "dx1", "dx2", "dx3", "value"]


class TraceVisualizer:
    """Renders log-log figures for the numeric traces of a run"""

    def __init__(self, out_dir):
        self.out_dir = Path(out_dir)

    @staticmethod
    def _axes_of(frame: pd.DataFrame):
        x = next((c for c in _X_COLUMNS if c in frame.columns), None)
        ys = [c for c in _Y_COLUMNS if c in frame.columns and pd.api.types.is_numeric_dtype(frame[c])]
        return x, ys

    def plot_trace(self, name: str, frame: pd.DataFrame) -> Path:
        """One figure per trace; positive values only on the log axes"""
        x, ys = self._axes_of(frame)
        fig, ax = plt.subplots(figsize=(8, 5))
        for y in ys:
            data = frame[(frame[x] > 0) & (frame[y] > 0)]
            ax.plot(data[x], data[y], 'o-', markersize=3, linewidth=1.5, label=y)
        ax.set_xscale('log')
        ax.set_yscale('log')
        ax.set_xlabel(x)
        ax.grid(True, which='both', alpha=0.3)
        ax.legend()
        ax.set_title(name, fontweight='bold')
        fig.tight_layout()
        path = self.out_dir / f"{name}.png"
        try:
            self.out_dir.mkdir(parents=True, exist_ok=True)
            fig.savefig(path, dpi=120)
        except OSError as e:
            raise ArtifactWriteError(f"cannot write {path}: {e}") from e
        finally:
            plt.close(fig)
        return path

    def plot_all(self, traces: Dict[str, pd.DataFrame]) -> List[Path]:
        written = []
        for name, frame in sorted(traces.items()):
            x, ys = self._axes_of(frame)
            if x is None or not ys or frame.empty or not pd.api.types.is_numeric_dtype(frame[x]):
                logger.debug("no figure for %s", name)
                continue
            written.append(self.plot_trace(name, frame))
        return written
