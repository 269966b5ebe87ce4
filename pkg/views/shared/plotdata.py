# VIEW: CSV artifacts of a run (traces, status line and summary)
from pathlib import Path
from typing import Dict, List
import logging

import pandas as pd

from constants import CSV_FLOAT_FORMAT
from utils.errors import ArtifactWriteError

logger = logging.getLogger(__name__)

SUMMARY_FILE = "summary.csv"


def write_csv(frame: pd.DataFrame, path: Path) -> Path:
    """One CSV with LF endings and 17 significant digits; an empty frame gives a header-only file"""
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n", encoding="utf-8")
    except OSError as e:
        raise ArtifactWriteError(f"cannot write {path}: {e}") from e
    logger.debug("wrote %s (%d rows)", path, len(frame))
    return path


def emit_plotdata(summary, traces: Dict[str, pd.DataFrame], out_dir) -> List[Path]:
    """Write every trace as <name>.csv, then summary.csv; returns the files in write order"""
    out_dir = Path(out_dir)
    written = [write_csv(frame, out_dir / f"{name}.csv") for name, frame in sorted(traces.items())]
    written.append(write_csv(summary.to_frame(), out_dir / SUMMARY_FILE))
    logger.info("%d artifacts in %s", len(written), out_dir)
    return written
