"""
CSV and JSON output of solutions and study tables. CSV values are written
with 17 significant digits so a re-read reproduces the doubles exactly.
"""
import logging
from pathlib import Path
from typing import Any, Optional

import numpy as np
import pandas as pd
from pydantic import BaseModel

from core.schemas import ConvergenceReport, NewtonReport, SweepResult
from discretizers.bratu_1d import State1D, full_field_1d
from discretizers.bratu_2d import BoundaryFunction, State2D, full_field_2d

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"


class SolutionPayload(BaseModel):
    grid: dict[str, Any]
    values: list[float]


class RunOutput(BaseModel):
    config: dict[str, Any]
    report: NewtonReport
    solution: SolutionPayload


def solution_frame_1d(state: State1D, exact: Optional[np.ndarray] = None) -> pd.DataFrame:
    x, u = full_field_1d(state)
    frame = pd.DataFrame({"x": x, "u": u})
    if exact is not None:
        frame["u_exact"] = exact
        frame["error"] = u - exact
    return frame


def solution_frame_2d(state: State2D, g: BoundaryFunction) -> pd.DataFrame:
    x, y, u = full_field_2d(state, g)
    return pd.DataFrame({"x": x, "y": y, "u": u})


def sweep_frame(result: SweepResult) -> pd.DataFrame:
    return pd.DataFrame({"q": result.q_values, "converged": result.converged, "iterations": result.iterations})


def order_frame(report: ConvergenceReport) -> pd.DataFrame:
    # the first level has no pairwise order
    orders = [np.nan] + report.orders
    return pd.DataFrame({
        "M": report.grid_sizes,
        "dx": report.spacings,
        "error": report.errors,
        "order": orders,
        "iterations": report.iterations,
    })


def write_csv(frame: pd.DataFrame, path: str | Path, block_size: Optional[int] = None) -> Path:
    """
    With block_size, a blank line follows every block_size rows so gnuplot
    reads each block as one scan of a surface. read_csv skips the blank lines.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if block_size is None:
        frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)
    else:
        with path.open("w", newline="") as handle:
            for start in range(0, len(frame), block_size):
                if start:
                    handle.write("\n")
                frame.iloc[start:start + block_size].to_csv(
                    handle, index=False, header=start == 0, float_format=FLOAT_FORMAT, lineterminator="\n"
                )
    logger.info("Wrote %d rows to %s", len(frame), path)
    return path


def read_csv(path: str | Path) -> pd.DataFrame:
    return pd.read_csv(path, float_precision="round_trip")


def write_json(output: RunOutput, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(output.model_dump_json(indent=2))
    logger.info("Wrote JSON result to %s", path)
    return path
