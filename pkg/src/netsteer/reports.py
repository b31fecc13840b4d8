"""Report models and deterministic serialization.

Reports are pydantic models rendered to JSON with a fixed key order and
floats printed at 17 significant digits, so equal inputs produce
byte-identical files and every float round-trips exactly. CSV and plot-data
writers use 9 significant digits.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict

__all__ = [
    "Dimensions",
    "BoundsSection",
    "ValidInterval",
    "BoydWongSection",
    "SteeringSection",
    "AnalysisReport",
    "ContractionReport",
    "render_json",
    "write_text",
    "write_trajectory_csv",
    "write_control_csv",
    "write_plot_data",
]

REPORT_DIGITS = ".17g"
CSV_DIGITS = ".9g"


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class Dimensions(_Section):
    n: int
    p: int
    nodes: int


class BoundsSection(_Section):
    alpha0: float
    beta: float
    gamma: float
    delta: float
    grid_used: int


class ValidInterval(_Section):
    low: float
    high: Optional[float]  # None means unbounded above


class BoydWongSection(_Section):
    satisfied_globally: bool
    valid_interval: Optional[ValidInterval]


class SteeringSection(_Section):
    iterations: int
    converged: bool
    terminal_error_fixed_point: float
    terminal_error_simulated: float
    final_delta: float


class AnalysisReport(_Section):
    dimensions: Dimensions
    kalman_rank: int
    gramian_min_eig: float
    controllable: bool
    bounds: Optional[BoundsSection]
    alpha_used: Optional[float]
    alpha_source: Optional[Literal["declared", "estimated"]]
    m: Optional[float]
    rho: float
    boyd_wong: Optional[BoydWongSection]
    quadrature_drift: Optional[float]
    steering: Optional[SteeringSection]
    warnings: list[str]


class ContractionReport(_Section):
    pairs: int
    seed: int
    alpha_used: float
    alpha_source: Literal["declared", "estimated"]
    m: float
    rho: float
    max_ratio_sup: float
    max_ratio_grid_l2: float
    within_bound: bool


def _format_float(value):
    if not math.isfinite(value):
        raise ValueError(f"non-finite value in report: {value!r}")
    return format(value, REPORT_DIGITS)


def _render(obj, indent, level):
    pad = " " * (indent * level)
    pad_in = " " * (indent * (level + 1))
    if obj is None:
        return "null"
    if isinstance(obj, bool) or isinstance(obj, np.bool_):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _format_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, (list, tuple, np.ndarray)):
        items = list(obj)
        if not items:
            return "[]"
        inner = ",\n".join(pad_in + _render(v, indent, level + 1) for v in items)
        return "[\n" + inner + "\n" + pad + "]"
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        inner = ",\n".join(
            f"{pad_in}{json.dumps(str(k))}: {_render(v, indent, level + 1)}" for k, v in obj.items()
        )
        return "{\n" + inner + "\n" + pad + "}"
    raise TypeError(f"cannot render {type(obj).__name__} deterministically")


def render_json(data, indent=2):
    """Deterministic JSON text for a pydantic model or plain dict tree."""
    if isinstance(data, BaseModel):
        data = data.model_dump(mode="python")
    return _render(data, indent, 0) + "\n"


def write_text(path, text):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    return path


def _csv_row(values):
    return ",".join(format(float(v), CSV_DIGITS) for v in values)


def write_trajectory_csv(path, grid, states):
    """CSV with header time,x1,...,xn and one row per grid node."""
    states = np.asarray(states, dtype=float)
    header = "time," + ",".join(f"x{i + 1}" for i in range(states.shape[1]))
    lines = [header]
    for t, row in zip(np.asarray(grid, dtype=float), states):
        lines.append(_csv_row([t, *row]))
    return write_text(path, "\n".join(lines) + "\n")


def write_control_csv(path, grid, controls):
    """CSV with header time,u1,...,up and one row per grid node."""
    controls = np.asarray(controls, dtype=float)
    header = "time," + ",".join(f"u{j + 1}" for j in range(controls.shape[1]))
    lines = [header]
    for t, row in zip(np.asarray(grid, dtype=float), controls):
        lines.append(_csv_row([t, *row]))
    return write_text(path, "\n".join(lines) + "\n")


def _dat_lines(header, rows):
    lines = ["# " + header]
    for row in rows:
        lines.append(" ".join(format(float(v), CSV_DIGITS) for v in row))
    return "\n".join(lines) + "\n"


def write_plot_data(directory, grid, states, controls, deltas):
    """Whitespace-separated series files with '#' headers for plotting.

    Writes states.dat (time vs state components), controls.dat (time vs
    control components), and deltas.dat (iteration number vs successive
    change) under the given directory, creating it if needed.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    grid = np.asarray(grid, dtype=float)
    states = np.asarray(states, dtype=float)
    controls = np.asarray(controls, dtype=float)
    state_header = "time " + " ".join(f"x{i + 1}" for i in range(states.shape[1]))
    control_header = "time " + " ".join(f"u{j + 1}" for j in range(controls.shape[1]))
    (directory / "states.dat").write_text(
        _dat_lines(state_header, ([t, *row] for t, row in zip(grid, states)))
    )
    (directory / "controls.dat").write_text(
        _dat_lines(control_header, ([t, *row] for t, row in zip(grid, controls)))
    )
    (directory / "deltas.dat").write_text(
        _dat_lines("iteration delta", ([k + 1, d] for k, d in enumerate(deltas)))
    )
    return directory
