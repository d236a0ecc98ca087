"""CSV/JSON writers for grids, trajectories and analysis reports.

Floats are written with 17 significant digits, so every value survives a
text round trip bit for bit. Files are UTF-8 with ``\\n`` line endings and are
always produced by a single writer.
"""

from __future__ import annotations

import json
import os
from pathlib import Path
from typing import Any, Iterable, Mapping

import numpy as np

from .analysis import CurvatureReport, SupportReport
from .samplers import TimeGrid, Trajectory

__all__ = [
    "fmt_float",
    "write_csv",
    "write_json",
    "write_trajectories_long",
    "write_trajectory_files",
    "write_curvature",
    "write_support",
    "write_shadow",
    "write_grid",
    "read_csv",
]

FLOAT_FMT = "%.17g"


def fmt_float(x: float) -> str:
    return FLOAT_FMT % x


def _open(path: os.PathLike | str):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    return open(path, "w", encoding="utf-8", newline="\n")


def write_csv(path, header: Iterable[str], columns: Iterable[np.ndarray]) -> Path:
    """Write equal-length numeric columns; integer columns stay integers."""
    cols = [np.asarray(c).reshape(-1) for c in columns]
    if cols and any(c.size != cols[0].size for c in cols):
        raise ValueError("columns must have equal length")
    row_fmt = ",".join("%d" if np.issubdtype(c.dtype, np.integer) else FLOAT_FMT for c in cols) + "\n"
    with _open(path) as fh:
        fh.write(",".join(header) + "\n")
        fh.writelines(map(row_fmt.__mod__, zip(*(c.tolist() for c in cols))))
    return Path(path)


def write_json(path, data: Mapping[str, Any]) -> Path:
    with _open(path) as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return Path(path)


def _flat_states(traj: Trajectory) -> np.ndarray:
    s = traj.states
    return s.reshape(s.shape[0], -1, s.shape[-1])


def write_trajectories_long(path, traj: Trajectory) -> Path:
    """Combined long-format CSV ``traj_id,t,dim,value`` (trajectory-major order)."""
    states = _flat_states(traj)
    steps, n, d = states.shape
    # (traj, time, dim) ordering
    values = np.transpose(states, (1, 0, 2))
    traj_id = np.broadcast_to(np.arange(n)[:, None, None], values.shape)
    t = np.broadcast_to(traj.grid.times[None, :, None], values.shape)
    dim = np.broadcast_to(np.arange(d)[None, None, :], values.shape)
    return write_csv(path, ("traj_id", "t", "dim", "value"), (traj_id, t, dim, values))


def write_trajectory_files(directory, traj: Trajectory, stem: str = "traj") -> list[Path]:
    """One ``t,x_0,...,x_{d-1}`` file per trajectory."""
    states = _flat_states(traj)
    d = states.shape[-1]
    header = ["t"] + [f"x_{k}" for k in range(d)]
    width = len(str(states.shape[1] - 1))
    out = []
    for j in range(states.shape[1]):
        cols = [traj.grid.times] + [states[:, j, k] for k in range(d)]
        out.append(write_csv(Path(directory) / f"{stem}_{j:0{width}d}.csv", header, cols))
    return out


def write_grid(path, grid: TimeGrid) -> Path:
    return write_json(path, grid.to_dict())


def write_curvature(path, report: CurvatureReport, extra: Mapping[str, Any] | None = None) -> tuple[Path, Path]:
    """``t,local`` CSV plus a JSON sidecar (same stem) holding the global value."""
    csv_path = write_csv(path, ("t", "local"), (report.times, report.local))
    meta = {"global_curvature": report.global_curvature, "n_nodes": int(report.times.size)}
    meta.update(extra or {})
    return csv_path, write_json(Path(path).with_suffix(".json"), meta)


def write_support(path, report: SupportReport, extra: Mapping[str, Any] | None = None) -> tuple[Path, Path]:
    csv_path = write_csv(path, ("t", "rel_support"), (report.times, report.rel_support))
    meta = {"t_max": float(report.times[0]), "n_nodes": int(report.times.size)}
    meta.update(extra or {})
    return csv_path, write_json(Path(path).with_suffix(".json"), meta)


def write_shadow(path, t_grid, x_grid, pdf) -> Path:
    """Long-format ``t,x,pdf`` (time-major)."""
    t_grid = np.asarray(t_grid, dtype=float)
    x_grid = np.asarray(x_grid, dtype=float)
    tt, xx = np.meshgrid(t_grid, x_grid, indexing="ij")
    return write_csv(path, ("t", "x", "pdf"), (tt, xx, np.asarray(pdf, dtype=float)))


def read_csv(path) -> tuple[list[str], np.ndarray]:
    """Header and a float matrix of a file written by :func:`write_csv`."""
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n").split(",")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    return header, data
