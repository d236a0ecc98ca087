"""Trajectory and marginal diagnostics for the analytic toy problem.

* local curvature ``E ||chord - dx/dt||^2`` along probability-flow trajectories,
  with ``dx/dt`` taken from the ODE right-hand side and the chord being the
  straight-line velocity between the trajectory's end states,
* the global curvature (trapezoidal integral of the local curve over ``t``),
* relative support ``b(t) / b(t_max)`` of the marginal,
* peak capture of generated samples and density "shadows" ``p_t(x)``.

Batch means use :func:`math.fsum`, so reported statistics do not depend on the
order of trajectories in a batch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.optimize import brentq

from .errors import InvalidInputError
from .samplers import TimeGrid, Trajectory, uniform_grid
from .schedules import ScheduleSpec, eval_point, kernel, to_kernel
from .score import MixtureData
from .sde import reverse_rhs, tvsnr_sde

__all__ = [
    "CurvatureReport",
    "SupportReport",
    "PeakCapture",
    "curvature",
    "relative_support",
    "support_crossing",
    "peak_capture",
    "density_shadow",
]


@dataclass(frozen=True, eq=False)
class CurvatureReport:
    times: np.ndarray
    local: np.ndarray
    global_curvature: float


@dataclass(frozen=True, eq=False)
class SupportReport:
    times: np.ndarray
    rel_support: np.ndarray


@dataclass(frozen=True)
class PeakCapture:
    counts: tuple[int, ...]
    outside: int
    total: int

    @property
    def fractions(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(c, self.total) for c in self.counts)

    @property
    def outside_fraction(self) -> Fraction:
        return Fraction(self.outside, self.total)

    def to_dict(self) -> dict:
        return {
            "counts": list(self.counts),
            "outside": self.outside,
            "total": self.total,
            "fractions": [float(f) for f in self.fractions],
            "outside_fraction": float(self.outside_fraction),
        }


def _stack(batch: Trajectory | Sequence[Trajectory]) -> Trajectory:
    if isinstance(batch, Trajectory):
        return batch
    batch = list(batch)
    if not batch:
        raise InvalidInputError("empty trajectory batch")
    grid = batch[0].grid
    for tr in batch[1:]:
        if not tr.grid.same_as(grid):
            raise InvalidInputError("all trajectories must share one time grid")
    if any(tr.lam != batch[0].lam for tr in batch):
        raise InvalidInputError("trajectories mix different lambda values")
    states = np.stack([tr.states.reshape(tr.states.shape[0], -1, tr.states.shape[-1]) for tr in batch], axis=1)
    states = states.reshape(states.shape[0], -1, states.shape[-1])
    return Trajectory(grid, states, batch[0].seed, batch[0].lam)


def curvature(batch: Trajectory | Sequence[Trajectory], spec: ScheduleSpec, score_source: MixtureData) -> CurvatureReport:
    """Local and global curvature of probability-flow trajectories.

    The chord is ``(x(t_max) - x(t_min)) / (t_max - t_min)``, i.e. the velocity of
    the straight line joining the prior draw and the generated sample.
    """
    traj = _stack(batch)
    if traj.lam != 0.0:
        raise InvalidInputError("curvature is defined for probability-flow (lambda = 0) trajectories")
    times = traj.grid.times
    states = traj.states.reshape(traj.states.shape[0], -1, traj.states.shape[-1])
    chord = (states[0] - states[-1]) / (times[0] - times[-1])
    local = np.empty(times.size)
    for i, t in enumerate(times):
        point = eval_point(spec, float(t))
        x = states[i]
        velocity, _ = reverse_rhs(x, score_source.score(to_kernel(point), x), tvsnr_sde(point))
        dev = np.sum((chord - velocity) ** 2, axis=-1)
        local[i] = math.fsum(dev.tolist()) / dev.size
    # grid runs downward in t
    total = float(np.sum(0.5 * (local[1:] + local[:-1]) * -np.diff(times)))
    return CurvatureReport(times.copy(), local, total)


def relative_support(spec: ScheduleSpec, grid: TimeGrid) -> SupportReport:
    """``b(t) / b(t_max)`` at every grid node, ``t_max`` being the grid's first node."""
    b = np.asarray(kernel(spec, grid.times).b, dtype=float)
    return SupportReport(grid.times.copy(), b / b[0])


def support_crossing(spec: ScheduleSpec, level: float = 0.9, t_max: float | None = None) -> float:
    """Earliest time at which ``b(t) / b(t_max)`` reaches ``level``."""
    if not 0.0 < level < 1.0:
        raise InvalidInputError("level must lie in (0, 1)")
    lo, hi = spec.interval
    top = hi if t_max is None else t_max
    b_top = float(kernel(spec, top).b)

    def gap(t):
        return float(kernel(spec, t).b) / b_top - level

    if gap(lo) >= 0.0:
        return lo
    return brentq(gap, lo, top, xtol=1e-14, rtol=1e-14)


def peak_capture(samples, mix: MixtureData, tol: float = 1e-2) -> PeakCapture:
    """Assign each sample to its nearest center within ``tol`` (ties go to the lower index)."""
    if tol <= 0:
        raise InvalidInputError("tol must be positive")
    x = np.asarray(samples, dtype=float).reshape(-1, mix.dim)
    dist = np.sqrt(np.sum((x[:, None, :] - mix.centers[None, :, :]) ** 2, axis=-1))
    nearest = np.argmin(dist, axis=1)  # argmin returns the first minimum
    inside = dist[np.arange(x.shape[0]), nearest] <= tol
    counts = np.bincount(nearest[inside], minlength=mix.centers.shape[0])
    return PeakCapture(tuple(int(c) for c in counts), int(np.count_nonzero(~inside)), int(x.shape[0]))


def density_shadow(
    mix: MixtureData,
    spec: ScheduleSpec,
    t_grid=None,
    x_grid=None,
):
    """Marginal density ``p_t(x)`` on a ``(t, x)`` lattice of a 1-D mixture.

    Defaults: 201 times spanning the schedule window and 401 points on
    ``[-4 tau(t_max), 4 tau(t_max)]``. Returns ``(t_grid, x_grid, pdf)`` with
    ``pdf`` of shape ``(len(t_grid), len(x_grid))``.
    """
    if mix.dim != 1:
        raise InvalidInputError("density shadows are defined for 1-D mixtures")
    lo, hi = spec.interval
    if t_grid is None:
        t_grid = uniform_grid(200, lo, hi).times[::-1]
    t_grid = np.asarray(t_grid, dtype=float).reshape(-1)
    if x_grid is None:
        half = 4.0 * math.sqrt(float(eval_point(spec, hi).tv_sq))
        x_grid = np.linspace(-half, half, 401)
    x_grid = np.asarray(x_grid, dtype=float).reshape(-1)
    if t_grid.size == 0 or x_grid.size == 0:
        raise InvalidInputError("grids must be non-empty")
    pdf = np.empty((t_grid.size, x_grid.size))
    for i, t in enumerate(t_grid):
        pdf[i] = np.exp(mix.logpdf(kernel(spec, float(t)), x_grid[:, None]))
    return t_grid, x_grid, pdf
