"""Time grids and reverse-process integrators driven by an exact score.

Grids are stored in integration order (``t_max`` first). Solvers march the
reverse SDE/ODE in forward time, so every step has a negative ``h``.

Batches draw each trajectory's prior sample and noise from its own Philox
stream keyed by ``(seed, trajectory index)``; batches are cut into fixed-size
chunks, so the output does not depend on how many threads process them.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Mapping, Protocol

import numpy as np

from .errors import InvalidInputError, InvalidParameterError, ScheduleDomainError
from .schedules import DEFAULT_EPS, Family, KernelCoeffs, ScheduleSpec, eval_point, to_kernel
from .sde import reverse_rhs, tvsnr_sde

__all__ = [
    "TimeGrid",
    "Trajectory",
    "uniform_grid",
    "edm_grid",
    "default_grid",
    "sample_prior",
    "trajectory_rng",
    "solve_euler",
    "solve_heun",
    "solve_sde",
    "sample_batch",
    "count_nfe",
    "euler_onto_last",
    "resolve_threads",
]

DEFAULT_CHUNK = 2048


class ScoreSource(Protocol):
    def score(self, kern: KernelCoeffs, x: np.ndarray) -> np.ndarray: ...


@dataclass(frozen=True, eq=False)
class TimeGrid:
    """Strictly decreasing integration nodes ``t_0 = t_max > ... > t_N = t_min``."""

    times: np.ndarray
    kind: str = "uniform"
    sigmas: np.ndarray | None = None

    def __post_init__(self) -> None:
        times = np.array(self.times, dtype=float).reshape(-1)
        if times.size < 2:
            raise InvalidInputError("a time grid needs at least one step")
        if not np.all(np.isfinite(times)) or np.any(np.diff(times) >= 0):
            raise InvalidInputError("grid times must be finite and strictly decreasing")
        if self.kind not in ("uniform", "edm_rho", "custom"):
            raise InvalidInputError(f"unknown grid kind {self.kind!r}")
        times.flags.writeable = False
        object.__setattr__(self, "times", times)
        if self.sigmas is not None:
            sig = np.array(self.sigmas, dtype=float).reshape(-1)
            if sig.shape != times.shape:
                raise InvalidInputError("sigmas must match times")
            sig.flags.writeable = False
            object.__setattr__(self, "sigmas", sig)

    @property
    def steps(self) -> int:
        return self.times.size - 1

    @property
    def t_max(self) -> float:
        return float(self.times[0])

    @property
    def t_min(self) -> float:
        return float(self.times[-1])

    @property
    def euler_last(self) -> bool:
        # the sigma_N = 0 node of the rho-grid is a stand-in; step onto it with Euler
        return self.kind == "edm_rho"

    def same_as(self, other: "TimeGrid") -> bool:
        return self.kind == other.kind and np.array_equal(self.times, other.times)

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"kind": self.kind, "times": self.times.tolist()}
        if self.sigmas is not None:
            out["sigmas"] = self.sigmas.tolist()
        return out

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "TimeGrid":
        return cls(data["times"], data.get("kind", "custom"), data.get("sigmas"))

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "TimeGrid":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True, eq=False)
class Trajectory:
    """States along a grid; ``states`` has shape ``(N + 1, *batch, d)``."""

    grid: TimeGrid
    states: np.ndarray
    seed: int | None = None
    lam: float = 0.0

    @property
    def prior(self) -> np.ndarray:
        return self.states[0]

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    @property
    def batch_size(self) -> int:
        return int(np.prod(self.states.shape[1:-1], dtype=int))


def uniform_grid(steps: int, t_min: float, t_max: float) -> TimeGrid:
    """``steps + 1`` equally spaced nodes from ``t_max`` down to ``t_min``."""
    if steps < 1:
        raise InvalidInputError("steps must be >= 1")
    if not t_min < t_max:
        raise InvalidInputError("need t_min < t_max")
    times = t_max + (t_min - t_max) * (np.arange(steps + 1) / steps)
    times[-1] = t_min
    return TimeGrid(times, "uniform")


def edm_grid(
    steps: int,
    sigma_min: float,
    sigma_max: float,
    rho: float,
    t_floor: float = DEFAULT_EPS,
) -> TimeGrid:
    """The rho-power noise grid ``sigma_i = (s_max^(1/rho) + i/(N-1) (s_min^(1/rho) - s_max^(1/rho)))^rho``.

    ``sigmas`` ends with the exact zero node; its time (``sigma(t) = t``) is
    mapped to ``t_floor`` so the schedule stays finite there.
    """
    if steps < 2:
        raise InvalidInputError("the rho-grid needs steps >= 2")
    if not 0.0 < sigma_min < sigma_max:
        raise InvalidInputError("need 0 < sigma_min < sigma_max")
    if rho <= 0:
        raise InvalidInputError("rho must be positive")
    if not 0.0 < t_floor < sigma_min:
        raise InvalidInputError("t_floor must lie in (0, sigma_min)")
    i = np.arange(steps)
    hi, lo = sigma_max ** (1.0 / rho), sigma_min ** (1.0 / rho)
    sig = (hi + i / (steps - 1) * (lo - hi)) ** rho
    sig[0], sig[-1] = sigma_max, sigma_min
    sigmas = np.append(sig, 0.0)
    times = np.append(sig, t_floor)
    return TimeGrid(times, "edm_rho", sigmas)


def default_grid(spec: ScheduleSpec, steps: int) -> TimeGrid:
    """The grid a schedule is normally sampled with: the rho-grid for EDM, else uniform."""
    if spec.family is Family.EDM:
        p = spec.params
        return edm_grid(steps, p["sigma_min"], p["sigma_max"], p["rho"], p["eps"])
    lo, hi = spec.interval
    return uniform_grid(steps, lo, hi)


def resolve_threads(threads: int | None = None) -> int:
    """Worker count: explicit value, else ``os.cpu_count()``, capped by ``TVSNR_THREADS``."""
    n = threads if threads is not None else (os.cpu_count() or 1)
    cap = os.environ.get("TVSNR_THREADS")
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError:
            raise InvalidParameterError(f"TVSNR_THREADS must be an integer, got {cap!r}") from None
    return max(1, int(n))


def trajectory_rng(seed: int, index: int) -> np.random.Generator:
    """Independent counter-based stream for trajectory ``index`` of run ``seed``."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(index)])))


def sample_prior(spec: ScheduleSpec, d: int, rng: np.random.Generator, n: int | None = None, t: float | None = None):
    """Draw from ``N(0, tau^2(t_max) I)``; standardized data give total variance ``tau^2``."""
    t_top = spec.interval[1] if t is None else t
    scale = math.sqrt(float(eval_point(spec, t_top).tv_sq))
    shape = (d,) if n is None else (n, d)
    return scale * rng.standard_normal(shape)


def _drift(spec: ScheduleSpec, mix: ScoreSource, x: np.ndarray, t: float, lam: float = 0.0):
    point = eval_point(spec, t)
    return reverse_rhs(x, mix.score(to_kernel(point), x), tvsnr_sde(point), lam)


def euler_onto_last(spec: ScheduleSpec, grid: TimeGrid) -> bool:
    """Whether Heun takes an Euler step onto the final node.

    True for the zero-noise node of a rho-grid and for an ``eps`` node clamping
    an SNR singularity at ``t = 0``, where the ODE right-hand side grows without
    bound and the corrector stage overshoots.
    """
    if grid.euler_last:
        return True
    return spec.clamped_start and math.isclose(grid.t_min, spec.interval[0], rel_tol=1e-9, abs_tol=0.0)


def _integrate(spec, grid, mix, x, method, lam=0.0, noise=None, seed=None):
    x = np.array(x, dtype=float)
    times = grid.times
    states = np.empty((times.size,) + x.shape)
    states[0] = x
    last = grid.steps - 1
    euler_last = euler_onto_last(spec, grid)
    for i in range(grid.steps):
        t, t_next = float(times[i]), float(times[i + 1])
        h = t_next - t
        d1, noise_scale = _drift(spec, mix, x, t, lam)
        if method == "heun" and not (i == last and euler_last):
            try:
                d2, _ = _drift(spec, mix, x + h * d1, t_next)
            except ScheduleDomainError:
                x = x + h * d1
            else:
                x = x + h * (0.5 * (d1 + d2))
        else:
            x = x + h * d1
            # no noise on the final step: it cannot be removed afterwards
            if lam > 0.0 and i < last:
                x = x + (noise_scale * math.sqrt(-h)) * noise[i]
        states[i + 1] = x
    return Trajectory(grid, states, seed, float(lam))


def solve_euler(spec: ScheduleSpec, grid: TimeGrid, score_source: ScoreSource, prior_sample) -> Trajectory:
    """First-order Euler solve of the probability-flow ODE."""
    return _integrate(spec, grid, score_source, prior_sample, "euler")


def solve_heun(spec: ScheduleSpec, grid: TimeGrid, score_source: ScoreSource, prior_sample) -> Trajectory:
    """Heun (trapezoidal predictor-corrector) solve of the probability-flow ODE.

    Falls back to Euler on the step onto the final node when the schedule is
    singular there (see :func:`euler_onto_last`), or whenever the schedule is
    undefined at the next node.
    """
    return _integrate(spec, grid, score_source, prior_sample, "heun")


def solve_sde(
    spec: ScheduleSpec,
    grid: TimeGrid,
    score_source: ScoreSource,
    prior_sample,
    lam: float,
    seed: int | None = None,
    *,
    noise: np.ndarray | None = None,
) -> Trajectory:
    """Euler-Maruyama solve of the reverse SDE with stochasticity ``lam``.

    Noise comes from ``noise`` (shape ``(N, *prior_sample.shape)``) if given,
    else from a Philox stream seeded by ``seed``. ``lam = 0`` reproduces
    :func:`solve_euler` exactly.
    """
    if lam < 0:
        raise InvalidInputError("lambda must be non-negative")
    x = np.asarray(prior_sample, dtype=float)
    if lam > 0 and noise is None:
        if seed is None:
            raise InvalidInputError("solve_sde with lam > 0 needs a seed or explicit noise")
        rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed))))
        noise = rng.standard_normal((grid.steps,) + x.shape)
    return _integrate(spec, grid, score_source, x, "euler", lam, noise, seed)


def count_nfe(solver: str, grid: TimeGrid, spec: ScheduleSpec | None = None) -> int:
    """Score evaluations used by one solve."""
    if solver == "heun":
        last = grid.euler_last if spec is None else euler_onto_last(spec, grid)
        return 2 * grid.steps - (1 if last else 0)
    return grid.steps


def _solve_chunk(spec, grid, mix, solver, lam, seed, start, stop):
    d = mix.dim
    t_top = grid.t_max
    scale = math.sqrt(float(eval_point(spec, t_top).tv_sq))
    priors = np.empty((stop - start, d))
    noise = np.empty((grid.steps, stop - start, d)) if solver == "sde" else None
    for j, idx in enumerate(range(start, stop)):
        rng = trajectory_rng(seed, idx)
        priors[j] = scale * rng.standard_normal(d)
        if noise is not None:
            noise[:, j] = rng.standard_normal((grid.steps, d))
    if solver == "euler":
        return solve_euler(spec, grid, mix, priors).states
    if solver == "heun":
        return solve_heun(spec, grid, mix, priors).states
    return solve_sde(spec, grid, mix, priors, lam, seed, noise=noise).states


def sample_batch(
    spec: ScheduleSpec,
    grid: TimeGrid,
    mix: ScoreSource,
    n: int,
    seed: int,
    solver: str = "heun",
    lam: float = 0.0,
    threads: int | None = None,
    chunk: int = DEFAULT_CHUNK,
) -> Trajectory:
    """Solve ``n`` trajectories from fresh prior draws; states are ``(N + 1, n, d)``.

    Trajectory ``i`` depends only on ``(seed, i)``, never on ``threads``.
    """
    if solver not in ("euler", "heun", "sde"):
        raise InvalidInputError(f"unknown solver {solver!r}")
    if n < 1:
        raise InvalidInputError("batch size must be >= 1")
    if solver != "sde" and lam != 0:
        raise InvalidInputError("lambda > 0 requires the sde solver")
    bounds = [(s, min(s + chunk, n)) for s in range(0, n, chunk)]
    workers = min(resolve_threads(threads), len(bounds))
    if workers == 1:
        parts = [_solve_chunk(spec, grid, mix, solver, lam, seed, s, e) for s, e in bounds]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda b: _solve_chunk(spec, grid, mix, solver, lam, seed, *b), bounds))
    return Trajectory(grid, np.concatenate(parts, axis=1), seed, float(lam))
