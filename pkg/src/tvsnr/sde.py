r"""Forward/reverse SDE coefficients and the kernel <-> SDE conversions.

The forward process is the affine Ito SDE

.. math:: dx = f(t)\, x\, dt + g(t)\, dw,

and its reverse-time family, written in *forward* time and integrated from
``t_max`` down to ``t_min``, is

.. math:: dx = \Big[f(t)\, x - \tfrac{1 + \lambda^2}{2} g^2(t) \nabla_x \log p_t(x)\Big] dt
          + \lambda g(t)\, d\bar w .

``lambda = 0`` is the probability-flow ODE. (In reversed time
:math:`\tilde t = 1 - t` the drift flips sign; we never switch variables.)
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable

import numpy as np
from scipy.special import expit

from .errors import InvalidInputError
from .quadrature import gauss_kronrod
from .schedules import KernelCoeffs, SchedulePoint, ScheduleSpec, eval_point

__all__ = [
    "SdeCoeffs",
    "tvsnr_sde",
    "sde_coeffs",
    "kernel_to_sde",
    "sde_to_kernel_quadrature",
    "reverse_rhs",
    "simulate_forward",
]


@dataclass(frozen=True)
class SdeCoeffs:
    """Drift coefficient ``f`` and squared diffusion ``g_sq`` at one time."""

    f: Any
    g_sq: Any

    @property
    def g(self):
        return np.sqrt(self.g_sq)


def tvsnr_sde(point: SchedulePoint) -> SdeCoeffs:
    """Drift and diffusion of the SDE whose kernel has the given TV and SNR.

    ``f = dlog tau + dlog gamma / (1 + gamma^2)`` and
    ``g^2 = -2 tau^2 dlog gamma / (1 + gamma^2)``.
    """
    dlog_snr = np.asarray(point.dlog_snr, dtype=float)
    if np.any(dlog_snr >= 0):
        raise InvalidInputError("SNR must be strictly decreasing (dlog_snr < 0)")
    noise_frac = expit(-np.asarray(point.log_snr_sq, dtype=float))
    f = point.dlog_tv + dlog_snr * noise_frac
    g_sq = -2.0 * point.tv_sq * dlog_snr * noise_frac
    return SdeCoeffs(f=f[()], g_sq=g_sq[()])


def sde_coeffs(spec: ScheduleSpec, t) -> SdeCoeffs:
    return tvsnr_sde(eval_point(spec, t))


def kernel_to_sde(a, a_dot, b, b_dot) -> SdeCoeffs:
    """SDE coefficients reproducing a kernel with scales ``a(t)``, ``b(t)``.

    ``f = a_dot / a`` and ``g^2 = 2 a b d/dt(b / a)``.
    """
    a, a_dot, b, b_dot = (np.asarray(v, dtype=float) for v in (a, a_dot, b, b_dot))
    if np.any(a <= 0) or np.any(b <= 0):
        raise InvalidInputError("kernel scales a and b must be positive")
    f = a_dot / a
    # 2 a b d/dt(b/a) = 2 b^2 (b_dot/b - a_dot/a)
    ratio_rate = b_dot / b - f
    if np.any(ratio_rate <= 0):
        raise InvalidInputError("b/a must be strictly increasing in t")
    return SdeCoeffs(f=f[()], g_sq=(2.0 * b * b * ratio_rate)[()])


def sde_to_kernel_quadrature(
    f: Callable[[np.ndarray], np.ndarray],
    g_sq: Callable[[np.ndarray], np.ndarray],
    t: float,
    tol: float = 1e-9,
    *,
    t0: float = 0.0,
    a0: float = 1.0,
    b0: float = 0.0,
    max_intervals: int = 20000,
) -> KernelCoeffs:
    """Kernel scales of the affine SDE by adaptive quadrature.

    With ``F(s) = int_{t0}^s f``::

        a(t)   = a0 exp(F(t))
        b^2(t) = a(t)^2 (b0^2 + int_{t0}^t g^2(s) exp(-2 F(s)) ds) / a0^2

    which for ``(t0, a0, b0) = (0, 1, 0)`` is the usual kernel of a process
    started at a deterministic point. ``f`` and ``g_sq`` must accept arrays.

    Raises
    ------
    QuadratureError
        If ``tol`` cannot be met within ``max_intervals``.
    """
    if tol <= 0:
        raise InvalidInputError("tol must be positive")
    if t == t0:
        return KernelCoeffs(float(a0), float(b0))
    inner_tol = 0.1 * tol

    def log_growth(s: np.ndarray) -> np.ndarray:
        # F(s) for a vector of upper limits, via s -> t0 + (s - t0) u on u in [0, 1]
        span = s - t0

        def integrand(u):
            nodes = t0 + span[None, :] * u[:, None]
            return span[None, :] * np.asarray(f(nodes.ravel()), dtype=float).reshape(nodes.shape)

        value, _ = gauss_kronrod(integrand, 0.0, 1.0, rtol=inner_tol, atol=1e-15, max_intervals=max_intervals)
        return value

    def weighted_noise(s: np.ndarray) -> np.ndarray:
        return np.asarray(g_sq(s), dtype=float) * np.exp(-2.0 * log_growth(s))

    log_a = float(log_growth(np.array([t], dtype=float))[0])
    acc, _ = gauss_kronrod(weighted_noise, t0, t, rtol=tol, atol=1e-300, max_intervals=max_intervals)
    a = a0 * np.exp(log_a)
    b_sq = (a / a0) ** 2 * (b0 * b0 + float(acc))
    return KernelCoeffs(float(a), float(np.sqrt(max(b_sq, 0.0))))


def reverse_rhs(x, score, coeffs: SdeCoeffs, lam: float = 0.0):
    """Drift and noise scale of the reverse SDE at one time.

    Returns ``(drift, noise_scale)`` with ``drift = f x - (1 + lam^2)/2 g^2 score``
    (to be multiplied by a negative time step) and ``noise_scale = lam g``.
    """
    if lam < 0:
        raise InvalidInputError("lambda must be non-negative")
    drift = coeffs.f * np.asarray(x) - 0.5 * (1.0 + lam * lam) * coeffs.g_sq * np.asarray(score)
    return drift, lam * np.sqrt(coeffs.g_sq)


def simulate_forward(
    spec: ScheduleSpec,
    x0,
    times,
    n_paths: int,
    rng: np.random.Generator,
    record=None,
):
    """Euler-Maruyama paths of the forward SDE started at ``x0`` at ``times[0]``.

    Coefficients are evaluated at the left node of each step, clamped to the
    schedule's evaluation window (so a grid may start at a singular ``t = 0``).
    Returns ``{t: samples}`` for every node in ``record`` (default: last node).
    """
    times = np.asarray(times, dtype=float)
    lo, hi = spec.interval
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    x = np.broadcast_to(x0, (n_paths,) + x0.shape).copy()
    wanted = [float(times[-1])] if record is None else [float(r) for r in record]
    idx = {}
    for r in wanted:
        hit = np.flatnonzero(np.isclose(times, r, rtol=0.0, atol=1e-12))
        if hit.size == 0:
            raise InvalidInputError(f"record time {r!r} is not a grid node")
        idx[int(hit[0])] = r
    coeffs = sde_coeffs(spec, np.clip(times[:-1], lo, hi))
    f = np.broadcast_to(coeffs.f, times[:-1].shape)
    g = np.sqrt(np.broadcast_to(coeffs.g_sq, times[:-1].shape))
    out = {}
    if 0 in idx:
        out[idx[0]] = x.copy()
    for i, h in enumerate(np.diff(times)):
        x = x + f[i] * x * h + g[i] * np.sqrt(h) * rng.standard_normal(x.shape)
        if i + 1 in idx:
            out[idx[i + 1]] = x.copy()
    return out
