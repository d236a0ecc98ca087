r"""Exact marginals and scores for mixture data distributions.

For data :math:`x_0 \sim \sum_i w_i\, \mathcal{N}(c_i, v I)` (``v = 0`` gives a
mixture of point masses) the marginal at kernel scales ``(a, b)`` is

.. math:: p_t(x) = \sum_i w_i\, \mathcal{N}\big(x;\ a c_i,\ (a^2 v + b^2) I\big),

so the score and, for point masses, the posterior mean (Tweedie) are closed form.
Arrays of states have shape ``(..., d)``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Any, Mapping

import numpy as np
from scipy.special import logsumexp, softmax

from .errors import DegenerateDensityError, InvalidParameterError
from .schedules import KernelCoeffs

__all__ = [
    "MixtureData",
    "marginal_logpdf",
    "responsibilities",
    "score",
    "posterior_mean",
    "three_delta",
]


@dataclass(frozen=True, eq=False)
class MixtureData:
    """Weighted isotropic mixture standing in for the data distribution."""

    weights: np.ndarray
    centers: np.ndarray
    center_var: float = 0.0

    def __post_init__(self) -> None:
        w = np.array(self.weights, dtype=float).reshape(-1)
        c = np.array(self.centers, dtype=float)
        if c.ndim == 1:
            c = c[:, None]
        if c.ndim != 2 or c.shape[0] != w.size or w.size == 0:
            raise InvalidParameterError("centers must have shape (K, d) matching K weights")
        if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
            raise InvalidParameterError("weights must be non-negative and sum to 1")
        if not np.all(np.isfinite(c)):
            raise InvalidParameterError("centers must be finite")
        if not (self.center_var >= 0 and math.isfinite(self.center_var)):
            raise InvalidParameterError("center_var must be finite and >= 0")
        w.flags.writeable = False
        c.flags.writeable = False
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "centers", c)
        object.__setattr__(self, "center_var", float(self.center_var))

    @property
    def dim(self) -> int:
        return self.centers.shape[1]

    @property
    def is_delta(self) -> bool:
        return self.center_var == 0.0

    def logpdf(self, kern: KernelCoeffs, x) -> np.ndarray:
        return marginal_logpdf(self, kern, x)

    def score(self, kern: KernelCoeffs, x) -> np.ndarray:
        return score(self, kern, x)

    def posterior_mean(self, kern: KernelCoeffs, x) -> np.ndarray:
        return posterior_mean(self, kern, x)

    def to_dict(self) -> dict[str, Any]:
        return {
            "weights": self.weights.tolist(),
            "centers": self.centers.tolist(),
            "center_var": self.center_var,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "MixtureData":
        try:
            return cls(data["weights"], data["centers"], data.get("center_var", 0.0))
        except KeyError as exc:
            raise InvalidParameterError(f"mixture record is missing {exc.args[0]!r}") from None

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "MixtureData":
        return cls.from_dict(json.loads(text))

    @classmethod
    def preset(cls, name: str) -> "MixtureData":
        if name == "three-delta":
            return three_delta()
        if name == "single-delta":
            return cls([1.0], [[0.0]])
        raise InvalidParameterError(f"unknown mixture preset {name!r}")


def three_delta() -> MixtureData:
    """Three equal-weight point masses at ``0, +-sqrt(3/2)`` (zero mean, unit variance)."""
    r = math.sqrt(1.5)
    return MixtureData(np.full(3, 1.0 / 3.0), [[0.0], [r], [-r]])


def _component_logpdf(mix: MixtureData, kern: KernelCoeffs, x):
    x = np.asarray(x, dtype=float)
    if x.shape[-1:] != (mix.dim,):
        raise InvalidParameterError(f"states must end in dimension {mix.dim}, got shape {x.shape}")
    a = float(kern.a)
    var = a * a * mix.center_var + float(kern.b) ** 2
    if var <= 0.0:
        raise DegenerateDensityError("marginal variance is zero (b = 0 and center_var = 0)")
    diff = x[..., None, :] - a * mix.centers
    sq = np.sum(diff * diff, axis=-1)
    with np.errstate(divide="ignore"):
        log_w = np.log(mix.weights)
    comp = log_w - 0.5 * sq / var - 0.5 * mix.dim * math.log(2.0 * math.pi * var)
    return comp, diff, var


def marginal_logpdf(mix: MixtureData, kern: KernelCoeffs, x) -> np.ndarray:
    """Log of the mixture marginal density at states ``x`` (shape ``(..., d)``)."""
    comp, _, _ = _component_logpdf(mix, kern, x)
    return logsumexp(comp, axis=-1)


def responsibilities(mix: MixtureData, kern: KernelCoeffs, x) -> np.ndarray:
    """Posterior component probabilities, shape ``(..., K)``."""
    comp, _, _ = _component_logpdf(mix, kern, x)
    return softmax(comp, axis=-1)


def score(mix: MixtureData, kern: KernelCoeffs, x) -> np.ndarray:
    """Exact score ``sum_i r_i(x) (a c_i - x) / (a^2 v + b^2)``."""
    comp, diff, var = _component_logpdf(mix, kern, x)
    r = softmax(comp, axis=-1)
    return -np.sum(r[..., None] * diff, axis=-2) / var


def posterior_mean(mix: MixtureData, kern: KernelCoeffs, x) -> np.ndarray:
    """``E[x_0 | x_t = x]`` for point-mass mixtures.

    Satisfies Tweedie's formula ``score = (a E[x_0 | x] - x) / b^2``.
    """
    if not mix.is_delta:
        raise NotImplementedError("posterior mean is only implemented for point-mass mixtures")
    r = responsibilities(mix, kern, x)
    return np.sum(r[..., None] * mix.centers, axis=-2)
