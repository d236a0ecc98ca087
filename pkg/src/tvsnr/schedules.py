r"""TV/SNR noise schedules.

Every schedule is described by two functions of the forward time ``t``
(``t = 0`` is data, ``t = 1`` is the prior):

* the total variance :math:`\tau^2(t) = a^2(t) + b^2(t)`,
* the signal-to-noise ratio :math:`\gamma(t) = a(t) / b(t)`,

of the Gaussian perturbation kernel

.. math:: p(x_t \mid x_0) = \mathcal{N}\big(x_t;\ a(t) x_0,\ b^2(t) I\big),
   \qquad a^2 = \frac{\tau^2 \gamma^2}{1 + \gamma^2},\quad b^2 = \frac{\tau^2}{1 + \gamma^2}.

Any schedule can be turned into its variance-preserving counterpart by forcing
:math:`\tau^2 \equiv 1` while keeping :math:`\gamma` (``vp=True``).

The SNR is always handled as :math:`\ell(t) = \log \gamma^2(t)`; the factors
:math:`1/(1+\gamma^2)` and :math:`\gamma^2/(1+\gamma^2)` are logistic functions of
:math:`\ell` and never overflow.

The EDM family keeps its native time variable ``t = sigma`` (so its domain is
``(0, sigma_max]``); every other family lives on ``[0, 1]``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Mapping

import numpy as np
from scipy.special import expit

from .errors import InvalidParameterError, ScheduleDomainError

__all__ = [
    "Family",
    "ScheduleSpec",
    "SchedulePoint",
    "KernelCoeffs",
    "CATALOG",
    "DEFAULT_EPS",
    "eval_point",
    "eval_issnr",
    "snr_endpoints",
    "to_kernel",
    "kernel",
    "kernel_derivatives",
    "get_schedule",
    "issnr_scaled_eta",
]

DEFAULT_EPS = 1e-5


class Family(str, Enum):
    SMLD = "SMLD"
    EDM = "EDM"
    EDM_UT = "EDM_UT"
    OTFM = "OTFM"
    DDPM_LINEAR = "DDPM_LINEAR"
    DDPM_COS = "DDPM_COS"
    ISSNR = "ISSNR"

    @classmethod
    def parse(cls, name: "str | Family") -> "Family":
        if isinstance(name, Family):
            return name
        key = str(name).strip().upper().replace("-", "_")
        try:
            return cls(key)
        except ValueError:
            raise InvalidParameterError(f"unknown schedule family {name!r}") from None


# DDPM betas / cosine offset and the EDM sigma range are the usual literature values.
_DEFAULTS: dict[Family, dict[str, float]] = {
    Family.SMLD: {"sigma_min": 0.01, "sigma_max": 50.0},
    Family.EDM: {"sigma_min": 0.002, "sigma_max": 80.0, "rho": 7.0, "eps": DEFAULT_EPS},
    Family.EDM_UT: {"sigma_min": 0.002, "sigma_max": 80.0, "rho": 7.0},
    Family.OTFM: {"eta": 1.0, "kappa": 0.0, "eps": DEFAULT_EPS},
    Family.DDPM_LINEAR: {"beta_min": 0.1, "beta_max": 20.0, "eps": DEFAULT_EPS},
    Family.DDPM_COS: {"s": 0.008, "nu": 1.0, "eps": DEFAULT_EPS},
    Family.ISSNR: {"eta": 1.0, "kappa": 2.0, "t_min": 0.01, "t_max": 0.99},
}

_DISPLAY = {
    Family.SMLD: "SMLD",
    Family.EDM: "EDM",
    Family.EDM_UT: "EDM-UT",
    Family.OTFM: "OTFM",
    Family.DDPM_LINEAR: "DDPM-linear",
    Family.DDPM_COS: "DDPM-cos",
    Family.ISSNR: "ISSNR",
}

# families whose TV is identically one regardless of the vp flag
_INTRINSIC_VP = {Family.DDPM_LINEAR, Family.DDPM_COS, Family.ISSNR}


@dataclass(frozen=True)
class ScheduleSpec:
    """One schedule family plus its parameters.

    Missing parameters are filled from the family defaults; unknown ones are rejected.
    """

    family: Family
    vp: bool = False
    params: dict[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        family = Family.parse(self.family)
        object.__setattr__(self, "family", family)
        object.__setattr__(self, "vp", bool(self.vp))
        defaults = _DEFAULTS[family]
        unknown = set(self.params) - set(defaults)
        if unknown:
            raise InvalidParameterError(
                f"{family.value}: unknown parameter(s) {sorted(unknown)}; "
                f"expected a subset of {sorted(defaults)}"
            )
        merged = {k: float(self.params.get(k, v)) for k, v in defaults.items()}
        object.__setattr__(self, "params", merged)
        self._validate()

    def _validate(self) -> None:
        p = self.params
        bad = [k for k, v in p.items() if not math.isfinite(v)]
        if bad:
            raise InvalidParameterError(f"{self.name}: non-finite parameter(s) {bad}")
        fam = self.family
        if fam in (Family.SMLD, Family.EDM, Family.EDM_UT):
            if not 0.0 < p["sigma_min"] < p["sigma_max"]:
                raise InvalidParameterError(f"{self.name}: need 0 < sigma_min < sigma_max")
        if fam in (Family.EDM, Family.EDM_UT) and p["rho"] <= 0:
            raise InvalidParameterError(f"{self.name}: rho must be positive")
        if fam is Family.DDPM_LINEAR and not 0.0 < p["beta_min"] < p["beta_max"]:
            raise InvalidParameterError(f"{self.name}: need 0 < beta_min < beta_max")
        if fam is Family.DDPM_COS and (p["s"] <= 0 or p["nu"] <= 0):
            raise InvalidParameterError(f"{self.name}: s and nu must be positive")
        if fam in (Family.OTFM, Family.ISSNR) and p["eta"] <= 0:
            raise InvalidParameterError(f"{self.name}: eta must be positive")
        if fam is Family.ISSNR and not 0.0 < p["t_min"] < p["t_max"] < 1.0:
            raise InvalidParameterError(f"{self.name}: need 0 < t_min < t_max < 1")
        if "eps" in p and not 0.0 < p["eps"] < 0.5:
            raise InvalidParameterError(f"{self.name}: eps must lie in (0, 0.5)")
        if fam is Family.EDM and p["eps"] >= p["sigma_min"]:
            raise InvalidParameterError(f"{self.name}: eps must be below sigma_min")

    @property
    def is_vp(self) -> bool:
        return self.vp or self.family in _INTRINSIC_VP

    @property
    def name(self) -> str:
        base = _DISPLAY[self.family]
        if self.family is Family.ISSNR or (self.vp and self.family not in _INTRINSIC_VP):
            return "VP-" + base
        return base

    @property
    def interval(self) -> tuple[float, float]:
        """Evaluation window ``(t_lo, t_hi)`` used for grids, priors and plots.

        Families whose SNR blows up (or vanishes) at an end of ``[0, 1]`` are
        clamped by ``eps``; EDM spans its noise range in sigma-time.
        """
        p, fam = self.params, self.family
        if fam is Family.EDM:
            return p["eps"], p["sigma_max"]
        if fam in (Family.OTFM, Family.DDPM_COS):
            return p["eps"], 1.0 - p["eps"]
        if fam is Family.DDPM_LINEAR:
            return p["eps"], 1.0
        return 0.0, 1.0

    @property
    def clamped_start(self) -> bool:
        """True when the SNR is unbounded at ``t = 0`` and ``interval`` starts at ``eps``."""
        return self.family in (Family.EDM, Family.OTFM, Family.DDPM_LINEAR, Family.DDPM_COS)

    def with_params(self, **updates: float) -> "ScheduleSpec":
        return ScheduleSpec(self.family, self.vp, {**self.params, **updates})

    def to_dict(self) -> dict[str, Any]:
        return {"family": self.family.value, "vp": self.vp, "params": dict(self.params)}

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "ScheduleSpec":
        if "family" not in data:
            raise InvalidParameterError("schedule record is missing 'family'")
        extra = set(data) - {"family", "vp", "params"}
        if extra:
            raise InvalidParameterError(f"schedule record has unknown field(s) {sorted(extra)}")
        params = data.get("params") or {}
        if not isinstance(params, Mapping):
            raise InvalidParameterError("schedule 'params' must be an object")
        return cls(Family.parse(data["family"]), bool(data.get("vp", False)), dict(params))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "ScheduleSpec":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class SchedulePoint:
    """TV, SNR and their log-derivatives at time ``t``.

    ``snr_sq`` is kept alongside its logarithm; when only one is supplied the
    other is derived.
    """

    tv_sq: Any
    snr_sq: Any = None
    dlog_tv: Any = 0.0
    dlog_snr: Any = -1.0
    t: Any = float("nan")
    log_snr_sq: Any = None

    def __post_init__(self) -> None:
        if self.log_snr_sq is None and self.snr_sq is None:
            raise InvalidParameterError("SchedulePoint needs snr_sq or log_snr_sq")
        if self.log_snr_sq is None:
            with np.errstate(divide="ignore"):
                object.__setattr__(self, "log_snr_sq", np.log(self.snr_sq))
        if self.snr_sq is None:
            with np.errstate(over="ignore"):
                object.__setattr__(self, "snr_sq", np.exp(self.log_snr_sq))


@dataclass(frozen=True)
class KernelCoeffs:
    """Signal scale ``a`` and noise scale ``b`` of the perturbation kernel."""

    a: Any
    b: Any


# ---------------------------------------------------------------------------
# per-family closed forms; each returns (log tau^2, dlog tau, log gamma^2, dlog gamma)


def _ve(log_sigma, dlog_sigma):
    # TV = 1 + sigma^2, SNR = 1/sigma
    log_sigma_sq = 2.0 * log_sigma
    return (
        np.logaddexp(0.0, log_sigma_sq),
        expit(log_sigma_sq) * dlog_sigma,
        -log_sigma_sq,
        -dlog_sigma * np.ones_like(log_sigma),
    )


def _smld(t, p):
    rate = math.log(p["sigma_max"] / p["sigma_min"])
    return _ve(math.log(p["sigma_min"]) + rate * t, rate)


def _edm(t, p):
    return _ve(np.log(t), 1.0 / t)


def _edm_ut(t, p):
    rho = p["rho"]
    hi = p["sigma_max"] ** (1.0 / rho)
    lo = p["sigma_min"] ** (1.0 / rho)
    u = hi + (1.0 - t) * (lo - hi)
    return _ve(rho * np.log(u), rho * (hi - lo) / u)


def _otfm(t, p):
    eta, kappa = p["eta"], p["kappa"]
    log_snr_sq = 2.0 * eta * (np.log1p(-t) - np.log(t)) + 2.0 * kappa
    log_tv_sq = np.logaddexp(2.0 * eta * np.log1p(-t), 2.0 * eta * np.log(t) - 2.0 * kappa)
    # a^2/tau^2 and b^2/tau^2 weight the two branches of d tau^2 / dt
    dlog_tv = eta * (expit(-log_snr_sq) / t - expit(log_snr_sq) / (1.0 - t))
    dlog_snr = -eta / (t * (1.0 - t))
    return log_tv_sq, dlog_tv, log_snr_sq, dlog_snr


def _ddpm_linear(t, p):
    b0, b1 = p["beta_min"], p["beta_max"]
    integral = 0.5 * t * t * (b1 - b0) + t * b0
    rate = t * (b1 - b0) + b0
    one_minus_alpha = -np.expm1(-integral)
    log_snr_sq = -integral - np.log(one_minus_alpha)
    return np.zeros_like(t), np.zeros_like(t), log_snr_sq, -0.5 * rate / one_minus_alpha


def _ddpm_cos(t, p):
    s, nu = p["s"], p["nu"]
    scale = 0.5 * math.pi / (1.0 + s)
    phi0 = s * scale
    delta = t**nu * scale
    phi = phi0 + delta
    # cos^2(phi0)/cos^2(phi) - 1 = sin(phi - phi0) sin(phi + phi0) / cos^2(phi)
    log_snr_sq = 2.0 * np.log(np.cos(phi)) - np.log(np.sin(delta)) - np.log(np.sin(phi + phi0))
    dphi = nu * t ** (nu - 1.0) * scale
    dlog_snr_sq = dphi * (-2.0 * np.tan(phi) - 1.0 / np.tan(delta) - 1.0 / np.tan(phi + phi0))
    return np.zeros_like(t), np.zeros_like(t), log_snr_sq, 0.5 * dlog_snr_sq


def _issnr(t, p):
    eta, kappa, lo, hi = p["eta"], p["kappa"], p["t_min"], p["t_max"]
    u = t * (hi - lo) + lo
    log_snr_sq = 2.0 * eta * (np.log1p(-u) - np.log(u)) + 2.0 * kappa
    dlog_snr = -eta * (hi - lo) / (u * (1.0 - u))
    return np.zeros_like(t), np.zeros_like(t), log_snr_sq, dlog_snr


_FORMS = {
    Family.SMLD: _smld,
    Family.EDM: _edm,
    Family.EDM_UT: _edm_ut,
    Family.OTFM: _otfm,
    Family.DDPM_LINEAR: _ddpm_linear,
    Family.DDPM_COS: _ddpm_cos,
    Family.ISSNR: _issnr,
}


def _check_domain(spec: ScheduleSpec, t: np.ndarray) -> None:
    fam = spec.family
    if not np.all(np.isfinite(t)):
        raise ScheduleDomainError(f"{spec.name}: non-finite time")
    if fam is Family.EDM:
        ok = t > 0.0
        where = "t > 0 (sigma-time)"
    elif fam in (Family.OTFM, Family.DDPM_COS):
        ok = (t > 0.0) & (t < 1.0)
        where = "0 < t < 1"
    elif fam is Family.DDPM_LINEAR:
        ok = (t > 0.0) & (t <= 1.0)
        where = "0 < t <= 1"
    else:
        ok = (t >= 0.0) & (t <= 1.0)
        where = "0 <= t <= 1"
    if not np.all(ok):
        bad = np.asarray(t)[~ok].ravel()[0].item()
        raise ScheduleDomainError(f"{spec.name}: SNR undefined at t={bad!r}; requires {where}")


def eval_point(spec: ScheduleSpec, t) -> SchedulePoint:
    """Evaluate TV, SNR and their log-derivatives of ``spec`` at ``t``.

    ``t`` may be a scalar or an array; all fields broadcast to its shape.

    Raises
    ------
    ScheduleDomainError
        If the family's SNR is undefined at any requested time (for example
        OTFM at exactly ``t = 0`` or ``t = 1``).
    """
    t = np.asarray(t, dtype=float)
    _check_domain(spec, t)
    with np.errstate(divide="ignore"):
        log_tv_sq, dlog_tv, log_snr_sq, dlog_snr = _FORMS[spec.family](t, spec.params)
    if spec.vp:
        log_tv_sq = np.zeros_like(t)
        dlog_tv = np.zeros_like(t)
    return SchedulePoint(
        tv_sq=np.exp(log_tv_sq)[()],
        dlog_tv=np.broadcast_to(dlog_tv, t.shape)[()],
        dlog_snr=np.broadcast_to(dlog_snr, t.shape)[()],
        t=t[()],
        log_snr_sq=np.broadcast_to(log_snr_sq, t.shape)[()],
    )


def eval_issnr(t, eta: float, kappa: float, t_min: float, t_max: float):
    """Squared inverse-sigmoid SNR :math:`((1/u - 1)^{2\\eta} e^{2\\kappa})` with
    ``u = t (t_max - t_min) + t_min``, evaluated through its logarithm."""
    spec = ScheduleSpec(Family.ISSNR, True, {"eta": eta, "kappa": kappa, "t_min": t_min, "t_max": t_max})
    return eval_point(spec, t).snr_sq


def snr_endpoints(spec: ScheduleSpec) -> tuple[float, float]:
    """Return ``(gamma_max, gamma_min)``, the SNR at the data and prior ends.

    For EDM the ends are ``sigma_min`` and ``sigma_max``. Families whose SNR is
    unbounded or zero at an end raise :class:`ScheduleDomainError`.
    """
    p, fam = spec.params, spec.family
    if fam is Family.ISSNR:
        g_max = math.exp(p["eta"] * math.log(1.0 / p["t_min"] - 1.0) + p["kappa"])
        g_min = math.exp(p["eta"] * math.log(1.0 / p["t_max"] - 1.0) + p["kappa"])
        return g_max, g_min
    if fam in (Family.SMLD, Family.EDM, Family.EDM_UT):
        return 1.0 / p["sigma_min"], 1.0 / p["sigma_max"]
    if fam is Family.DDPM_LINEAR:
        g_min = math.sqrt(float(eval_point(spec, 1.0).snr_sq))
        raise ScheduleDomainError(f"{spec.name}: gamma(0) is unbounded (gamma(1) = {g_min!r})")
    raise ScheduleDomainError(f"{spec.name}: gamma(0) is unbounded and gamma(1) = 0")


def to_kernel(point: SchedulePoint) -> KernelCoeffs:
    """Kernel scales ``a = sqrt(tau^2 gamma^2 / (1 + gamma^2))``, ``b = sqrt(tau^2 / (1 + gamma^2))``."""
    ell = point.log_snr_sq
    return KernelCoeffs(
        a=np.sqrt(point.tv_sq * expit(ell)),
        b=np.sqrt(point.tv_sq * expit(-ell)),
    )


def kernel(spec: ScheduleSpec, t) -> KernelCoeffs:
    return to_kernel(eval_point(spec, t))


def kernel_derivatives(spec: ScheduleSpec, t):
    """Return ``(a, a_dot, b, b_dot)`` from the analytic log-derivatives."""
    point = eval_point(spec, t)
    kern = to_kernel(point)
    ell = point.log_snr_sq
    dlog_a = point.dlog_tv + expit(-ell) * point.dlog_snr
    dlog_b = point.dlog_tv - expit(ell) * point.dlog_snr
    return kern.a, kern.a * dlog_a, kern.b, kern.b * dlog_b


def issnr_scaled_eta(nfe: int) -> float:
    """Steepness rule ``eta = 2 + max(0, log2(nfe + 1) - 3)`` (used with ``kappa = 0``)."""
    if nfe < 1:
        raise InvalidParameterError("nfe must be >= 1")
    return 2.0 + max(0.0, math.log2(nfe + 1) - 3.0)


CATALOG: dict[str, ScheduleSpec] = {
    "SMLD": ScheduleSpec(Family.SMLD),
    "EDM": ScheduleSpec(Family.EDM),
    "EDM-UT": ScheduleSpec(Family.EDM_UT),
    "OTFM": ScheduleSpec(Family.OTFM),
    "DDPM-linear": ScheduleSpec(Family.DDPM_LINEAR),
    "DDPM-cos": ScheduleSpec(Family.DDPM_COS),
    "VP-SMLD": ScheduleSpec(Family.SMLD, vp=True),
    "VP-EDM-UT": ScheduleSpec(Family.EDM_UT, vp=True),
    "VP-OTFM": ScheduleSpec(Family.OTFM, vp=True),
    "VP-ISSNR": ScheduleSpec(Family.ISSNR, vp=True),
}

_ALIASES = {
    "issnr-mol": "VP-ISSNR",
    "issnr": "VP-ISSNR",
}


def get_schedule(name: str) -> ScheduleSpec:
    """Look up a catalog entry (case-insensitive) or the ``issnr-mol`` preset."""
    key = name.strip()
    key = _ALIASES.get(key.lower(), key)
    for entry, spec in CATALOG.items():
        if entry.lower() == key.lower():
            return spec
    raise InvalidParameterError(f"unknown schedule {name!r}; choose from {list(CATALOG)} or 'issnr-mol'")
