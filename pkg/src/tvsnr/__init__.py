"""Diffusion noise schedules parameterized by total variance (TV) and signal-to-noise ratio (SNR).

The package covers the schedule catalog, exact kernel/SDE conversions,
reverse ODE/SDE samplers and a toy problem with an exact mixture score for
studying trajectory curvature and marginal support.
"""

from .analysis import (
    CurvatureReport,
    PeakCapture,
    SupportReport,
    curvature,
    density_shadow,
    peak_capture,
    relative_support,
    support_crossing,
)
from .config import ExperimentConfig
from .errors import (
    DegenerateDensityError,
    InvalidInputError,
    InvalidParameterError,
    QuadratureError,
    ScheduleDomainError,
    TvSnrError,
)
from .quadrature import gauss_kronrod
from .samplers import (
    TimeGrid,
    Trajectory,
    count_nfe,
    default_grid,
    edm_grid,
    sample_batch,
    sample_prior,
    solve_euler,
    solve_heun,
    solve_sde,
    uniform_grid,
)
from .schedules import (
    CATALOG,
    Family,
    KernelCoeffs,
    SchedulePoint,
    ScheduleSpec,
    eval_issnr,
    eval_point,
    get_schedule,
    issnr_scaled_eta,
    kernel,
    snr_endpoints,
    to_kernel,
)
from .score import MixtureData, marginal_logpdf, posterior_mean, score, three_delta
from .sde import SdeCoeffs, kernel_to_sde, reverse_rhs, sde_coeffs, sde_to_kernel_quadrature, simulate_forward, tvsnr_sde

__version__ = "0.1.0"
