import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from misc_values import SMLD_G0
from tvsnr import (
    CATALOG,
    InvalidInputError,
    SchedulePoint,
    SdeCoeffs,
    get_schedule,
    kernel,
    kernel_to_sde,
    reverse_rhs,
    sde_coeffs,
    sde_to_kernel_quadrature,
    simulate_forward,
    tvsnr_sde,
)
from tvsnr.schedules import eval_point, kernel_derivatives


def test_vp_otfm_midpoint():
    c = sde_coeffs(get_schedule("VP-OTFM"), 0.5)
    assert c.f == pytest.approx(-2.0, rel=1e-14)
    assert c.g_sq == pytest.approx(4.0, rel=1e-14)


def test_drift_vanishes_in_pure_signal_limit():
    c = tvsnr_sde(SchedulePoint(1.0, log_snr_sq=200.0, dlog_snr=-3.0))
    assert abs(c.f) < 1e-80


def test_constant_snr_rejected():
    with pytest.raises(InvalidInputError):
        tvsnr_sde(SchedulePoint(1.0, 2.0, dlog_snr=0.0))


def test_smld_diffusion_at_zero():
    b = 0.01
    c = kernel_to_sde(1.0, 0.0, b, b * math.log(5000.0))
    assert c.f == 0.0
    assert c.g == pytest.approx(SMLD_G0, rel=1e-14)
    assert math.sqrt(sde_coeffs(get_schedule("SMLD"), 0.0).g_sq) == pytest.approx(SMLD_G0, rel=1e-13)


def test_kernel_to_sde_rejects_constant_ratio():
    with pytest.raises(InvalidInputError):
        kernel_to_sde(0.5, 0.1, 0.5, 0.1)
    with pytest.raises(InvalidInputError):
        kernel_to_sde(0.0, 0.1, 0.5, 0.1)


@pytest.mark.parametrize("name", list(CATALOG))
def test_kernel_to_sde_agrees_with_tvsnr(name):
    spec = CATALOG[name]
    lo, hi = spec.interval
    t = np.linspace(lo, hi, 42)[1:-1]
    ref = sde_coeffs(spec, t)
    got = kernel_to_sde(*kernel_derivatives(spec, t))
    np.testing.assert_allclose(got.f, ref.f, rtol=1e-10, atol=1e-14)
    np.testing.assert_allclose(got.g_sq, ref.g_sq, rtol=1e-10)
    assert np.all(ref.g_sq >= 0)


def test_quadrature_constant_coefficients():
    k = sde_to_kernel_quadrature(lambda s: 0.0 * s, lambda s: 2.0 + 0.0 * s, 0.5)
    assert k.a == 1.0
    assert k.b**2 == pytest.approx(1.0, rel=1e-12)
    k0 = sde_to_kernel_quadrature(lambda s: 0.0 * s, lambda s: 1.0 + 0.0 * s, 0.0)
    assert (k0.a, k0.b) == (1.0, 0.0)


def test_quadrature_ornstein_uhlenbeck():
    # f = -1, g^2 = 2: a = e^-t, b^2 = 1 - e^-2t
    k = sde_to_kernel_quadrature(lambda s: -1.0 + 0.0 * s, lambda s: 2.0 + 0.0 * s, 1.3)
    assert k.a == pytest.approx(math.exp(-1.3), rel=1e-12)
    assert k.b**2 == pytest.approx(1 - math.exp(-2.6), rel=1e-10)


def _roundtrip(spec, t):
    lo = spec.interval[0]
    k0 = kernel(spec, lo)

    def f(s):
        return sde_coeffs(spec, s).f * np.ones_like(s)

    def g_sq(s):
        return sde_coeffs(spec, s).g_sq * np.ones_like(s)

    return sde_to_kernel_quadrature(f, g_sq, t, tol=1e-10, t0=lo, a0=float(k0.a), b0=float(k0.b))


@pytest.mark.parametrize("name", list(CATALOG))
def test_quadrature_roundtrip_catalog(name):
    spec = CATALOG[name]
    lo, hi = spec.interval
    for t in np.linspace(lo, hi, 22)[1:-1]:
        got = _roundtrip(spec, float(t))
        ref = kernel(spec, float(t))
        assert got.a == pytest.approx(float(ref.a), rel=1e-6, abs=1e-9)
        assert got.b == pytest.approx(float(ref.b), rel=1e-6, abs=1e-9)


def test_reverse_rhs_examples():
    d, s = reverse_rhs(1.0, -1.0, SdeCoeffs(0.0, 2.0), 0.0)
    assert (d, s) == (1.0, 0.0)
    d, s = reverse_rhs(1.0, -1.0, SdeCoeffs(0.0, 2.0), 1.0)
    assert d == 2.0 and s == pytest.approx(math.sqrt(2.0))
    with pytest.raises(InvalidInputError):
        reverse_rhs(1.0, -1.0, SdeCoeffs(0.0, 2.0), -0.5)


@settings(max_examples=100, deadline=None)
@given(x=st.floats(-5, 5), score=st.floats(-5, 5), f=st.floats(-3, 3), g_sq=st.floats(0, 10), lam=st.floats(0, 3))
def test_reverse_rhs_is_affine_in_lambda_squared(x, score, f, g_sq, lam):
    c = SdeCoeffs(f, g_sq)
    d0, _ = reverse_rhs(x, score, c, 0.0)
    d1, _ = reverse_rhs(x, score, c, 1.0)
    dl, scale = reverse_rhs(x, score, c, lam)
    assert dl == pytest.approx(d0 + lam**2 * (d1 - d0), abs=1e-9 * (1 + abs(d0) + abs(d1)) * (1 + lam**2))
    assert scale == pytest.approx(lam * math.sqrt(g_sq))


@pytest.mark.slow
def test_forward_moments_vp_issnr():
    spec = get_schedule("VP-ISSNR")
    rng = np.random.Generator(np.random.Philox(7))
    times = np.linspace(0.0, 1.0, 1001)
    out = simulate_forward(spec, 1.0, times, 40000, rng, record=[0.3, 0.6])
    for t, x in out.items():
        k = kernel(spec, t)
        n = x.shape[0]
        var = x.var(ddof=1)
        assert abs(x.mean() - k.a) < 3 * math.sqrt(var / n) + 2e-3
        assert abs(var - k.b**2) < 3 * var * math.sqrt(2 / (n - 1)) + 2e-3


def test_simulate_forward_rejects_off_grid_record():
    with pytest.raises(InvalidInputError):
        simulate_forward(get_schedule("VP-OTFM"), 1.0, np.linspace(0, 1, 11), 4, np.random.default_rng(0), record=[0.55])


def test_g_sq_nonnegative_everywhere():
    for spec in CATALOG.values():
        lo, hi = spec.interval
        assert np.all(sde_coeffs(spec, np.linspace(lo, hi, 500)).g_sq >= 0)


def test_point_derivatives_are_consistent_with_kernel():
    spec = get_schedule("DDPM-linear")
    p = eval_point(spec, 0.4)
    k = kernel(spec, 0.4)
    assert float(k.a) ** 2 + float(k.b) ** 2 == pytest.approx(float(p.tv_sq), rel=1e-14)
