import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from tvsnr import DegenerateDensityError, InvalidParameterError, KernelCoeffs, MixtureData, three_delta
from tvsnr.score import responsibilities

UNIT = KernelCoeffs(1.0, 1.0)
TWO = MixtureData([0.5, 0.5], [[-1.0], [1.0]])


def test_three_delta_is_standardized():
    mix = three_delta()
    c = mix.centers[:, 0]
    assert np.allclose(sorted(c), [-math.sqrt(1.5), 0.0, math.sqrt(1.5)])
    assert float(mix.weights @ c) == pytest.approx(0.0, abs=1e-16)
    assert float(mix.weights @ c**2) == pytest.approx(1.0, rel=1e-15)
    assert MixtureData.preset("three-delta").to_dict() == mix.to_dict()


def test_logpdf_examples():
    one = MixtureData([1.0], [[0.0]])
    assert one.logpdf(UNIT, np.array([0.0])) == pytest.approx(-0.5 * math.log(2 * math.pi), rel=1e-15)
    assert TWO.logpdf(UNIT, np.array([0.0])) == pytest.approx(-0.5 - 0.5 * math.log(2 * math.pi), rel=1e-15)
    want = math.log((1 + 2 * math.exp(-0.75)) / 3 / math.sqrt(2 * math.pi))
    assert three_delta().logpdf(UNIT, np.array([0.0])) == pytest.approx(want, rel=1e-14)


def test_score_examples():
    one = MixtureData([1.0], [[0.0]])
    x = np.array([[0.3], [-2.0]])
    np.testing.assert_allclose(one.score(UNIT, x), -x)
    assert TWO.score(UNIT, np.array([0.0]))[0] == 0.0
    kern = KernelCoeffs(1.0, 0.1)
    got = three_delta().score(kern, np.array([1.3]))[0]
    single = (math.sqrt(1.5) - 1.3) / 0.01
    assert got == pytest.approx(single, rel=1e-3)


def test_posterior_mean_examples():
    single = MixtureData([1.0], [[0.7]])
    assert single.posterior_mean(KernelCoeffs(0.3, 2.0), np.array([5.0]))[0] == 0.7
    assert TWO.posterior_mean(UNIT, np.array([0.0]))[0] == pytest.approx(0.0, abs=1e-16)
    assert three_delta().posterior_mean(KernelCoeffs(1.0, 0.1), np.array([1.3]))[0] == pytest.approx(
        math.sqrt(1.5), abs=1e-3
    )
    with pytest.raises(NotImplementedError):
        MixtureData([1.0], [[0.0]], 0.2).posterior_mean(UNIT, np.array([0.0]))


def test_degenerate_density():
    with pytest.raises(DegenerateDensityError):
        three_delta().score(KernelCoeffs(1.0, 0.0), np.array([0.1]))
    # a Gaussian mixture stays well defined at b = 0
    mix = MixtureData([1.0], [[0.0]], 0.25)
    assert np.isfinite(mix.logpdf(KernelCoeffs(1.0, 0.0), np.array([0.1])))


@pytest.mark.parametrize(
    "weights,centers",
    [([0.5, 0.6], [[0.0], [1.0]]), ([-0.5, 1.5], [[0.0], [1.0]]), ([1.0], [[np.nan]]), ([0.5, 0.5], [[0.0]])],
)
def test_invalid_mixtures(weights, centers):
    with pytest.raises(InvalidParameterError):
        MixtureData(weights, centers)


def test_wrong_state_dimension():
    with pytest.raises(InvalidParameterError):
        three_delta().score(UNIT, np.zeros((4, 2)))


def test_immutable_arrays():
    mix = three_delta()
    with pytest.raises(ValueError):
        mix.centers[0, 0] = 3.0


def test_json_roundtrip():
    mix = MixtureData([0.2, 0.8], [[1.0, 2.0], [-1.0, 0.5]], 0.1)
    again = MixtureData.from_json(mix.to_json())
    assert again.to_dict() == mix.to_dict()
    with pytest.raises(InvalidParameterError):
        MixtureData.from_dict({"weights": [1.0]})


@pytest.mark.parametrize("b", [0.05, 0.4, 1.0, 3.0])
def test_normalization(b):
    mix = three_delta()
    kern = KernelCoeffs(0.8, b)
    half = 10 * math.sqrt(0.64 + b * b)
    value, _ = integrate.quad(lambda x: math.exp(float(mix.logpdf(kern, np.array([x])))), -half, half,
                              points=[0.0, 0.8 * math.sqrt(1.5), -0.8 * math.sqrt(1.5)], limit=200)
    assert value == pytest.approx(1.0, abs=1e-6)


kerns = st.builds(KernelCoeffs, st.floats(0.01, 1.5), st.floats(0.02, 3.0))
states = st.lists(st.floats(-6, 6), min_size=1, max_size=5).map(lambda v: np.array(v)[:, None])


@settings(max_examples=200, deadline=None)
@given(kern=kerns, x=states)
def test_tweedie_identity(kern, x):
    mix = three_delta()
    s = mix.score(kern, x)
    tweedie = (kern.a * mix.posterior_mean(kern, x) - x) / kern.b**2
    np.testing.assert_allclose(s, tweedie, rtol=1e-10, atol=1e-10 * np.max(np.abs(x) / kern.b**2 + 1))


@settings(max_examples=200, deadline=None)
@given(kern=kerns, x=states)
def test_score_is_gradient_of_logpdf(kern, x):
    mix = three_delta()
    h = 1e-5 * (1 + np.abs(x))
    fd = (mix.logpdf(kern, x + h) - mix.logpdf(kern, x - h))[:, None] / (2 * h)
    s = mix.score(kern, x)
    np.testing.assert_allclose(s, fd, rtol=1e-5, atol=1e-6 * (1 + np.abs(s)).max())


@settings(max_examples=100, deadline=None)
@given(kern=kerns, x=states)
def test_responsibilities_sum_to_one(kern, x):
    r = responsibilities(three_delta(), kern, x)
    np.testing.assert_allclose(r.sum(axis=-1), 1.0, atol=1e-14)
    assert np.all(r >= 0)


def test_multidimensional_score():
    mix = MixtureData([0.3, 0.7], [[1.0, 0.0, -1.0], [0.0, 2.0, 0.5]], 0.2)
    kern = KernelCoeffs(0.6, 0.7)
    x = np.random.default_rng(3).normal(size=(6, 3))
    h = 1e-6
    fd = np.stack(
        [(mix.logpdf(kern, x + h * e) - mix.logpdf(kern, x - h * e)) / (2 * h) for e in np.eye(3)], axis=-1
    )
    np.testing.assert_allclose(mix.score(kern, x), fd, rtol=1e-6, atol=1e-8)
