import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from missing_mass.errors import EmptySample, InvalidDelta, InvalidParams, NoOccurrences
from missing_mass.estimators import (
    BetaProcessParams,
    eb_estimate,
    eb_plugin,
    eb_theta_hat,
    good_turing,
    jackknife,
    species_good_turing,
    w_bounds,
    w_hat,
)
from missing_mass.spectrum import FrequencySpectrum, SampleMatrix, build_spectrum, spectrum_from_counts

from conftest import matrices, random_matrix


def test_good_turing_examples(abc_matrix):
    assert good_turing(FrequencySpectrum(10, {1: 5})) == 0.5
    assert good_turing(FrequencySpectrum(7, {3: 2})) == 0.0
    assert good_turing(build_spectrum(abc_matrix)) == pytest.approx(2 / 3)


def test_good_turing_needs_a_sample():
    with pytest.raises(EmptySample):
        good_turing(FrequencySpectrum(0, {}))


def test_jackknife_examples(abc_matrix):
    assert jackknife(abc_matrix) == pytest.approx(2 / 3)
    assert jackknife(SampleMatrix.from_sets([{0, 1}, {0, 1}])) == 0.0


def test_jackknife_random_20x50():
    rng = np.random.default_rng(7)
    for _ in range(20):
        m = random_matrix(rng, 20, 50, density=rng.uniform(0.01, 0.5))
        assert jackknife(m) == good_turing(build_spectrum(m))


def test_species_examples():
    assert species_good_turing(FrequencySpectrum(3, {1: 2, 3: 1})) == pytest.approx(0.4)
    assert species_good_turing(FrequencySpectrum(4, {1: 6})) == 1.0
    with pytest.raises(NoOccurrences):
        species_good_turing(FrequencySpectrum(4, {}))


def test_w_hat_examples():
    assert w_hat(FrequencySpectrum(5, {5: 2})) == 2.0
    assert w_hat(FrequencySpectrum(5, {})) == 0.0
    assert w_hat(spectrum_from_counts([3, 1, 1, 0], 3)) == pytest.approx(5 / 3)


@given(matrices())
def test_factorisation_and_ranges(m):
    spec = build_spectrum(m)
    gt = good_turing(spec)
    assert 0 <= gt <= spec.k_total
    if spec.occurrence_total:
        sgt = species_good_turing(spec)
        assert 0 <= sgt <= 1
        assert math.isclose(w_hat(spec) * sgt, gt, rel_tol=1e-12, abs_tol=0)


def test_w_bounds_degenerate_case():
    n = 7
    b = w_bounds(FrequencySpectrum(n, {}), math.exp(-n))
    assert b.upper == pytest.approx(2.0, rel=1e-14)
    assert b.lower == 0.0


def test_w_bounds_delta_near_one():
    spec = FrequencySpectrum(10, {1: 3, 2: 4})
    b = w_bounds(spec, 1 - 1e-15)
    assert b.upper == pytest.approx(b.w_hat, abs=1e-6)
    assert b.lower == pytest.approx(b.w_hat, abs=1e-6)


@given(st.floats(0.001, 0.5), st.floats(0.001, 0.5))
def test_w_bounds_monotone_in_delta(d1, d2):
    lo_d, hi_d = sorted((d1, d2))
    spec = FrequencySpectrum(20, {1: 5, 3: 2})
    wide, narrow = w_bounds(spec, lo_d), w_bounds(spec, hi_d)
    assert wide.upper >= narrow.upper
    assert wide.lower <= narrow.lower
    assert wide.lower <= wide.w_hat <= wide.upper


@pytest.mark.parametrize("delta", [0.0, 1.0, -0.1, 1.5])
def test_invalid_delta(delta):
    with pytest.raises(InvalidDelta):
        w_bounds(FrequencySpectrum(3, {}), delta)


def test_eb_estimate_high_precision():
    expected = mpmath.gamma(2) / mpmath.gamma(mpmath.mpf("2.5"))
    got = eb_estimate(BetaProcessParams(1.0, 0.5, 0.5), 1)
    assert got == pytest.approx(float(expected), rel=1e-13)
    assert round(got, 6) == 0.752253


def test_eb_theta_hat_high_precision():
    spec = FrequencySpectrum(1, {1: 1})
    expected = mpmath.gamma(mpmath.mpf("2.5")) / mpmath.gamma(2)
    assert eb_theta_hat(spec, 0.5, 0.5) == pytest.approx(float(expected), rel=1e-13)
    assert round(eb_theta_hat(spec, 0.5, 0.5), 6) == 1.329340


@given(st.floats(0.05, 0.95), st.floats(-0.04, 5), st.integers(1, 10_000), st.floats(0.1, 100))
def test_eb_estimate_linear_in_theta(alpha, beta, n, theta):
    a = eb_estimate(BetaProcessParams(theta, alpha, beta), n)
    b = eb_estimate(BetaProcessParams(2 * theta, alpha, beta), n)
    assert b == pytest.approx(2 * a, rel=1e-14)


def test_eb_estimate_against_mpmath_large_n():
    for alpha, beta, n in [(0.3, 1.7, 10_000), (0.9, -0.5, 123), (0.1, 0.0, 2)]:
        mp = mpmath.gamma(alpha + beta + n) / mpmath.gamma(beta + n + 1)
        assert eb_estimate(BetaProcessParams(1.0, alpha, beta), n) == pytest.approx(float(mp), rel=1e-10)


def test_eb_theta_hat_zero_singletons():
    assert eb_theta_hat(FrequencySpectrum(4, {2: 3}), 0.5, 0.5) == 0.0
    assert eb_plugin(FrequencySpectrum(4, {2: 3}), 0.5, 0.5) == 0.0


@pytest.mark.parametrize("alpha, beta", [(0.0, 1.0), (1.0, 1.0), (0.5, -0.5), (0.5, -2.0)])
def test_beta_process_constraints(alpha, beta):
    with pytest.raises(InvalidParams):
        BetaProcessParams(1.0, alpha, beta)


def test_beta_process_theta_positive():
    with pytest.raises(InvalidParams):
        BetaProcessParams(0.0, 0.5, 0.5)


def test_theta_hat_recovers_mass_parameter():
    # if K_{n,1} equals its large-n mean theta * n**alpha, theta_hat tends to theta
    theta, alpha, beta = 3.0, 0.4, 0.7
    errors = []
    for n in (10**3, 10**4, 10**6):
        k1 = round(theta * n**alpha)
        errors.append(abs(eb_theta_hat(FrequencySpectrum(n, {1: k1}), alpha, beta) - theta))
    assert errors[-1] < errors[0]
    assert errors[-1] < 0.01


@given(matrices(), st.sampled_from([0.1, 0.5, 0.9]), st.sampled_from([-0.05, 0.1, 1.0, 2.0]))
def test_eb_plugin_is_good_turing(m, alpha, beta):
    spec = build_spectrum(m)
    assert math.isclose(eb_plugin(spec, alpha, beta), good_turing(spec), rel_tol=1e-9)


def test_w_bounds_arrays_match_scalar():
    from missing_mass.estimators import w_bounds_arrays

    occ = np.array([0, 3, 17, 250])
    lo, hi = w_bounds_arrays(occ, 10, 0.05)
    for i, o in enumerate(occ):
        b = w_bounds(FrequencySpectrum(10, {1: int(o)} if o else {}), 0.05)
        assert (lo[i], hi[i]) == (b.lower, b.upper)
