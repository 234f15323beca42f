"""Point estimators of the missing mass and of the total feature mass.

The Good-Turing estimator ``K_{n,1} / n`` is reached here by four routes:
directly, as a leave-one-out (jackknife) average, as the product of the
species-sampling Good-Turing estimator with the total-mass estimator, and
as the empirical-Bayes plug-in under a three-parameter Beta process prior.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import EmptySample, InvalidDelta, InvalidParams, NoOccurrences
from .spectrum import FrequencySpectrum, SampleMatrix, leave_one_out_gain


def _check_n(spec: FrequencySpectrum, minimum: int = 1) -> None:
    if spec.n < minimum:
        raise EmptySample(f"need at least {minimum} sample(s), got n={spec.n}")


def check_delta(delta: float) -> float:
    delta = float(delta)
    if not 0.0 < delta < 1.0:
        raise InvalidDelta(f"delta must lie in (0, 1), got {delta}")
    return delta


def good_turing(spec: FrequencySpectrum) -> float:
    """Expected number of new features in one more sample, ``K_{n,1} / n``."""
    _check_n(spec)
    return spec.k1 / spec.n


def jackknife(matrix: SampleMatrix) -> float:
    """Average over samples of the features each one alone displays.

    Equals ``good_turing(build_spectrum(matrix))`` exactly; it is computed the
    long way round on purpose.
    """
    if matrix.n < 2:
        raise EmptySample("jackknife needs at least two samples")
    total = sum(leave_one_out_gain(matrix, i) for i in range(matrix.n))
    return total / matrix.n


def species_good_turing(spec: FrequencySpectrum) -> float:
    """Classical Good-Turing missing mass with the incidences as the sample size."""
    occ = spec.occurrence_total
    if occ == 0:
        raise NoOccurrences("no feature was observed")
    return spec.k1 / occ


def w_hat(spec: FrequencySpectrum) -> float:
    """Unbiased estimate of the total mass ``W``: mean number of features per sample."""
    _check_n(spec)
    return spec.occurrence_total / spec.n


@dataclass(frozen=True)
class WBounds:
    """One-sided level ``1 - delta`` bounds on the total mass ``W``.

    Each bound holds marginally; ``lower <= w_hat <= upper`` always happens
    to be true but nothing downstream relies on it.
    """

    w_hat: float
    lower: float
    upper: float
    delta: float


def _w_interval(w, n: int, delta: float):
    log_term = math.log(1.0 / delta)
    half = math.sqrt(log_term / (2 * n))
    upper = (np.sqrt(w + log_term / (2 * n)) + half) ** 2
    # negative root: W >= 0 is all that can be said
    lower = np.maximum(0.0, np.sqrt(w) - math.sqrt(log_term / n)) ** 2
    return lower, upper


def w_bounds(spec: FrequencySpectrum, delta: float) -> WBounds:
    delta = check_delta(delta)
    w = w_hat(spec)
    lower, upper = _w_interval(w, spec.n, delta)
    return WBounds(w_hat=w, lower=float(lower), upper=float(upper), delta=delta)


def w_bounds_arrays(occurrences, n: int, delta: float):
    """Vectorised :func:`w_bounds` from per-replicate incidence totals; returns ``(lower, upper)``."""
    delta = check_delta(delta)
    if n < 1:
        raise EmptySample(f"need at least 1 sample, got n={n}")
    return _w_interval(np.asarray(occurrences, dtype=float) / n, n, delta)


@dataclass(frozen=True)
class BetaProcessParams:
    """Mass ``theta``, discount ``alpha`` and concentration ``beta``."""

    theta: float
    alpha: float
    beta: float

    def __post_init__(self):
        _check_alpha_beta(self.alpha, self.beta)
        if not (self.theta > 0 and math.isfinite(self.theta)):
            raise InvalidParams(f"theta must be positive, got {self.theta}")


def _check_alpha_beta(alpha: float, beta: float) -> None:
    if not 0.0 < alpha < 1.0:
        raise InvalidParams(f"alpha must lie in (0, 1), got {alpha}")
    if not beta > -alpha:
        raise InvalidParams(f"beta must exceed -alpha = {-alpha}, got {beta}")


def _log_gamma_ratio(alpha: float, beta: float, n: int) -> float:
    # log Gamma(alpha + beta + n) - log Gamma(beta + n + 1)
    return float(gammaln(alpha + beta + n) - gammaln(beta + n + 1))


def eb_estimate(params: BetaProcessParams, n: int) -> float:
    """Posterior mean of the missing mass under the three-parameter Beta process.

    ``theta * Gamma(alpha + beta + n) / Gamma(beta + n + 1)``, evaluated in
    log space so that large ``n`` does not overflow.
    """
    if n < 1:
        raise InvalidParams(f"n must be at least 1, got {n}")
    return params.theta * math.exp(_log_gamma_ratio(params.alpha, params.beta, n))


def eb_theta_hat(spec: FrequencySpectrum, alpha: float, beta: float) -> float:
    """Consistent estimate of the mass parameter given ``alpha`` and ``beta``.

    Plugging it back into :func:`eb_estimate` returns ``K_{n,1} / n``.
    """
    _check_alpha_beta(alpha, beta)
    _check_n(spec)
    if spec.k1 == 0:
        return 0.0
    return spec.k1 * math.exp(-_log_gamma_ratio(alpha, beta, spec.n)) / spec.n


def eb_plugin(spec: FrequencySpectrum, alpha: float, beta: float) -> float:
    """Empirical-Bayes missing mass, ``eb_estimate`` at ``eb_theta_hat``.

    Returns 0 when no singleton was observed (the fitted mass is 0, which is
    outside the prior's parameter space).
    """
    theta = eb_theta_hat(spec, alpha, beta)
    if theta == 0.0:
        return 0.0
    return eb_estimate(BetaProcessParams(theta, alpha, beta), spec.n)
