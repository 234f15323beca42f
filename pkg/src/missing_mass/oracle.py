"""Ground truth for a known population of feature probabilities.

Everything here is a closed form in the ``p_j``.  Powers ``(1 - p)**k`` go
through ``exp(k * log1p(-p))`` with an exact zero at ``p == 1``, and every
sum over features is a correctly rounded :func:`math.fsum`, so results do
not depend on feature order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.special import gammaln

from .errors import InvalidR, LengthMismatch, SampleTooSmall


@dataclass(frozen=True, eq=False)
class Population:
    """A finite vector of feature probabilities, each in ``(0, 1]``."""

    probs: np.ndarray
    w: float = 0.0

    def __post_init__(self):
        p = np.array(self.probs, dtype=float).ravel()
        if p.size and not (np.all(p > 0) and np.all(p <= 1)):
            raise ValueError("feature probabilities must lie in (0, 1]")
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)
        object.__setattr__(self, "w", math.fsum(p))

    def __len__(self):
        return self.probs.size

    def __repr__(self):
        return f"Population(n_features={len(self)}, w={self.w:.6g})"


def _pow1m(p: np.ndarray, k: float) -> np.ndarray:
    """``(1 - p)**k`` for ``k >= 0`` with ``0**0 == 1``."""
    out = np.zeros_like(p)
    interior = p < 1
    out[interior] = np.exp(k * np.log1p(-p[interior]))
    if k == 0:
        out[~interior] = 1.0
    return out


def realized_missing_mass(pop: Population, counts: Sequence[int]) -> float:
    """Total probability of the features with zero count."""
    counts = np.asarray(counts)
    if counts.shape != pop.probs.shape:
        raise LengthMismatch(f"{counts.size} counts for {len(pop)} features")
    return math.fsum(pop.probs[counts == 0])


def expected_missing_mass(pop: Population, n: int) -> float:
    if n < 0:
        raise ValueError("n must be non-negative")
    p = pop.probs
    return math.fsum(p * _pow1m(p, n))


def log_binom_pmf(r: int, n: int, p: np.ndarray) -> np.ndarray:
    """Elementwise ``log P(Binomial(n, p) = r)``, ``-inf`` where impossible."""
    p = np.asarray(p, dtype=float)
    log_coef = gammaln(n + 1) - gammaln(r + 1) - gammaln(n - r + 1)
    out = np.full(p.shape, -np.inf)
    interior = (p > 0) & (p < 1)
    pi = p[interior]
    out[interior] = log_coef + r * np.log(pi) + (n - r) * np.log1p(-pi)
    if r == n:
        out[p == 1] = 0.0
    if r == 0:
        out[p == 0] = 0.0
    return out


def expected_k_r(pop: Population, n: int, r: int) -> float:
    """Expected number of features seen exactly ``r`` times in ``n`` samples."""
    if not 1 <= r <= n:
        raise InvalidR(f"r must lie in 1..n={n}, got {r}")
    return math.fsum(np.exp(log_binom_pmf(r, n, pop.probs)))


def expected_k_total(pop: Population, n: int) -> float:
    """Expected number of distinct features seen in ``n`` samples."""
    return math.fsum(1.0 - _pow1m(pop.probs, n))


def exact_bias(pop: Population, n: int) -> float:
    """``E(M_hat - M_n) = sum_j p_j**2 (1 - p_j)**(n - 1)``; always non-negative."""
    if n < 1:
        raise ValueError("n must be at least 1")
    p = pop.probs
    return math.fsum(p * p * _pow1m(p, n - 1))


def exact_variance(pop: Population, n: int) -> float:
    """``Var(M_hat - M_n)``.

    The error is a sum over features of independent terms
    ``A_j = 1{X_j = 1} / n - p_j 1{X_j = 0}``; the two indicators are
    disjoint so ``E A_j**2 = p_j (1-p_j)**(n-1) / n + p_j**2 (1-p_j)**n``.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    p = pop.probs
    q_nm1 = _pow1m(p, n - 1)
    q_n = _pow1m(p, n)
    mean_sq = p * q_nm1 / n + p * p * q_n
    mean = p * p * q_nm1
    return math.fsum(mean_sq - mean * mean)


def risk_upper_bound(w: float, n: int) -> float:
    """Worst-case risk of the Good-Turing estimator over populations of total mass ``<= w``."""
    return w * w / n**2 + (2 * n + 1) * w / (n * (n + 1))


def minimax_lower_bound(w: float, n: int) -> float:
    """Lower bound on the minimax risk; negative (vacuous) values are returned as is."""
    if n < 2:
        raise SampleTooSmall(f"minimax lower bound needs n >= 2, got n={n}")
    return 2 * w / (9 * (3 * n + 1)) - 14 / n**2


@dataclass(frozen=True)
class RiskReport:
    n: int
    bias: float
    variance: float
    risk: float
    bias_share_pct: float
    upper_bound: float
    minimax_lower: Optional[float]

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def exact_risk(pop: Population, n: int) -> RiskReport:
    bias = exact_bias(pop, n)
    variance = exact_variance(pop, n)
    risk = bias * bias + variance
    share = 100.0 * bias * bias / risk if risk > 0 else 0.0
    return RiskReport(
        n=n,
        bias=bias,
        variance=variance,
        risk=risk,
        bias_share_pct=share,
        upper_bound=risk_upper_bound(pop.w, n),
        minimax_lower=minimax_lower_bound(pop.w, n) if n >= 2 else None,
    )
