"""Non-asymptotic confidence intervals for the missing mass.

The interval is ``[M_hat - L, M_hat + U]`` where the margins depend on the
sample only through ``K_{n,1}``, ``K_{n,2}`` and ``K_n``.  Two assemblies
are offered:

``theorem``
    The closed form as usually quoted: each empirical count is inflated by
    :func:`c_delta` at level ``delta`` and the deviation terms use
    ``log(6 / delta)``.

``appendix``
    The assembly obtained by chaining the individual concentration bounds
    with each of the six sub-events at level ``delta / 6``.  The variance
    proxy of the lower margin weights ``c(K_{n,1})`` by ``2 / n**2`` and
    ``c(K_{n,2})`` by ``4 / (n (n - 1))``, the reverse of the ``theorem``
    weights.

Both are exposed so the two can be compared; ``theorem`` is the default.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import SampleTooSmall
from .estimators import check_delta, good_turing
from .spectrum import FrequencySpectrum


class Variant(str, enum.Enum):
    THEOREM = "theorem"
    APPENDIX = "appendix"


def _variant(variant) -> Variant:
    try:
        return Variant(variant)
    except ValueError:
        raise ValueError(f"unknown variant {variant!r}; expected 'theorem' or 'appendix'") from None


def c_delta(x, delta: float):
    """High-probability upper bound on an expected count given the observed count ``x``.

    ``(sqrt(log(1/delta) / 2) + sqrt(7 log(1/delta) / 6 + x))**2``.  Accepts
    non-negative reals and numpy arrays.
    """
    delta = check_delta(delta)
    log_term = math.log(1.0 / delta)
    x = np.asarray(x, dtype=float) if not np.isscalar(x) else float(x)
    if np.any(np.asarray(x) < 0):
        raise ValueError("c_delta is defined for non-negative x")
    out = (math.sqrt(log_term / 2) + np.sqrt(7 * log_term / 6 + x)) ** 2
    return float(out) if np.ndim(out) == 0 else out


def _lower_margin(k1, k2, n: int, delta: float, variant: Variant):
    nn1 = n * (n - 1)
    log6 = math.log(6.0 / delta)
    if variant is Variant.THEOREM:
        c1, c2 = c_delta(k1, delta), c_delta(k2, delta)
        var_proxy = 4 * c1 / nn1 + 2 * c2 / n**2
    else:
        c1, c2 = c_delta(k1, delta / 6), c_delta(k2, delta / 6)
        var_proxy = 2 * c1 / n**2 + 4 * c2 / nn1
    return 2 * c2 / nn1 + log6 / n + np.sqrt(2 * log6 * var_proxy)


def _upper_margin(k_total, n: int, delta: float, variant: Variant):
    log6 = math.log(6.0 / delta)
    level = delta if variant is Variant.THEOREM else delta / 6
    ck = c_delta(k_total, level)
    return log6 / (n - 1) + np.sqrt(2 * log6 * 4 * ck / ((n - 1) ** 2 * (1 - 2 / n)))


def lower_margin(spec: FrequencySpectrum, delta: float = 0.05, variant="theorem") -> float:
    """Amount subtracted from the point estimate; needs ``n >= 2``."""
    delta = check_delta(delta)
    if spec.n < 2:
        raise SampleTooSmall(f"lower margin needs n >= 2, got n={spec.n}")
    return float(_lower_margin(spec.k1, spec.k2, spec.n, delta, _variant(variant)))


def upper_margin(spec: FrequencySpectrum, delta: float = 0.05, variant="theorem") -> float:
    """Amount added to the point estimate; needs ``n >= 3`` so that ``1 - 2/n > 0``."""
    delta = check_delta(delta)
    if spec.n < 3:
        raise SampleTooSmall(f"upper margin needs n >= 3, got n={spec.n}")
    return float(_upper_margin(spec.k_total, spec.n, delta, _variant(variant)))


@dataclass(frozen=True)
class ConfidenceInterval:
    point: float
    lower: float
    upper: float
    delta: float
    variant: Variant

    def contains(self, value: float) -> bool:
        return self.lower <= value <= self.upper

    def as_dict(self) -> dict:
        return {
            "point": self.point,
            "lower": self.lower,
            "upper": self.upper,
            "delta": self.delta,
            "variant": self.variant.value,
        }


def confidence_interval(spec: FrequencySpectrum, delta: float = 0.05, variant="theorem") -> ConfidenceInterval:
    """Level ``1 - delta`` interval for the missing mass, lower end clamped at 0."""
    variant = _variant(variant)
    delta = check_delta(delta)
    if spec.n < 3:
        raise SampleTooSmall(f"confidence interval needs n >= 3, got n={spec.n}")
    point = good_turing(spec)
    lo = max(0.0, point - lower_margin(spec, delta, variant))
    hi = point + upper_margin(spec, delta, variant)
    return ConfidenceInterval(point=point, lower=lo, upper=hi, delta=delta, variant=variant)


def interval_arrays(k1, k2, k_total, n: int, delta: float, variant="theorem"):
    """Vectorised :func:`confidence_interval` over replicate statistics.

    Returns ``(point, lower, upper)`` arrays; used by the Monte Carlo harness.
    """
    variant = _variant(variant)
    delta = check_delta(delta)
    if n < 3:
        raise SampleTooSmall(f"confidence interval needs n >= 3, got n={n}")
    k1 = np.asarray(k1, dtype=float)
    point = k1 / n
    lo = np.maximum(0.0, point - _lower_margin(k1, np.asarray(k2, dtype=float), n, delta, variant))
    hi = point + _upper_margin(np.asarray(k_total, dtype=float), n, delta, variant)
    return point, lo, hi
