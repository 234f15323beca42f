"""Sequential sampling with a cost-per-sample stopping rule.

After each new sample the expected utility of the features the next sample
would reveal, ``h(K_n + M_hat_n) - h(K_n)``, is compared with the cost
``c`` of one more sample; sampling stops at the first ``n >= 1`` where the
gain is at most ``c``.  ``M_hat_0`` is undefined, so ``n = 0`` is never a
stopping time.
"""

from __future__ import annotations

import enum
import heapq
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Optional

import numpy as np

from .errors import InvalidParams, SourceExhausted
from .oracle import Population
from .spectrum import IncrementalSpectrum, SampleMatrix


class UtilityKind(str, enum.Enum):
    IDENTITY = "identity"
    LOG1P = "log1p"
    SQRT = "sqrt"
    POWER = "power"
    CUSTOM = "custom"


@dataclass(frozen=True)
class UtilitySpec:
    """A non-decreasing concave utility on ``[0, inf)``.

    ``gamma`` is the exponent for ``power``; ``func`` the callable for
    ``custom``, which is checked numerically on a grid at construction.
    """

    kind: UtilityKind = UtilityKind.IDENTITY
    gamma: Optional[float] = None
    func: Optional[Callable[[float], float]] = None

    def __post_init__(self):
        object.__setattr__(self, "kind", UtilityKind(self.kind))
        if self.kind is UtilityKind.POWER:
            if self.gamma is None or not 0 < self.gamma <= 1:
                raise InvalidParams(f"power utility needs gamma in (0, 1], got {self.gamma}")
        if self.kind is UtilityKind.CUSTOM:
            if self.func is None:
                raise InvalidParams("custom utility needs func")
            _check_concave_nondecreasing(self.func)

    @classmethod
    def parse(cls, text: str) -> "UtilitySpec":
        """``identity``, ``log1p``, ``sqrt`` or ``power:<gamma>``."""
        name, _, arg = text.partition(":")
        if name == "power":
            try:
                return cls(UtilityKind.POWER, gamma=float(arg))
            except ValueError:
                raise InvalidParams(f"bad power exponent in {text!r}") from None
        if arg:
            raise InvalidParams(f"utility {name!r} takes no parameter")
        try:
            kind = UtilityKind(name)
        except ValueError:
            raise InvalidParams(f"unknown utility {text!r}") from None
        if kind in (UtilityKind.POWER, UtilityKind.CUSTOM):
            raise InvalidParams(f"utility {name!r} needs a parameter")
        return cls(kind)

    def __str__(self):
        if self.kind is UtilityKind.POWER:
            return f"power:{self.gamma:g}"
        return self.kind.value

    def __call__(self, x):
        if self.kind is UtilityKind.IDENTITY:
            return x
        if self.kind is UtilityKind.LOG1P:
            return np.log1p(x)
        if self.kind is UtilityKind.SQRT:
            return np.sqrt(x)
        if self.kind is UtilityKind.POWER:
            return np.power(x, self.gamma)
        return self.func(x)

    def gain(self, k_total, missing):
        return self(k_total + missing) - self(k_total)


def _check_concave_nondecreasing(func, upper=1000.0, points=2001, tol=1e-9):
    grid = np.linspace(0.0, upper, points)
    values = np.array([func(float(x)) for x in grid])
    diffs = np.diff(values)
    scale = tol * (1 + np.abs(values).max())
    if np.any(diffs < -scale):
        raise InvalidParams("utility must be non-decreasing")
    if np.any(np.diff(diffs) > scale):
        raise InvalidParams("utility must be concave")


@dataclass(frozen=True)
class StepRecord:
    n: int
    k_total: int
    k1: int
    estimate: float
    gain: float


@dataclass(frozen=True)
class StoppingOutcome:
    """``n_star`` is the stopping time, or ``n_max`` when ``stopped`` is False."""

    n_star: int
    stopped: bool
    trajectory: tuple

    def as_dict(self) -> dict:
        return {
            "n_star": self.n_star,
            "stopped": self.stopped,
            "trajectory": [r.__dict__ for r in self.trajectory],
        }


def _check_args(c, n_max):
    if not c > 0:
        raise InvalidParams(f"cost c must be positive, got {c}")
    if n_max < 1:
        raise InvalidParams(f"n_max must be at least 1, got {n_max}")


def stopping_time(source: Iterable, h: UtilitySpec, c: float, n_max: int) -> StoppingOutcome:
    """Consume samples from ``source`` until the stopping rule fires or ``n_max`` is reached.

    Ties (gain exactly ``c``) stop.  Raises :class:`SourceExhausted` if the
    source ends first.
    """
    _check_args(c, n_max)
    spectrum = IncrementalSpectrum()
    records = []
    it = iter(source)
    for n in range(1, n_max + 1):
        try:
            sample = next(it)
        except StopIteration:
            raise SourceExhausted(f"source ended after {n - 1} samples without stopping") from None
        spectrum.add(sample)
        k_total, k1 = spectrum.k_total, spectrum.k1
        estimate = k1 / n
        gain = float(h.gain(k_total, estimate))
        records.append(StepRecord(n, k_total, k1, estimate, gain))
        if gain <= c:
            return StoppingOutcome(n, True, tuple(records))
    return StoppingOutcome(n_max, False, tuple(records))


def stopping_time_from_trajectory(k_total, k1, h: UtilitySpec, c: float, n_max: int) -> StoppingOutcome:
    """Same rule applied to precomputed ``K_n`` and ``K_{n,1}`` for ``n = 1..len``.

    A trajectory shorter than ``n_max`` that never triggers the rule is a
    :class:`SourceExhausted` error, as for :func:`stopping_time`.
    """
    _check_args(c, n_max)
    k_total = np.asarray(k_total, dtype=np.int64)[:n_max]
    k1 = np.asarray(k1, dtype=np.int64)[:n_max]
    steps = np.arange(1, k1.size + 1)
    estimate = k1 / steps
    gain = np.asarray(h.gain(k_total.astype(float), estimate), dtype=float)
    hits = np.flatnonzero(gain <= c)
    if hits.size:
        last = int(hits[0]) + 1
        stopped = True
    elif k1.size < n_max:
        raise SourceExhausted(f"trajectory ended after {k1.size} samples without stopping")
    else:
        last = n_max
        stopped = False
    records = tuple(
        StepRecord(int(steps[i]), int(k_total[i]), int(k1[i]), float(estimate[i]), float(gain[i]))
        for i in range(last)
    )
    return StoppingOutcome(last, stopped, records)


def replay_source(matrix: SampleMatrix) -> Iterator[frozenset]:
    return iter(matrix.samples)


def first_arrivals(pop: Population, rng: np.random.Generator):
    """Times of the first and second appearance of every feature.

    In a Bernoulli product sequence feature ``j`` shows up after a
    ``Geometric(p_j)`` wait and again after an independent one.
    """
    gaps = rng.geometric(pop.probs, size=(2, len(pop)))
    t1 = gaps[0]
    return t1, t1 + gaps[1]


def arrival_trajectory(t1, t2, n_max: int):
    """``K_n`` and ``K_{n,1}`` for ``n = 1..n_max`` from first and second arrival times."""
    seen = np.bincount(t1[t1 <= n_max], minlength=n_max + 1).cumsum()[1:]
    repeated = np.bincount(t2[t2 <= n_max], minlength=n_max + 1).cumsum()[1:]
    return seen, seen - repeated


def simulated_stopping_time(pop: Population, h: UtilitySpec, c: float, n_max: int, rng) -> StoppingOutcome:
    """Stopping rule on a simulated Bernoulli product sequence, without building samples."""
    t1, t2 = first_arrivals(pop, rng)
    k_total, k1 = arrival_trajectory(t1, t2, n_max)
    return stopping_time_from_trajectory(k_total, k1, h, c, n_max)


class BernoulliSource:
    """Endless stream of samples from a Bernoulli product population.

    Generated from arrival times: the first two arrivals of every feature are
    drawn up front exactly as in :func:`first_arrivals`, later ones lazily.
    With the same generator state it therefore yields the ``K_n`` and
    ``K_{n,1}`` paths used by :func:`simulated_stopping_time`.
    """

    def __init__(self, pop: Population, rng: np.random.Generator):
        self._p = pop.probs
        self._rng = rng
        t1, t2 = first_arrivals(pop, rng)
        self._t1_order = np.argsort(t1, kind="stable")
        self._t1_sorted = t1[self._t1_order]
        self._t2_order = np.argsort(t2, kind="stable")
        self._t2_sorted = t2[self._t2_order]
        self._heap: list = []
        self.n = 0

    def __iter__(self):
        return self

    def __next__(self) -> frozenset:
        self.n += 1
        t = self.n
        lo, hi = np.searchsorted(self._t1_sorted, [t, t + 1])
        present = self._t1_order[lo:hi].tolist()
        lo, hi = np.searchsorted(self._t2_sorted, [t, t + 1])
        second = self._t2_order[lo:hi]
        present.extend(second.tolist())
        later = []
        while self._heap and self._heap[0][0] == t:
            later.append(heapq.heappop(self._heap)[1])
        present.extend(later)
        movers = np.concatenate([second, np.asarray(later, dtype=np.int64)])
        if movers.size:
            nxt = t + self._rng.geometric(self._p[movers])
            for when, f in zip(nxt.tolist(), movers.tolist()):
                heapq.heappush(self._heap, (when, f))
        return frozenset(present)
