"""Incidence samples and their frequency-of-frequencies summary.

A sample under the Bernoulli product model is the finite set of features an
observation displays.  Every estimator in the package only needs the
*frequency spectrum*: the number of features seen exactly ``r`` times,
for ``r = 1..n``, plus the total number of incidences.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import CountOutOfRange, EmptySample, IndexOutOfRange

IncidenceSample = frozenset
"""One observation: a frozenset of non-negative integer feature ids."""


def _as_sample(features: Iterable[int]) -> frozenset:
    out = frozenset(int(f) for f in features)
    if any(f < 0 for f in out):
        raise ValueError("feature identifiers must be non-negative integers")
    return out


@dataclass(frozen=True)
class SampleMatrix:
    """An ordered collection of incidence samples.

    ``labels`` optionally maps feature ids back to the tokens they were
    interned from (``labels[i]`` is the token of feature ``i``).
    """

    samples: tuple
    labels: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "samples", tuple(_as_sample(s) for s in self.samples))
        if self.labels is not None:
            object.__setattr__(self, "labels", tuple(self.labels))

    @classmethod
    def from_sets(cls, samples: Iterable[Iterable[int]], labels=None) -> "SampleMatrix":
        return cls(tuple(samples), labels)

    @classmethod
    def from_dense(cls, array) -> "SampleMatrix":
        """Build from a 0/1 array of shape ``(n, n_features)``."""
        arr = np.asarray(array)
        if arr.ndim != 2:
            raise ValueError("dense incidence matrix must be 2-D")
        return cls(tuple(frozenset(np.flatnonzero(row).tolist()) for row in arr))

    @property
    def n(self) -> int:
        return len(self.samples)

    def __len__(self):
        return len(self.samples)

    def __iter__(self):
        return iter(self.samples)

    def feature_counts(self) -> Counter:
        """Total count ``X_{n,j}`` of every feature present at least once."""
        counts = Counter()
        for s in self.samples:
            counts.update(s)
        return counts

    def column_sums(self) -> np.ndarray:
        """Per-feature totals indexed by feature id, zero for unseen ids."""
        counts = self.feature_counts()
        size = max(counts) + 1 if counts else 0
        out = np.zeros(size, dtype=np.int64)
        for j, x in counts.items():
            out[j] = x
        return out

    def to_dense(self, n_features: int | None = None) -> np.ndarray:
        width = max((max(s) + 1 for s in self.samples if s), default=0)
        if n_features is not None:
            width = max(width, n_features)
        out = np.zeros((self.n, width), dtype=np.int8)
        for i, s in enumerate(self.samples):
            out[i, list(s)] = 1
        return out


@dataclass(frozen=True)
class FrequencySpectrum:
    """Sufficient statistics of a sample of size ``n``.

    ``counts_by_frequency[r]`` is the number of features observed exactly
    ``r`` times; missing keys mean zero.
    """

    n: int
    counts_by_frequency: Mapping[int, int] = field(default_factory=dict)

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("sample size must be non-negative")
        cleaned = {}
        for r, k in self.counts_by_frequency.items():
            r, k = int(r), int(k)
            if k < 0:
                raise ValueError("frequency counts must be non-negative")
            if k == 0:
                continue
            if not 1 <= r <= self.n:
                raise CountOutOfRange(f"frequency {r} outside 1..{self.n}")
            cleaned[r] = k
        object.__setattr__(self, "counts_by_frequency", MappingProxyType(dict(sorted(cleaned.items()))))

    def __eq__(self, other):
        if not isinstance(other, FrequencySpectrum):
            return NotImplemented
        return self.n == other.n and dict(self.counts_by_frequency) == dict(other.counts_by_frequency)

    def __hash__(self):
        return hash((self.n, tuple(self.counts_by_frequency.items())))

    def __getitem__(self, r: int) -> int:
        return self.counts_by_frequency.get(r, 0)

    @property
    def k_total(self) -> int:
        """Number of distinct features observed, ``K_n``."""
        return sum(self.counts_by_frequency.values())

    @property
    def occurrence_total(self) -> int:
        """Total number of incidences, ``sum_j X_{n,j}``."""
        return sum(r * k for r, k in self.counts_by_frequency.items())

    @property
    def k1(self) -> int:
        return self[1]

    @property
    def k2(self) -> int:
        return self[2]

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "k_total": self.k_total,
            "occurrence_total": self.occurrence_total,
            "counts_by_frequency": {str(r): k for r, k in self.counts_by_frequency.items()},
        }


def build_spectrum(matrix: SampleMatrix) -> FrequencySpectrum:
    if matrix.n == 0:
        raise EmptySample("cannot summarise an empty sample matrix")
    per_feature = matrix.feature_counts()
    return FrequencySpectrum(matrix.n, Counter(per_feature.values()))


def spectrum_from_counts(counts: Sequence[int], n: int) -> FrequencySpectrum:
    """Spectrum from per-feature totals, without materialising the samples.

    Zero counts (unseen features) are allowed and ignored.
    """
    if n < 1:
        raise EmptySample("sample size must be at least 1")
    arr = np.asarray(counts, dtype=np.int64).ravel()
    if arr.size == 0:
        return FrequencySpectrum(n, {})
    lo, hi = arr.min(), arr.max()
    if lo < 0 or hi > n:
        raise CountOutOfRange(f"per-feature counts must lie in 0..{n}, got range {lo}..{hi}")
    tally = np.bincount(arr, minlength=1)
    return FrequencySpectrum(n, {r: int(k) for r, k in enumerate(tally) if r and k})


def leave_one_out_gain(matrix: SampleMatrix, i: int) -> int:
    """Number of features displayed by sample ``i`` and by no other sample.

    This is how many distinct features are lost when sample ``i`` is dropped,
    ``K_n - K_{n-1}(i)``.
    """
    if matrix.n < 2:
        raise EmptySample("leave-one-out needs at least two samples")
    if not 0 <= i < matrix.n:
        raise IndexOutOfRange(f"sample index {i} outside 0..{matrix.n - 1}")
    counts = matrix.feature_counts()
    return sum(1 for f in matrix.samples[i] if counts[f] == 1)


class IncrementalSpectrum:
    """Frequency spectrum maintained one sample at a time.

    Adding a sample moves each of its features from frequency ``x`` to
    ``x + 1``, so an update costs O(|sample|).
    """

    def __init__(self):
        self.n = 0
        self._feature_counts: Counter = Counter()
        self._by_freq: Counter = Counter()

    def add(self, sample: Iterable[int]) -> None:
        for f in _as_sample(sample):
            x = self._feature_counts[f]
            if x:
                self._by_freq[x] -= 1
                if not self._by_freq[x]:
                    del self._by_freq[x]
            self._feature_counts[f] = x + 1
            self._by_freq[x + 1] += 1
        self.n += 1

    @property
    def k_total(self) -> int:
        return len(self._feature_counts)

    @property
    def k1(self) -> int:
        return self._by_freq.get(1, 0)

    def snapshot(self) -> FrequencySpectrum:
        return FrequencySpectrum(self.n, dict(self._by_freq))
