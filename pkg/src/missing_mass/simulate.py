"""Population constructors, samplers and Monte Carlo experiments.

Seeding
-------
Replicate ``r`` of an experiment with master seed ``seed`` draws from
``numpy.random.default_rng(numpy.random.SeedSequence(seed, spawn_key=(r,)))``
(PCG64).  Replicates therefore do not depend on each other or on the order
in which they run, and a parallel run reproduces a sequential one bit for
bit.

Sampling
--------
Count-based experiments never build the ``n x N`` incidence matrix: each
feature's total is one ``Binomial(n, p_j)`` draw.  For features with
``n * p_j <= 1`` the draw is done by inversion of a single uniform against
the binomial CDF (most such features come out zero after one comparison);
the remaining features go through :meth:`numpy.random.Generator.binomial`.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np

from .confidence import Variant, interval_arrays
from .errors import SampleTooSmall
from .estimators import check_delta
from .oracle import (
    Population,
    exact_bias,
    exact_risk,
    expected_missing_mass,
)
from .spectrum import SampleMatrix


DEFAULT_SEED = 20190611


def zipf_population(s: float, n_features: int) -> Population:
    """Unnormalised Zipf masses ``p_j = j**(-s)`` for ``j = 1..n_features``."""
    if n_features < 1:
        raise ValueError("n_features must be at least 1")
    if s < 0:
        raise ValueError("s must be non-negative")
    j = np.arange(1, n_features + 1, dtype=float)
    return Population(j ** (-float(s)))


def replicate_rng(seed: int, replicate: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(replicate,)))


class CountSampler:
    """Reusable sampler of per-feature totals for a fixed population and ``n``."""

    light_threshold = 1.0

    def __init__(self, probs: np.ndarray, n: int):
        if n < 1:
            raise ValueError("n must be at least 1")
        p = np.asarray(probs, dtype=float)
        self.n = n
        self.size = p.size
        light = (p < 0.5) & (n * p <= self.light_threshold)
        q0 = np.exp(n * np.log1p(-p[light]))
        # inversion only pays off when most light features come out zero
        if light.any() and (1.0 - q0).sum() > 0.5 * light.sum():
            light[:] = False
            q0 = q0[:0]
        self._light = np.flatnonzero(light)
        self._heavy = np.flatnonzero(~light)
        p_light = p[self._light]
        self._q0 = q0
        self._odds = p_light / (1.0 - p_light)
        self._p_heavy = p[self._heavy]

    def sparse(self, rng: np.random.Generator):
        """Indices of the features with a non-zero total, and those totals."""
        n = self.n
        found_idx, found_k = [], []
        if self._heavy.size:
            xh = rng.binomial(n, self._p_heavy)
            keep = xh > 0
            found_idx.append(self._heavy[keep])
            found_k.append(xh[keep])
        if self._light.size:
            u = rng.random(self._light.size)
            nz = np.flatnonzero(u >= self._q0)
            idx = self._light[nz]
            u = u[nz]
            pmf = self._q0[nz]
            cdf = pmf.copy()
            odds = self._odds[nz]
            k = 0
            while idx.size and k < n:
                k += 1
                pmf = pmf * ((n - k + 1) / k) * odds
                cdf += pmf
                hit = u < cdf
                found_idx.append(idx[hit])
                found_k.append(np.full(np.count_nonzero(hit), k, dtype=np.int64))
                keep = ~hit
                idx, u, pmf, cdf, odds = idx[keep], u[keep], pmf[keep], cdf[keep], odds[keep]
            # only reachable through rounding in the accumulated CDF
            found_idx.append(idx)
            found_k.append(np.full(idx.size, n, dtype=np.int64))
        if not found_idx:
            return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
        return np.concatenate(found_idx), np.concatenate(found_k).astype(np.int64)

    def __call__(self, rng: np.random.Generator) -> np.ndarray:
        idx, k = self.sparse(rng)
        x = np.zeros(self.size, dtype=np.int64)
        x[idx] = k
        return x


def draw_counts(pop: Population, n: int, rng: np.random.Generator) -> np.ndarray:
    """One ``Binomial(n, p_j)`` total per feature."""
    return CountSampler(pop.probs, n)(rng)


def draw_matrix(pop: Population, n: int, rng: np.random.Generator) -> SampleMatrix:
    """``n`` samples with independent ``Bernoulli(p_j)`` cells, one row at a time."""
    if n < 1:
        raise ValueError("n must be at least 1")
    p = pop.probs
    rows = [np.flatnonzero(rng.random(p.size) < p).tolist() for _ in range(n)]
    return SampleMatrix.from_sets(rows)


@dataclass(frozen=True)
class PopulationSpec:
    """Recipe for a :class:`Population`: ``zipf`` (``s``, ``n_features``) or ``explicit`` (``probs``)."""

    family: str = "zipf"
    s: float = 1.0
    n_features: int = 100_000
    probs: tuple = ()

    def build(self) -> Population:
        if self.family == "zipf":
            return zipf_population(self.s, self.n_features)
        if self.family == "explicit":
            return Population(np.asarray(self.probs, dtype=float))
        raise ValueError(f"unknown population family {self.family!r}")

    def as_dict(self) -> dict:
        if self.family == "explicit":
            return {"family": "explicit", "n_features": len(self.probs)}
        return {"family": self.family, "s": self.s, "n_features": self.n_features}


@dataclass(frozen=True)
class ExperimentConfig:
    population: PopulationSpec
    n: int
    reps: int = 100
    delta: float = 0.05
    seed: int = DEFAULT_SEED
    variant: Variant = Variant.THEOREM

    def __post_init__(self):
        if self.reps < 1:
            raise ValueError("reps must be at least 1")
        if self.n < 1:
            raise ValueError("n must be at least 1")
        check_delta(self.delta)
        object.__setattr__(self, "variant", Variant(self.variant))


@dataclass
class ReplicateStats:
    """Per-replicate sufficient statistics, in replicate order."""

    n: int
    k1: np.ndarray
    k2: np.ndarray
    k_total: np.ndarray
    occurrences: np.ndarray
    missing_mass: np.ndarray

    @property
    def reps(self) -> int:
        return self.k1.size

    @property
    def estimate(self) -> np.ndarray:
        return self.k1 / self.n


def _run_chunk(probs, n, seed, start, stop):
    sampler = CountSampler(probs, n)
    total = probs.sum()
    out = np.empty((5, stop - start))
    for i, rep in enumerate(range(start, stop)):
        idx, k = sampler.sparse(replicate_rng(seed, rep))
        out[0, i] = np.count_nonzero(k == 1)
        out[1, i] = np.count_nonzero(k == 2)
        out[2, i] = k.size
        out[3, i] = k.sum()
        # mass of the unseen features as W minus the seen mass: touches only K_n terms
        out[4, i] = max(0.0, total - probs[idx].sum())
    return out


def simulate_replicates(
    pop: Population, n: int, reps: int, seed: int = DEFAULT_SEED, workers: int = 1
) -> ReplicateStats:
    """Draw ``reps`` independent samples of size ``n`` and keep their statistics.

    ``workers > 1`` spreads contiguous blocks of replicates over processes;
    the result is identical to ``workers == 1``.
    """
    if reps < 1:
        raise ValueError("reps must be at least 1")
    workers = max(1, min(workers, reps))
    if workers == 1:
        block = _run_chunk(pop.probs, n, seed, 0, reps)
    else:
        edges = np.linspace(0, reps, workers + 1).astype(int)
        with ProcessPoolExecutor(max_workers=workers) as ex:
            parts = ex.map(
                _run_chunk,
                [pop.probs] * workers,
                [n] * workers,
                [seed] * workers,
                edges[:-1].tolist(),
                edges[1:].tolist(),
            )
            block = np.concatenate(list(parts), axis=1)
    k1, k2, kt, occ, mm = block
    return ReplicateStats(
        n=n,
        k1=k1.astype(np.int64),
        k2=k2.astype(np.int64),
        k_total=kt.astype(np.int64),
        occurrences=occ.astype(np.int64),
        missing_mass=mm,
    )


def _sd(x: np.ndarray) -> float:
    return float(x.std(ddof=1)) if x.size > 1 else 0.0


@dataclass(frozen=True)
class ExperimentReport:
    """Monte Carlo summary of one (population, n) cell, with oracle columns."""

    population: dict
    n: int
    reps: int
    delta: float
    seed: int
    variant: str
    mean_missing_mass: float
    sd_missing_mass: float
    mean_estimate: float
    sd_estimate: float
    mean_lower: Optional[float]
    mean_upper: Optional[float]
    coverage: Optional[float]
    coverage_se: Optional[float]
    mc_bias: float
    mc_bias_se: float
    mc_mse: float
    mc_mse_se: float
    expected_missing_mass: float
    exact_bias: float
    exact_risk: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return asdict(self)


def summarize(stats: ReplicateStats, config: ExperimentConfig, pop: Population) -> ExperimentReport:
    est = stats.estimate
    real = stats.missing_mass
    err = est - real
    sq = err * err
    reps = stats.reps
    if stats.n >= 3:
        _, lo, hi = interval_arrays(stats.k1, stats.k2, stats.k_total, stats.n, config.delta, config.variant)
        inside = (lo <= real) & (real <= hi)
        cov = float(inside.mean())
        cov_se = math.sqrt(cov * (1 - cov) / reps)
        mean_lo, mean_hi = float(lo.mean()), float(hi.mean())
    else:
        cov = cov_se = mean_lo = mean_hi = None
    return ExperimentReport(
        population=config.population.as_dict(),
        n=stats.n,
        reps=reps,
        delta=config.delta,
        seed=config.seed,
        variant=config.variant.value,
        mean_missing_mass=float(real.mean()),
        sd_missing_mass=_sd(real),
        mean_estimate=float(est.mean()),
        sd_estimate=_sd(est),
        mean_lower=mean_lo,
        mean_upper=mean_hi,
        coverage=cov,
        coverage_se=cov_se,
        mc_bias=float(err.mean()),
        mc_bias_se=_sd(err) / math.sqrt(reps),
        mc_mse=float(sq.mean()),
        mc_mse_se=_sd(sq) / math.sqrt(reps),
        expected_missing_mass=expected_missing_mass(pop, stats.n),
        exact_bias=exact_bias(pop, stats.n),
        exact_risk=exact_risk(pop, stats.n).as_dict(),
    )


def risk_experiment(config: ExperimentConfig, workers: int = 1) -> ExperimentReport:
    pop = config.population.build()
    stats = simulate_replicates(pop, config.n, config.reps, config.seed, workers)
    return summarize(stats, config, pop)


@dataclass(frozen=True)
class CoverageResult:
    delta: float
    variant: str
    reps: int
    covered: int
    coverage: float
    se: float

    def z_below(self) -> float:
        """Standardised shortfall of the coverage under ``1 - delta`` (positive = below)."""
        target = 1.0 - self.delta
        null_se = math.sqrt(target * self.delta / self.reps)
        return (target - self.coverage) / null_se

    def as_dict(self) -> dict:
        return asdict(self)


def coverage_from_stats(stats: ReplicateStats, delta: float, variant="theorem") -> CoverageResult:
    if stats.n < 3:
        raise SampleTooSmall("coverage needs n >= 3")
    _, lo, hi = interval_arrays(stats.k1, stats.k2, stats.k_total, stats.n, delta, variant)
    real = stats.missing_mass
    covered = int(((lo <= real) & (real <= hi)).sum())
    cov = covered / stats.reps
    return CoverageResult(
        delta=delta,
        variant=Variant(variant).value,
        reps=stats.reps,
        covered=covered,
        coverage=cov,
        se=math.sqrt(cov * (1 - cov) / stats.reps),
    )


def coverage_experiment(config: ExperimentConfig, workers: int = 1) -> CoverageResult:
    """Fraction of replicates whose interval contains the realised missing mass."""
    if config.n < 3:
        raise SampleTooSmall("coverage needs n >= 3")
    pop = config.population.build()
    stats = simulate_replicates(pop, config.n, config.reps, config.seed, workers)
    return coverage_from_stats(stats, config.delta, config.variant)


def coverage_sweep(
    config: ExperimentConfig,
    deltas: Sequence[float],
    variants: Sequence[str] = ("theorem",),
    workers: int = 1,
) -> list:
    """Coverage at several levels and variants from a single set of replicates."""
    pop = config.population.build()
    stats = simulate_replicates(pop, config.n, config.reps, config.seed, workers)
    return [coverage_from_stats(stats, d, v) for v in variants for d in deltas]


def default_workers() -> int:
    return max(1, (os.cpu_count() or 1))
