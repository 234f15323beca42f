import numpy as np
import pytest
from scipy import stats

from missing_mass.confidence import Variant
from missing_mass.errors import SampleTooSmall
from missing_mass.oracle import Population, exact_bias, expected_missing_mass, realized_missing_mass
from missing_mass.simulate import (
    DEFAULT_SEED,
    CountSampler,
    ExperimentConfig,
    PopulationSpec,
    coverage_experiment,
    coverage_sweep,
    draw_counts,
    draw_matrix,
    replicate_rng,
    risk_experiment,
    simulate_replicates,
    zipf_population,
)
from missing_mass.spectrum import spectrum_from_counts


def test_zipf_examples():
    pop = zipf_population(0.0, 3)
    assert pop.probs.tolist() == [1.0, 1.0, 1.0] and pop.w == 3.0
    pop = zipf_population(1.0, 4)
    assert pop.probs.tolist() == pytest.approx([1, 0.5, 1 / 3, 0.25])
    assert pop.w == pytest.approx(2.0833, abs=1e-4)
    with pytest.raises(ValueError):
        zipf_population(1.0, 0)


def test_certain_features_always_counted():
    x = draw_counts(Population([1.0, 1.0]), 7, np.random.default_rng(0))
    assert x.tolist() == [7, 7]


def test_draw_matrix_certain_feature():
    m = draw_matrix(Population([1.0]), 3, np.random.default_rng(0))
    assert m.samples == (frozenset({0}),) * 3


def test_draw_matrix_marginals():
    pop = Population([0.5, 0.1, 0.9])
    m = draw_matrix(pop, 4000, np.random.default_rng(1))
    freq = m.column_sums() / m.n
    assert np.all(np.abs(freq - pop.probs) < 4 * np.sqrt(pop.probs * (1 - pop.probs) / m.n))


@pytest.mark.parametrize("p, n", [(0.002, 50), (0.01, 100), (0.0005, 1000), (0.3, 3)])
def test_sampler_law_is_binomial(p, n):
    # identical features, so one draw gives many iid Binomial(n, p) values
    sampler = CountSampler(np.full(20_000, p), n)
    rng = np.random.default_rng(11)
    x = np.concatenate([sampler(rng) for _ in range(10)])
    kmax = int(stats.binom.ppf(1 - 1e-4, n, p)) + 1
    observed = np.bincount(np.minimum(x, kmax), minlength=kmax + 1)
    probs = stats.binom.pmf(np.arange(kmax + 1), n, p)
    probs[-1] = stats.binom.sf(kmax - 1, n, p)
    expected = probs * x.size
    keep = expected > 5
    obs = np.append(observed[keep], observed[~keep].sum())
    exp = np.append(expected[keep], expected[~keep].sum())
    if exp[-1] == 0:
        obs, exp = obs[:-1], exp[:-1]
    assert stats.chisquare(obs, exp * obs.sum() / exp.sum()).pvalue > 1e-4


def test_sampler_mixed_population_mean_and_sparse_form():
    pop = zipf_population(1.0, 50_000)
    sampler = CountSampler(pop.probs, 80)
    rng = np.random.default_rng(5)
    totals = np.zeros(pop.probs.size)
    for _ in range(200):
        idx, k = sampler.sparse(rng)
        assert np.all(k > 0) and np.unique(idx).size == idx.size
        totals[idx] += k
    mean = totals / 200
    expected = 80 * pop.probs
    # aggregate over the light tail, where each feature is rarely seen
    tail = slice(1000, None)
    se = np.sqrt((80 * pop.probs[tail] * (1 - pop.probs[tail])).sum() / 200)
    assert abs(mean[tail].sum() - expected[tail].sum()) < 4 * se


def test_replicate_statistics_match_dense_path():
    pop = zipf_population(0.8, 3000)
    stats_ = simulate_replicates(pop, 40, 5, seed=9)
    sampler = CountSampler(pop.probs, 40)
    for r in range(5):
        x = sampler(replicate_rng(9, r))
        spec = spectrum_from_counts(x, 40)
        assert (stats_.k1[r], stats_.k2[r], stats_.k_total[r]) == (spec.k1, spec.k2, spec.k_total)
        assert stats_.occurrences[r] == x.sum()
        assert stats_.missing_mass[r] == pytest.approx(realized_missing_mass(pop, x), rel=1e-10, abs=1e-12)


def test_replicates_are_order_independent_and_parallel_safe():
    pop = zipf_population(1.2, 2000)
    a = simulate_replicates(pop, 30, 10, seed=4)
    b = simulate_replicates(pop, 30, 4, seed=4)
    c = simulate_replicates(pop, 30, 10, seed=4, workers=2)
    assert np.array_equal(a.k1[:4], b.k1)
    assert np.array_equal(a.missing_mass[:4], b.missing_mass)
    for name in ("k1", "k2", "k_total", "occurrences", "missing_mass"):
        assert np.array_equal(getattr(a, name), getattr(c, name))


def test_report_deterministic_single_rep():
    config = ExperimentConfig(PopulationSpec("zipf", s=1.0, n_features=5000), n=20, reps=1, seed=123)
    assert risk_experiment(config).as_dict() == risk_experiment(config).as_dict()


def test_report_oracle_columns():
    spec = PopulationSpec("zipf", s=1.2, n_features=4000)
    rep = risk_experiment(ExperimentConfig(spec, n=50, reps=300))
    pop = spec.build()
    assert rep.expected_missing_mass == expected_missing_mass(pop, 50)
    assert rep.exact_bias == exact_bias(pop, 50)
    assert abs(rep.mc_bias - rep.exact_bias) < 4 * rep.mc_bias_se + 1e-12
    assert rep.mean_lower <= rep.mean_estimate <= rep.mean_upper


def test_small_n_report_has_no_interval():
    rep = risk_experiment(ExperimentConfig(PopulationSpec("zipf", s=1.0, n_features=100), n=2, reps=5))
    assert rep.coverage is None and rep.mean_lower is None


def test_config_validation():
    spec = PopulationSpec()
    with pytest.raises(ValueError):
        ExperimentConfig(spec, n=10, reps=0)
    with pytest.raises(ValueError):
        ExperimentConfig(spec, n=0)
    with pytest.raises(ValueError):
        ExperimentConfig(spec, n=10, delta=1.0)
    assert ExperimentConfig(spec, n=10, variant="appendix").variant is Variant.APPENDIX
    with pytest.raises(ValueError):
        PopulationSpec("pareto").build()


def test_degenerate_population_full_coverage():
    spec = PopulationSpec("explicit", probs=(1.0,) * 5)
    res = coverage_experiment(ExperimentConfig(spec, n=10, reps=50))
    assert res.coverage == 1.0 and res.covered == 50


def test_coverage_at_loose_level():
    config = ExperimentConfig(PopulationSpec("zipf", s=1.0, n_features=100_000), n=250, reps=1000, delta=0.5)
    res = coverage_experiment(config)
    assert res.coverage >= 0.5 - 3 * res.se


def test_coverage_sweep_shares_draws():
    config = ExperimentConfig(PopulationSpec("zipf", s=1.4, n_features=5000), n=30, reps=200)
    rows = coverage_sweep(config, [0.05, 0.2], ["theorem", "appendix"])
    assert [(r.variant, r.delta) for r in rows] == [
        ("theorem", 0.05), ("theorem", 0.2), ("appendix", 0.05), ("appendix", 0.2)
    ]
    # a smaller delta gives a wider interval on the same draws
    assert rows[0].covered >= rows[1].covered
    assert rows[2].covered >= rows[0].covered


def test_coverage_requires_three_samples():
    with pytest.raises(SampleTooSmall):
        coverage_experiment(ExperimentConfig(PopulationSpec("zipf", n_features=10), n=2, reps=3))


def test_default_seed_is_documented_constant():
    assert DEFAULT_SEED == 20190611
