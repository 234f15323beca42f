"""Good-Turing estimation of the missing mass in feature allocation data.

In a Bernoulli product model every sample carries each feature ``j``
independently with probability ``p_j``.  The missing mass after ``n``
samples is the total probability of the features not yet seen, i.e. the
expected number of new features in the next sample.
"""

from .confidence import ConfidenceInterval, Variant, c_delta, confidence_interval, lower_margin, upper_margin
from .errors import (
    CountOutOfRange,
    EmptySample,
    IndexOutOfRange,
    InvalidDelta,
    InvalidParams,
    InvalidR,
    LengthMismatch,
    MissingMassError,
    NoOccurrences,
    ParseError,
    SampleTooSmall,
    SourceExhausted,
)
from .estimators import (
    BetaProcessParams,
    WBounds,
    eb_estimate,
    eb_plugin,
    eb_theta_hat,
    good_turing,
    jackknife,
    species_good_turing,
    w_bounds,
    w_hat,
)
from .formats import parse_text, read_incidence, write_incidence
from .oracle import (
    Population,
    RiskReport,
    exact_bias,
    exact_risk,
    exact_variance,
    expected_k_r,
    expected_k_total,
    expected_missing_mass,
    minimax_lower_bound,
    realized_missing_mass,
    risk_upper_bound,
)
from .simulate import DEFAULT_SEED, draw_counts, draw_matrix, simulate_replicates, zipf_population
from .spectrum import FrequencySpectrum, IncrementalSpectrum, SampleMatrix, build_spectrum, spectrum_from_counts
from .stopping import StoppingOutcome, UtilitySpec, stopping_time

__version__ = "0.1.0"
