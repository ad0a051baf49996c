"""Mean and variance of the consensus value over i.i.d. directed random graphs."""

from .analysis import (
    AnalysisReport,
    MeanWeights,
    SpectralSummary,
    VarianceReport,
    analyze,
    dominant_left_eigvec_closed,
    exact_condition_number,
    exact_variance,
    expected_consensus_value,
    group_inverse,
    meyer_bound,
    reweight_initial,
    spectral_summary,
    stationary_distribution,
    variance_upper_bound,
)
from .graph import (
    CandidateGraph,
    LeaderProb,
    Scenario,
    build_graph,
    inverse_degree,
    leader_follower_chain,
    leader_follower_ring,
    scaled_inverse_degree,
)
from .moments import (
    ExpectedOperators,
    MomentTable,
    delta_and_norm,
    expected_operators,
    expected_weight_matrix,
    kron_expected_product,
    kron_expected_square,
    moment_m1,
    moment_m2,
)
from .montecarlo import EnsembleStats, TrajectoryResult, run_ensemble, run_trajectory
from .oracle import OracleReport, enumerate_expectations, verify_closed_forms
from .random_net import DirectedRealization, sample_realization, trial_stream, weight_matrix

__version__ = "0.1.0"
