"""Planted cliques in random d-uniform hypergraphs, observed through the
pairwise co-occurrence (adjacency) matrix: sampling, spectral detection,
spectral recovery, finite-size inequality checks, and an experiment harness."""

from .combinat import (
    binom,
    c_e,
    rank_dset,
    sum_ce_all_closed_form,
    sum_ce_in_closed_form,
    sum_ce_out_closed_form,
    unrank_dset,
)
from .detect import (
    CalibrationResult,
    DetectionConfig,
    DetectionOutcome,
    RiskEstimate,
    calibrate_C,
    coupled_quadratic_forms,
    estimate_risk,
    k0_formula,
    k0_integer_form,
    quadratic_form_hyperedge,
    quadratic_form_stat,
    quadratic_noise_radius,
    run_test,
    signal_term,
    threshold,
)
from .diagnostics import (
    BernsteinParams,
    bernstein_excess,
    bernstein_t,
    check_cauchy_schwarz_row,
    check_single_edge_bound,
    check_sum_ae2,
    check_vector_radius,
    check_weyl,
    concentration_trend,
    run_selftest,
    vector_bernstein_radius,
)
from .errors import ConvergenceError, MemoryCapError
from .harness import (
    ExperimentSpec,
    TrialRecord,
    emit_csv,
    emit_svg_heatmap,
    parse_config,
    parse_csv,
    run_experiment,
)
from .model import (
    HypergraphSample,
    ModelParams,
    PopulationSummary,
    null_mean_offdiag,
    population_matrix,
    population_summary,
    project,
    project_bruteforce,
    read_hypergraph,
    read_matrix,
    sample_coupled_pair,
    sample_hpc,
    write_hypergraph,
    write_matrix,
)
from .recover import (
    ProxyDiagnostics,
    RecoveryOutcome,
    estimate_background_rate,
    evaluate_recovery,
    loo_row_diagnostic,
    proxy_diagnostics,
    recovery_scale,
    row_bernstein_radius,
    spectral_recover,
    top_k_by_magnitude,
)
from .seeding import mix64, ordered_map, rng_from
from .spectral import (
    CenteredOperator,
    EigenPair,
    LeaveOneOut,
    canonical_sign,
    dense_eig_oracle,
    edge_comembership_matrix,
    leading_algebraic_eigenpair,
    leave_one_out,
    spectral_norm,
    two_to_inf_norm,
)

__version__ = "0.1.0"
