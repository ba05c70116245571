"""General spectral regularization in Hilbert scales on synthetic
diagonal problems: filters, a-priori parameter rules, concentration
diagnostics, distance functions, and convergence-rate experiments.
"""

from ._accel import backend_name, clenshaw_cosine, warmup, weighted_cosine_table
from .diagnostics import (QUANTITIES, BoundCheckReport, bound_appendix,
                          bound_constants, check_heinz_bound,
                          check_interpolation, check_lemma_envelope,
                          compute_lambda_q, compute_psi, compute_tx_deviation,
                          compute_upsilon, compute_xi, montecarlo_coverage,
                          montecarlo_coverage_batch, xi_from_operator)
from .distance import (DistanceCurve, DistanceResult, distance_bound,
                       distance_curve, distance_fn, distance_fn_q,
                       r_of_lambda)
from .effdim import (EffDimCurve, check_effdim_relation, check_tail_condition,
                     effdim, effdim_curve, fit_effdim_exponent)
from .filters import (FILTER_NAMES, ConstantsReport, FilterFamily, PropReport,
                      apply_filter, check_covering, check_prop_regularization,
                      check_qualification, check_regularization_constants,
                      default_lambda_grid, default_t_grid, filter_values,
                      for_spectrum, landweber_iterations, make_filter,
                      residual, residual_values, spectrum_prescale)
from .harness import (CASES, ERROR_NORMS, ExperimentConfig, PowerProblemSpec,
                      RateReport, config_hash, fit_rate, run_rate_experiment,
                      theoretical_exponent, truncation_dim)
from .indexfn import (IDENTITY, IndexFunction, check_index_function,
                      check_sublinear, power_fn)
from .lambda_rules import (RULE_NAMES, LambdaRule, lambda_balance_effdim,
                           lambda_balance_general, lambda_phi_inverse,
                           lambda_power_table)
from .mercer import (K2_NOTE, kernel_k1, kernel_k2, mercer_decompose,
                     midpoint_grid, problem_from_mercer)
from .model import (NoiseModel, SmoothnessSpec, SpectralProblem,
                    build_power_problem, eval_basis, forward_eval,
                    gaussian_noise, hilbert_scale_norm, problem_from_dict,
                    problem_to_dict)
from .sampling import (Dataset, Estimate, design_matrix, design_matrix_a,
                       empirical_cov, errors, estimate, sample_dataset)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
