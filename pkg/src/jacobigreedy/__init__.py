"""Greedy-algorithm experiments for Jacobi polynomial expansions in weighted Lp spaces."""

from .jacobi import (
    DarbouxTerms,
    JacobiParams,
    NormalizationMode,
    darboux_terms,
    eval_P,
    eval_basis,
    eval_derivative,
    largest_root,
    near_one_window,
    orthonormal_const,
)
from .quadrature import (
    ConvergenceError,
    MeshConfig,
    QuadratureRule,
    gauss_jacobi_rule,
    lp_norm,
    rademacher_average_norm,
    square_function_norm,
    total_mass,
)
from .greedy import (
    DemocracyReport,
    Expansion,
    GreedyOrdering,
    JacobiFamily,
    democracy_scan,
    expansion_lp_norm,
    greedy_approx,
    greedy_ordering,
    quasi_greedy_ratio,
    sign_ratio,
)
from .experiments import (
    ExperimentConfig,
    SlopeFit,
    average_block_experiment,
    block_sum_experiment,
    critical_exponents,
    fit_loglog,
    geometric_sum_identity_check,
    main_theorem_witness,
    near_one_experiment,
    norm_regimes_experiment,
    omega_exponent,
    staggered_block,
)

__version__ = "0.1.0"

__all__ = [
    "ConvergenceError",
    "DarbouxTerms",
    "DemocracyReport",
    "Expansion",
    "ExperimentConfig",
    "GreedyOrdering",
    "JacobiFamily",
    "JacobiParams",
    "MeshConfig",
    "NormalizationMode",
    "QuadratureRule",
    "SlopeFit",
    "average_block_experiment",
    "block_sum_experiment",
    "critical_exponents",
    "darboux_terms",
    "democracy_scan",
    "eval_P",
    "eval_basis",
    "eval_derivative",
    "expansion_lp_norm",
    "fit_loglog",
    "gauss_jacobi_rule",
    "geometric_sum_identity_check",
    "greedy_approx",
    "greedy_ordering",
    "largest_root",
    "lp_norm",
    "main_theorem_witness",
    "near_one_experiment",
    "near_one_window",
    "norm_regimes_experiment",
    "omega_exponent",
    "orthonormal_const",
    "quasi_greedy_ratio",
    "rademacher_average_norm",
    "sign_ratio",
    "square_function_norm",
    "staggered_block",
    "total_mass",
]
