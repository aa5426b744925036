"""sievekit: combinatorial sieve bounds checked against exact enumeration."""

from .arith import (
    BudgetError,
    FactoredSquarefree,
    PrimeTable,
    factor_squarefree,
    li,
    mean_remainder_sum,
    mobius,
    pi_count,
    primes_up_to,
    remainder_E,
    truncated_mobius,
)
from .brun import PureSieveConfig, pure_sieve_bound, truncated_indicator, twin_upper_pipeline
from .largesieve import (
    CharacterTable,
    SeparatedPoints,
    additive_ls_check,
    character_table,
    farey_points,
    hilbert_ls_check,
    linnik_identity_check,
    multiplicative_ls_check,
)
from .legendre import SieveDecomposition, density_product, dimension_fit, legendre_decompose, mertens_compare
from .problem import (
    OmegaForm,
    ResidueSystem,
    SieveProblem,
    SiftingDensity,
    build_problem,
    count_in_class,
    exact_sift,
    problem_from_config,
)
from .reports import BoundReport
from .rosser import (
    RosserWeightTable,
    SieveFunctionTable,
    buchstab_check,
    chen_decomposition,
    chen_weight,
    linear_sieve_bound,
    parity_extremal,
    rosser_identity,
    solve_sieve_functions,
    truncation_inequality_check,
)
from .selberg import (
    G_sum,
    H_factor,
    LambdaWeights,
    linnik_bound,
    optimal_lambda,
    pseudo_character_matrix,
    quadratic_form,
    selberg_upper_bound,
    xi_transform,
)

__all__ = [
    "BoundReport",
    "BudgetError",
    "CharacterTable",
    "FactoredSquarefree",
    "G_sum",
    "H_factor",
    "LambdaWeights",
    "OmegaForm",
    "PrimeTable",
    "PureSieveConfig",
    "ResidueSystem",
    "RosserWeightTable",
    "SeparatedPoints",
    "SieveDecomposition",
    "SieveFunctionTable",
    "SieveProblem",
    "SiftingDensity",
    "additive_ls_check",
    "buchstab_check",
    "build_problem",
    "character_table",
    "chen_decomposition",
    "chen_weight",
    "count_in_class",
    "density_product",
    "dimension_fit",
    "exact_sift",
    "factor_squarefree",
    "farey_points",
    "hilbert_ls_check",
    "legendre_decompose",
    "li",
    "linear_sieve_bound",
    "linnik_bound",
    "linnik_identity_check",
    "mean_remainder_sum",
    "mertens_compare",
    "mobius",
    "multiplicative_ls_check",
    "optimal_lambda",
    "parity_extremal",
    "pi_count",
    "primes_up_to",
    "problem_from_config",
    "pseudo_character_matrix",
    "pure_sieve_bound",
    "quadratic_form",
    "remainder_E",
    "rosser_identity",
    "selberg_upper_bound",
    "solve_sieve_functions",
    "truncated_indicator",
    "truncated_mobius",
    "truncation_inequality_check",
    "twin_upper_pipeline",
    "xi_transform",
]
