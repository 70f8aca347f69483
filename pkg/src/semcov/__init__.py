"""Exact symbolic covariance matrices for linear structural equation
models on mixed graphs, with identifiability tests and vanishing-ideal
search.

The covariance of a model with directed edge coefficients lambda and
noise covariance omega is a matrix of rational functions sharing one
denominator. This package computes numerators and denominator as exact
sparse polynomials by summing over paths, disjoint cycle families and
their combinations, checks generic parameter identifiability with
randomized modular rank tests, and prunes candidate supports for
polynomial relations among covariance entries.
"""

from .covariance import (
    CovarianceResult,
    InverseNumerator,
    covariance_matrix,
    det_linear_subgraphs,
    inverse_numerator,
    naive_inverse,
    neumann_oracle,
    trek_rule,
)
from .graph import (
    DisjointCycleFamily,
    GenerationError,
    GraphError,
    GraphFormatError,
    MixedGraph,
    OneConnection,
    disjoint_cycle_families,
    enumerate_cycles,
    enumerate_paths,
    gen_cycle_chain,
    gen_erdos_renyi,
    graph_to_dict,
    one_connections,
    parse_graph,
    serialize_graph,
)
from .ideal import (
    DegreeScanEntry,
    SupportTable,
    degree_scan,
    kernel_relations,
    prune_support,
    sigma_monomials,
    substitute,
    support_table,
)
from .ident import (
    IdentReport,
    JacobianMatrix,
    generic_rank,
    identifiability_report,
    is_generically_finite_to_one,
    numerator_jacobian,
    special_point_check,
)
from .poly import Polynomial, RationalFunction, exact_div, lam, om, poly_sum, sig

__version__ = "0.1.0"

__all__ = [
    "CovarianceResult",
    "DegreeScanEntry",
    "DisjointCycleFamily",
    "GenerationError",
    "GraphError",
    "GraphFormatError",
    "IdentReport",
    "InverseNumerator",
    "JacobianMatrix",
    "MixedGraph",
    "OneConnection",
    "Polynomial",
    "RationalFunction",
    "SupportTable",
    "covariance_matrix",
    "degree_scan",
    "det_linear_subgraphs",
    "disjoint_cycle_families",
    "enumerate_cycles",
    "enumerate_paths",
    "exact_div",
    "gen_cycle_chain",
    "gen_erdos_renyi",
    "generic_rank",
    "graph_to_dict",
    "identifiability_report",
    "inverse_numerator",
    "is_generically_finite_to_one",
    "kernel_relations",
    "lam",
    "naive_inverse",
    "neumann_oracle",
    "numerator_jacobian",
    "om",
    "one_connections",
    "parse_graph",
    "poly_sum",
    "prune_support",
    "serialize_graph",
    "sig",
    "sigma_monomials",
    "special_point_check",
    "substitute",
    "support_table",
    "trek_rule",
]
