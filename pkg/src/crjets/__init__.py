"""Truncated power series, CR jet pullbacks and dimension counts.

The main entry points are :func:`jet_pullback` (the order-k graph germ of
the preimage of an algebraic model under a holomorphic map jet),
:func:`dimension_report` / :func:`crossover_order`, and the randomised
checks in :mod:`crjets.experiments`.
"""
from .dimension import (
    DimensionReport,
    count_monomials,
    crossover_order,
    dim_source_maps,
    dim_source_models,
    dim_target,
    dimension_report,
)
from .errors import ComputationError, CRJetError, ValidationError
from .jets import (
    AlgebraicModel,
    CrSignature,
    GraphGerm,
    MapJet,
    PullbackResult,
    flat_model,
    graph_iteration,
    heisenberg_model,
    identity_map,
    is_jet_preimage,
    jet_pullback,
    normalize_linear_part,
    pullback,
    pullback_defining_series,
    validate_map,
    validate_model,
)
from .parser import ParseError, parse_expression, parse_series
from .series import (
    EXACT,
    FLOAT,
    Coefficient,
    SeriesVector,
    TruncatedSeries,
    VariableSpace,
    add,
    conjugate,
    constant,
    monomial,
    mul,
    realify,
    substitute,
    variable,
    weighted_norm,
)

__version__ = "0.1.0"
