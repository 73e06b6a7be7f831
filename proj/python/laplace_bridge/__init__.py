"""Laplace bridge between Dirichlet and logit-Gaussian distributions."""

from ._core import (
    DecompositionError,
    DimensionError,
    DomainError,
    EmptyInputError,
    Error,
    accuracy,
    auroc,
    beta_quantile,
    brier,
    dirichlet_mean,
    dirichlet_mode,
    extended_mackay_mean,
    forward,
    inverse,
    lb_predictive_mean,
    mc_softmax_mean,
    mmc,
    prop1_threshold,
    reg_inc_beta,
    roundtrip_residual,
    sample_dirichlet,
    sodpp_mean,
    topk,
    variance_derivative,
)

__version__ = "0.1.0"
