"""Variational regularization under large white noise on diagonal spectral models."""

from ._core import (
    Basis,
    BasisMismatch,
    ConfigError,
    ConvergenceError,
    Error,
    HypothesisViolation,
    InvalidArgument,
    Operator,
    Penalty,
    balance_zeta,
    cli,
    derive_seed,
    e_value,
    effective_dimension,
    fit_rate,
    kappa,
    penalty_eval,
    prox,
    run_sweep,
    solve,
    white_noise,
)

__all__ = [
    "Basis",
    "BasisMismatch",
    "ConfigError",
    "ConvergenceError",
    "Error",
    "HypothesisViolation",
    "InvalidArgument",
    "Operator",
    "Penalty",
    "balance_zeta",
    "cli",
    "derive_seed",
    "e_value",
    "effective_dimension",
    "fit_rate",
    "kappa",
    "penalty_eval",
    "prox",
    "run_sweep",
    "solve",
    "white_noise",
]
