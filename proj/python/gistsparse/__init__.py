"""Sparse linear models with nonconvex regularizers."""

from ._core import (
    DivergedError,
    NoMatchError,
    confusion_matrix,
    grad_check,
    kappa,
    ls_threshold_baseline,
    make_toy,
    model_error,
    nnls,
    prox,
    prox_check,
    prox_oracle,
    prox_vector,
    reg_value,
    simulate_mixture,
    solve_classification,
    solve_regression,
    synth_library,
    train_ova,
    unmix_solve,
)

__all__ = [
    "DivergedError",
    "NoMatchError",
    "confusion_matrix",
    "grad_check",
    "kappa",
    "ls_threshold_baseline",
    "make_toy",
    "model_error",
    "nnls",
    "prox",
    "prox_check",
    "prox_oracle",
    "prox_vector",
    "reg_value",
    "simulate_mixture",
    "solve_classification",
    "solve_regression",
    "synth_library",
    "train_ova",
    "unmix_solve",
]
