"""Group-lasso day-ahead electricity price forecasting."""

from ._core import (
    Error,
    Panel,
    __version__,
    backtest,
    cross_validate,
    crps_gaussian,
    crps_sample,
    fit_group_lasso,
    fit_scaler,
    generate_synthetic,
    inverse_transform,
    kkt_residual,
    lambda_grid,
    lambda_max,
    load_series,
    objective,
    regression_fixture,
    run_cli,
    sample_complexity,
    sample_gaussian,
    support,
    theta_curve,
    transform,
)

__all__ = [
    "Error",
    "Panel",
    "__version__",
    "backtest",
    "cross_validate",
    "crps_gaussian",
    "crps_sample",
    "fit_group_lasso",
    "fit_scaler",
    "generate_synthetic",
    "inverse_transform",
    "kkt_residual",
    "lambda_grid",
    "lambda_max",
    "load_series",
    "objective",
    "regression_fixture",
    "run_cli",
    "sample_complexity",
    "sample_gaussian",
    "support",
    "theta_curve",
    "transform",
]
