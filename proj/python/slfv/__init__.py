"""Python bindings for the slfv simulator and closed-form laws."""

from ._slfv import (
    ConfigError,
    DomainError,
    InvalidInput,
    ModelParams,
    NumericalError,
    coalescence_times,
    d_star,
    derive_scales,
    estimate_equal_coalescence,
    estimate_survival,
    gamma_finite,
    gamma_star,
    lens_area,
    pairing_distribution,
    run_cli,
    sigma2,
    theory,
    timescale,
    validate,
)

__all__ = [
    "ConfigError",
    "DomainError",
    "InvalidInput",
    "ModelParams",
    "NumericalError",
    "coalescence_times",
    "d_star",
    "derive_scales",
    "estimate_equal_coalescence",
    "estimate_survival",
    "gamma_finite",
    "gamma_star",
    "lens_area",
    "pairing_distribution",
    "run_cli",
    "sigma2",
    "theory",
    "timescale",
    "validate",
]
