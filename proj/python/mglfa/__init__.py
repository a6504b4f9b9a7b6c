"""Cell-centered multigrid, local Fourier analysis and multilevel Monte Carlo
for Darcy flow with heterogeneous permeability."""

from ._core import (
    ConfigError,
    MaternParams,
    NumericalError,
    __version__,
    benchmark_field,
    lfa_window,
    matern_cov,
    measure_rate,
    parse_matern,
    reference_matern,
    run_experiment,
    sample_log_permeability,
    solve_darcy,
    two_grid_rho,
)

__all__ = [
    "ConfigError",
    "MaternParams",
    "NumericalError",
    "__version__",
    "benchmark_field",
    "lfa_window",
    "matern_cov",
    "measure_rate",
    "parse_matern",
    "reference_matern",
    "run_experiment",
    "sample_log_permeability",
    "solve_darcy",
    "two_grid_rho",
]
