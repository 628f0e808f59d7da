"""Geodesic first-order autoregression for random objects.

A library and CLI for time series whose observations live in a Hadamard
space: the real line, distributions on an interval under the 2-Wasserstein
distance, or SPD matrices under the log-Cholesky metric. Provides the
simulation of the autoregressive recursion, closed-form Fréchet means,
estimation of the concentration parameter, and a permutation test for
serial independence.
"""

from .errors import (
    DegenerateInputError,
    GridMismatchError,
    NotPositiveDefiniteError,
    SeriesFormatError,
)
from .geometry import (
    InequalityResidual,
    Space,
    check_geodesic_comparison,
    check_npc,
    check_quadruple_comparison,
    frechet_mean,
    frechet_objective,
)
from .inference import (
    FitResult,
    NullMoments,
    ResidualReport,
    TestResult,
    VARIANT_CONCENTRATION,
    VARIANT_DISTANCE,
    dependence_statistic,
    fit,
    fit_concentration,
    fit_concentration_closed_form,
    fit_mean,
    permutation_null_moments,
    permutation_test,
    prediction_risk,
    r_squared,
    residual_report,
)
from .noise import (
    CongruenceNoise,
    MultiplicativeNoise,
    NoiseModel,
    TransportNoise,
    apply_congruence,
    apply_multiplicative,
    apply_transport,
    estimate_noise_bias,
    monotonicity_probe,
    sample_transport_frequency,
    transport_map,
)
from .process import (
    GarConfig,
    Trajectory,
    contraction_diagnostic,
    geometric_decay_rate,
    iterate_once,
    simulate,
)
from .rng import RngStream
from .spaces import (
    LogCholeskySpd,
    QuantileFunction,
    ScalarLine,
    SpdPoint,
    WassersteinGrid,
    density_to_quantile,
    grid_midpoints,
    isotonic_projection,
    space_for,
    spd_from_matrix,
    spd_identity,
    spd_to_matrix,
    truncated_normal_grid,
    truncated_normal_quantile,
)
from .experiments import (
    AnalysisResult,
    GridRow,
    ScenarioSpec,
    run_analysis,
    run_grid,
    scenario_components,
    write_grid_csv,
)

__version__ = "0.1.0"
