"""Sparse penalized GLMs by thresholded iteration."""

from .exceptions import DataError, GtispError, ParameterError, SolverFailure
from .families import (
    Family,
    bernoulli,
    gaussian,
    log_likelihood,
    mean_vector,
    poisson,
    scaling_bound,
)
from .metrics import (
    SelectionStats,
    scaled_deviance_error,
    selection_stats,
    spectral_mse_star,
    trimmed_mean,
)
from .rules import (
    ThresholdRule,
    curvature_constant,
    firm,
    hard,
    hard_ridge,
    penalty_value,
    ridge,
    scad,
    soft,
    threshold_scalar,
    threshold_vector,
)
from .screening import ScreenResult, screen_proportional
from .simulate import (
    Ar1Design,
    Dictionary,
    TwinSineSpec,
    build_dictionary,
    gen_ar1_glm,
    gen_twinsine,
    philox_gen,
)
from .solver import (
    Calibration,
    FitResult,
    GroupSpec,
    Problem,
    SolverOptions,
    calibrate,
    objective,
    tisp_fit,
)
from .tuning import (
    LambdaGrid,
    PathResult,
    ScvReport,
    df_ridge,
    lambda_grid,
    make_folds,
    match_df,
    scv,
    solution_path,
)

__version__ = "0.1.0"
