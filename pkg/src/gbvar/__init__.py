"""Simulation, sparse estimation, and bootstrap inference for
high-dimensional binary vector autoregressions.

The process: each coordinate of X_t in {0,1}^d copies a lagged
coordinate (possibly complemented, per the sign of the corresponding
coefficient) or draws a fresh Bernoulli innovation, with slot
probabilities given by the absolute coefficients. Estimation runs a
row-wise Lasso on the moment equation sigma1 = A sigma0, thresholds the
rows into supports, and refits by restricted least squares in closed
form. Inference calibrates max-statistic confidence regions with a
second-order wild bootstrap driven by kernel-correlated Gaussian
multipliers.

Hot loops (chain propagation, coordinate descent) run on a compiled
extension when it is available and on a pure-numpy fallback otherwise;
`gbvar.backend_name()` reports which one is active, and the env var
GBVAR_BACKEND=python|c forces a choice at import time.
"""

__version__ = "0.1.0"

from ._backend import backend_name
from ._util import ESTIMATOR_EVALS, parallel_map, substream, thread_count
from .bench import (REFERENCE_HYPERPARAMS, BenchConfig, BenchReport,
                    bench_report_csv, run_bench)
from .bootstrap import (GAUSSIAN, KERNELS, BootstrapConfig, BootstrapResult,
                        Kernel, SecondOrderResiduals, bootstrap_result_to_dict,
                        bootstrap_run, check_kernel, conditional_covariance,
                        correlated_normals, critical_index, default_bandwidth,
                        delta_loadings, gaussian_kernel, hypothesis_test,
                        longrun_cov_estimate, replicate_estimate,
                        resolve_kernel, second_order_residuals,
                        simultaneous_ci, toeplitz_cholesky)
from .errors import (ConstraintViolation, CovarianceNotPSD, DimensionTooLarge,
                     EmptyColumn, GbvarError, InnovationMeanOutOfRange,
                     InvalidLevel, NonNumericCell, NonpositiveBeta,
                     NotBinary, NotIrreducible, NumericalError, PanelTooShort,
                     ShapeMismatch, SingularCovariance, SingularSystem,
                     UnknownPreset, UserInputError)
from .estimate import (LassoConfig, PostSelectionFit, fit_from_dict,
                       fit_to_dict, kkt_residual, lasso_matrix, lasso_row,
                       metrics, partial_inverse, pinv_block, post_select_fit,
                       refit_rows, restricted_ls_row, select_support,
                       threshold_matrix)
from .model import (CompanionForm, CounterpartParams, GbvarParams,
                    StationarityReport, counterpart, negative_part,
                    params_from_dict, params_to_dict, stack_to_var1,
                    stationarity_diagnostics, stationary_mean,
                    structural_row_probs, validate_params)
from .moments import (LagCovariances, moments_from_dict, moments_to_dict,
                      sample_moments, yule_walker_ols)
from .oracle import (ExactChain, ExactMoments, conditional_means,
                     exact_stationary_moments, exact_transition_matrix,
                     state_table)
from .panel import (BinaryPanel, binarize_advance_decline,
                    binarize_growth_threshold, read_numeric_csv, read_panel,
                    read_panel_bin, read_panel_csv, write_panel,
                    write_panel_bin, write_panel_csv)
from .simulate import (PRESET_NAMES, SimConfig, dgp_preset,
                       draw_row_coefficient, simulate, step)
from .tuning import TuneGrid, TuneResult, matrix_l1_norm, spectral_norm, tune

__all__ = [name for name in dir() if not name.startswith("_")]
