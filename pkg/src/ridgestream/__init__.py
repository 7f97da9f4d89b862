"""Online ridge regression with exact regret identities.

Linear, Bayesian, and kernelized online ridge learners whose loss
guarantees are equalities, plus a verifier that evaluates both sides of
every guarantee through independent computational paths.
"""

from .backend import BACKEND
from .bayes import (FiniteBAState, GaussianExpert, PredictiveGaussian,
                    brr_cumulative_log_loss, brr_predict, brr_stepwise_log_loss,
                    expert_predictions, finite_ba_loss_identity, finite_ba_new,
                    finite_ba_step, gaussian_log_loss)
from .errors import (DimensionError, InputError, NumericError, ParamError,
                     ParseError, RidgestreamError)
from .kernel_online import (KernelModel, KernelRun, kbrr_predict,
                            kernel_model_new, kernel_run, kernel_run_gram,
                            krr_predict, krr_update, rkhs_min_from_gram,
                            rkhs_min_value)
from .kernels import KernelSpec, cross, gram, kernel_eval, tuned_regularization
from .linalg import (batch_ridge, gaussian_quadratic_integral,
                     log_det_from_products, sherman_morrison_update, solve_spd,
                     spd_logdet)
from .online import (RidgeRun, RidgeState, StepRecord, StreamRun, clip,
                     ridge_new, ridge_predict, ridge_run, ridge_update,
                     vaw_predict)
from .streams import (SyntheticSpec, generate_synthetic, load_csv,
                      load_kernel_csv, write_csv, write_kernel_csv,
                      write_step_log)
from .verify import (BoundReport, TrendReport, qazaz_trajectories, verify_cor1,
                     verify_cor2, verify_cor5, verify_det_bound,
                     verify_det_identity, verify_kernel_det_identity,
                     verify_thm1, verify_thm2, verify_thm3, verify_thm4,
                     verify_trend_cor3)

__version__ = "0.1.0"
