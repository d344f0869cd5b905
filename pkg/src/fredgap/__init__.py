"""Gap probabilities of the Airy and Pearcey processes as Fredholm determinants."""

from .config import RunConfig, resolve_config
from .contours import (ComplexQuadrature, ContourPath, Segment, airy_contours, discretize_contour,
                       pearcey_contours)
from .errors import (ConfigurationError, ConvergenceError, DomainError, FredgapError,
                     SingularOperatorError, TruncationError)
from .experiments import (factorization_table, large_tau_decay, pde_residuals, pde_richardson,
                          pearcey_gap_grid, stencil_derivative)
from .fredholm import (NystromConfig, airy_gap_probability, airy_log_gap, contour_det_airy,
                       contour_det_pearcey, fredholm_det, log_det_param_derivative,
                       log_fredholm_det, nystrom_matrix, pearcey_gap_probability, pearcey_log_gap)
from .kernels import (KernelHandle, airy_kernel, airy_kernel_contour, general_p_kernel,
                      pearcey_kernel)
from .painleve import hastings_mcleod_relaxation, hastings_mcleod_solve, tw_log_gap
from .phases import PhaseSpec, eval_phase, saddle_points
from .quadrature import IntervalUnion, QuadratureRule, composite_interval_rule, gauss_legendre_rule
from .special import airy_ai, pearcey_phi_left, pearcey_phi_right, pearcey_psi

__version__ = "0.1.0"
