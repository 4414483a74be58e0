"""spikekit: multi-spike concentration analysis at desk scale.

Layers, bottom up: ``quadrature`` (seeded deterministic integration),
``bubble`` (the standard bubble family, its linearization kernel, dimension
constants), ``greens`` (ball and tabulated Dirichlet kernels), ``reduced``
(the spike-interaction functional and its critical points), ``normalized``
(mass-to-parameters map and assembled approximations), ``pohozaev``
(surface-form identity checks), ``verify`` (the acceptance suite) and
``cli`` (scenario front end).
"""

from .bubble import (BubbleParams, DimensionContext, Field, bubble_eval,
                     bubble_field, bubble_gradient, dilation_field,
                     kernel_field, kernel_function, linearized_apply,
                     make_context, pohozaev_kernel_moment,
                     projected_bubble_eval, projected_bubble_field)
from .greens import (BallKernel, DomainError, TabulatedKernel, ball_kernel,
                     tabulated_kernel, write_kernel_table)
from .normalized import (PredictionRecord, assemble_approximation,
                         energy_of_approximation, mass_of_approximation,
                         predict_parameters)
from .pohozaev import (SurfaceFormReport, local_pohozaev_residual, p1_form,
                       p1_green_report, q1_form, q1_green_report)
from .quadrature import (QuadratureResult, QuadratureSpec, integrate_ball,
                         integrate_radial, integrate_sphere)
from .reduced import (CriticalPointRecord, NonConvergenceReport,
                      SpikeConfiguration, classify, enumerate_critical_points,
                      enumerate_Q, find_critical_point, interaction_matrix,
                      psi_eval, psi_gradient, psi_hessian)

__version__ = "0.1.0"
