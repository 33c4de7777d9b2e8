"""Petrov-Galerkin solvers for Symm's first-kind integral equation in the Fourier basis."""

from .curve import (
    REFERENCE_RADIUS,
    BoundaryCurve,
    Disc,
    Ellipse,
    TrigCurve,
    check_regularity,
    eval_curve,
    smooth_kernel,
    smooth_kernel_diagonal_derivatives,
)
from .errors import (
    AliasingError,
    ConfigError,
    CurveError,
    InsufficientDataError,
    SingularSystemError,
    TruncationError,
    TruncationWarning,
)
from .fourier import FourierVector, eval_fourier, project, samples_to_coeffs, sobolev_inner, sobolev_norm
from .harness import (
    ExperimentRecord,
    ExplicitSolution,
    Fixed,
    OptimalFromDelta,
    PowerTail,
    RhsSpec,
    SmoothManufactured,
    add_noise,
    fit_rate,
    make_rhs,
    run_convergence,
    run_divergence,
)
from .operator import OperatorAssembly, apply_K, assemble_operator, assemble_smooth_part, k0_apply
from .solvers import MethodKind, SolveReport, solve, solve_bg, solve_dls, solve_ls, stability_sigma

__version__ = "0.1.0"
