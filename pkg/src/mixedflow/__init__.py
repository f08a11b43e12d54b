"""Mixed pre-Darcy / Darcy / post-Darcy conductivity laws and a degenerate parabolic solver."""

from ._accel import USE_NUMBA, backend_name
from .bounds import (
    CheckReport,
    Envelope,
    check_derivative_bounds,
    check_H_bounds,
    check_monotonicity,
    check_perturbed_monotonicity,
    check_sandwich,
    degree_condition,
    envelope,
    ode_comparison_bound,
)
from .conductivity import (
    CoefficientVector,
    ExponentProfile,
    ForchheimerLaw,
    Interpolated,
    Multiplicative,
    Piecewise,
    Rational,
    SandwichConstants,
    eval_G,
    eval_g,
    eval_H,
    eval_K,
    eval_K_prime,
    eval_K_star,
    invert_G,
    perturbation_constants,
    sandwich_constants,
)
from .config import RunConfig, dump_config, load_config, parse_config
from .errors import (
    ConfigError,
    ConvergenceError,
    DomainError,
    KinkError,
    MixedFlowError,
    ShapeError,
    StepRejected,
    UnsupportedOperation,
)
from .solver import (
    BoundaryProfile,
    DiagnosticsSeries,
    Grid,
    PressureField,
    SolverConfig,
    Term,
    boundary_forcing,
    discrete_norm,
    energy,
    face_gradients,
    solve_ibvp,
    step_explicit,
    step_implicit,
)

__version__ = "0.1.0"
