"""Curvature, constant-scalar-curvature construction and theorem checks for
standard static space-times ``_f(a,b) x F`` with metric ``-f^2 dt^2 + g_F``."""

from .errors import (
    ConfigError,
    ConvergenceError,
    DomainError,
    GeometryError,
    GeometryMismatchError,
    PositivityError,
    PreconditionError,
    UnsupportedFieldError,
)
from .fiber import (
    AnalyticGeometry,
    Closure,
    ConformalTorusGeometry,
    RevolutionGeometry,
    ScalarField,
    infimum,
    integrate,
    volume_weights,
)
from .curvature import (
    RicciReport,
    StandardStaticSpacetime,
    fiber_ricci_radial,
    fiber_scalar_curvature,
    spacetime_ricci,
    spacetime_scalar_curvature,
)
from .discreteops import (
    SparseSymmetricOperator,
    assemble_L,
    gradient_norm,
    hessian_radial,
    laplacian,
)
from .spectral import (
    EigenResult,
    construct_constant_scalar,
    principal_eigenpair,
    rayleigh_quotient,
)

__version__ = "0.1.0"
