"""Two-dimensional standard static space-times ``-f(x)^2 dt^2 + dx^2``.

Here ``tau = -2 f''/f`` and the space-time is Einstein with
``lambda = -f''/f``.  Constant ``tau`` therefore means ``f'' = -(tau/2) f``,
whose positive solutions are the linear, exponential and trigonometric
families built by :func:`solve_constant_tau`.
"""

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import jets
from .discreteops import second_difference
from .errors import DomainError

POSITIVITY_SAMPLES = 1024

RATE_CONVENTION = (
    "rates use sqrt(|tau|/2), obtained from tau = -2 f''/f; the alternative "
    "rates sqrt(-2 tau) and sqrt(2 tau) give a curvature of 4 tau instead"
)


class Branch(str, enum.Enum):
    LINEAR = "Linear"
    EXPONENTIAL = "Exponential"
    TRIGONOMETRIC = "Trigonometric"


@dataclass(frozen=True)
class WarpingFamily2D:
    tau: float
    c1: float
    c2: float
    branch: Branch
    domain: tuple

    @property
    def rate(self):
        return math.sqrt(abs(self.tau) / 2.0)

    def jet(self, x):
        k = self.rate
        if self.branch is Branch.LINEAR:
            return self.c1 * x + self.c2
        if self.branch is Branch.EXPONENTIAL:
            return self.c1 * jets.exp(k * x) + self.c2 * jets.exp(-k * x)
        return self.c1 * jets.cos(k * x) + self.c2 * jets.sin(k * x)

    def __call__(self, x):
        return jets.derivatives(self.jet, x)[0]

    def derivatives(self, x):
        return jets.derivatives(self.jet, x)

    def sample_points(self, count=POSITIVITY_SAMPLES):
        """``count`` uniform points on the domain (infinite ends clipped to a
        window of 40 e-foldings / a unit-slope span)."""
        c, d = self.domain
        span = 40.0 / max(self.rate, 1e-3) if self.rate else 1e3
        lo = c if math.isfinite(c) else (d if math.isfinite(d) else 0.0) - span
        hi = d if math.isfinite(d) else (c if math.isfinite(c) else 0.0) + span
        return np.linspace(lo, hi, count)


_TINY = np.finfo(float).tiny


def _branch_for(tau):
    if tau == 0:
        return Branch.LINEAR
    return Branch.EXPONENTIAL if tau < 0 else Branch.TRIGONOMETRIC


def _asymptotically_positive(fam):
    c, d = fam.domain
    checks = []
    if fam.branch is Branch.TRIGONOMETRIC:
        return math.isfinite(c) and math.isfinite(d)
    if fam.branch is Branch.LINEAR:
        if not math.isfinite(d):
            checks.append(fam.c1 > 0 or (fam.c1 == 0 and fam.c2 > 0))
        if not math.isfinite(c):
            checks.append(fam.c1 < 0 or (fam.c1 == 0 and fam.c2 > 0))
    else:
        if not math.isfinite(d):
            checks.append(fam.c1 > 0 or (fam.c1 == 0 and fam.c2 > 0))
        if not math.isfinite(c):
            checks.append(fam.c2 > 0 or (fam.c2 == 0 and fam.c1 > 0))
    return all(checks)


def solve_constant_tau(tau, c1, c2, domain):
    """Warping function of constant scalar curvature ``tau`` on ``domain``.

    ``tau = 0``: ``c1 x + c2``; ``tau < 0``: ``c1 e^{kx} + c2 e^{-kx}``;
    ``tau > 0``: ``c1 cos(kx) + c2 sin(kx)``; ``k = sqrt(|tau|/2)``.
    Raises :class:`DomainError` unless ``f > 0`` at 1024 samples, the finite
    endpoints and (for unbounded domains) asymptotically.
    """
    if c1 == 0 and c2 == 0:
        raise DomainError("c1 and c2 cannot both vanish")
    c, d = (float(v) for v in domain)
    if not c < d:
        raise DomainError(f"empty domain ({c}, {d})")
    fam = WarpingFamily2D(float(tau), float(c1), float(c2), _branch_for(tau), (c, d))
    x = fam.sample_points()
    if not (np.all(fam(x) > 0) and _asymptotically_positive(fam)):
        raise DomainError(f"f is not positive on ({c}, {d}) for tau={tau}, c1={c1}, c2={c2}")
    # f and k^2 f must stay normal floats or tau = -2 f''/f loses all digits
    floor = _TINY / min(1.0, fam.rate**2) if fam.rate else _TINY
    if np.min(fam(x)) < floor:
        raise DomainError(f"f underflows on ({c}, {d}) for c1={c1}, c2={c2}; rescale the coefficients")
    return fam


# --------------------------------------------------------------------------
# curvature of a 2D warping function


def sampled_second_derivative(f, x):
    """Second differences on a uniform grid (one-sided at the ends)."""
    f = np.asarray(f, dtype=float)
    x = np.asarray(x, dtype=float)
    if f.shape != x.shape or f.size < 5:
        raise ValueError("need at least five matching samples")
    h = x[1] - x[0]
    if not np.allclose(np.diff(x), h, rtol=1e-9, atol=0):
        raise ValueError("sampled path needs a uniform grid")
    return second_difference(f, h)


def _value_and_second(f, x):
    if callable(f) or isinstance(f, WarpingFamily2D):
        fn = f.jet if isinstance(f, WarpingFamily2D) else f
        v, _, dd = jets.derivatives(fn, np.asarray(x, dtype=float))
    else:
        v = np.asarray(f, dtype=float)
        dd = sampled_second_derivative(v, x)
    if not np.all(v > 0):
        raise DomainError("warping function must be positive")
    return v, dd


def scalar_curvature_2d(f, x):
    """``tau(x) = -2 f''/f``.

    ``f`` is either a :class:`WarpingFamily2D` / function of a
    :class:`~staticspace.jets.Jet` (exact derivatives) or an array of samples
    at the uniform points ``x`` (second differences).
    """
    v, dd = _value_and_second(f, x)
    return -2.0 * dd / v


@dataclass(frozen=True)
class Lambda2D:
    values: np.ndarray
    constant: bool
    ricci_flat: bool
    spread: float


def einstein_lambda_2d(f, x, tol=1e-8):
    """``lambda(x) = -f''/f``, the function with ``Ric = lambda g``.

    Flags whether ``lambda`` is constant (spread ``<= tol``) and whether it
    vanishes identically (Ricci-flat, i.e. ``f`` linear).
    """
    v, dd = _value_and_second(f, x)
    lam = -dd / v
    spread = float(np.max(lam) - np.min(lam))
    return Lambda2D(
        values=lam,
        constant=spread <= tol,
        ricci_flat=bool(np.max(np.abs(lam)) <= tol),
        spread=spread,
    )
