"""Principal eigenpair of ``L = -Delta_F + tau_F/2`` and the constant
scalar curvature warping functions it produces.

If ``L f = lambda_1 f`` with ``f > 0`` then ``tau = tau_F - 2 Delta f / f
= 2 lambda_1`` is constant, so the principal eigenfunction is a warping
function of constant scalar curvature ``2 lambda_1``.

Radial operators are tridiagonal after the symmetric scaling ``W^{1/2} L
W^{-1/2}``; their eigenvalues come from Sturm-count bisection and the
eigenvector from one or two inverse-iteration steps.  Other operators
(tori) use shifted inverse iteration with an inner preconditioned
conjugate-gradient solve.
"""

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.linalg import solve_banded
from scipy.sparse.linalg import eigsh

from .curvature import (
    StandardStaticSpacetime,
    fiber_scalar_curvature,
    pointwise_scalar_curvature,
    spacetime_scalar_curvature,
)
from .discreteops import assemble_L
from .errors import ConvergenceError, PositivityError, PreconditionError
from .fiber import ScalarField, infimum

DEFAULT_TOL = 1e-8
DEFAULT_MAX_ITER = 500
DEFAULT_CONSTANCY_TOL = 1e-4
RANDOM_PROBES = 8


@dataclass(frozen=True, eq=False)
class EigenResult:
    """``eigenfunction`` is positive with unit mass norm; ``residual`` is
    ``||L f - lambda_1 f||_W / max(1, |lambda_1|)``.  ``gap`` estimates
    ``lambda_2 - lambda_1`` (within the radial sector on radial charts)."""

    lambda1: float
    eigenfunction: ScalarField
    residual: float
    iterations: int
    gap: float
    gap_marginal: bool
    method: str


def _relative_residual(L, v, lam):
    r = L.apply(v) - lam * v
    return np.sqrt(L.inner(r, r)) / max(1.0, abs(lam))


def rayleigh_quotient(L, u):
    """``<L u, u> / <u, u>`` in the volume-weighted inner product."""
    u = u.values if isinstance(u, ScalarField) else np.asarray(u, dtype=float)
    u = u.ravel()
    den = L.inner(u, u)
    if den == 0.0:
        raise ValueError("Rayleigh quotient of the zero vector")
    return L.inner(L.apply(u), u) / den


# --------------------------------------------------------------------------
# tridiagonal route


def _symmetric_tridiagonal(L):
    K = L.stiffness.tocsr()
    w = L.mass
    diag = K.diagonal() / w + L.potential
    off = K.diagonal(1) / np.sqrt(w[:-1] * w[1:])
    return diag, off


def sturm_count(diag, off, x):
    """Number of eigenvalues below ``x`` of the symmetric tridiagonal matrix."""
    e2 = off**2
    count = 0
    q = diag[0] - x
    tiny = np.finfo(float).tiny ** 0.5
    for i in range(diag.size):
        if i:
            q = diag[i] - x - e2[i - 1] / q
        if q == 0.0:
            q = -tiny
        if q < 0:
            count += 1
    return count


def _bisect(diag, off, k, lo, hi):
    """``k``-th smallest eigenvalue (0-based) by bisection on Sturm counts."""
    eps = np.finfo(float).eps
    while hi - lo > 4 * eps * max(abs(lo), abs(hi), 1.0):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if sturm_count(diag, off, mid) > k:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def _tridiagonal_eigenpair(L, tol, max_iter):
    diag, off = _symmetric_tridiagonal(L)
    radius = np.zeros_like(diag)
    radius[:-1] += np.abs(off)
    radius[1:] += np.abs(off)
    lo, hi = float(np.min(diag - radius)), float(np.max(diag + radius))
    lam1 = _bisect(diag, off, 0, lo, hi)
    lam2 = _bisect(diag, off, 1, lam1, hi) if diag.size > 1 else np.inf

    shift = lam1 - 1e-9 * max(1.0, abs(lam1))
    n = diag.size
    ab = np.zeros((3, n))
    ab[0, 1:] = off
    ab[1] = diag - shift
    ab[2, :-1] = off
    sqrt_w = np.sqrt(L.mass)
    y = sqrt_w / np.linalg.norm(sqrt_w)
    residual = np.inf
    for it in range(1, max_iter + 1):
        y = solve_banded((1, 1), ab, y)
        y /= np.linalg.norm(y)
        v = y / sqrt_w
        lam = rayleigh_quotient(L, v)
        residual = _relative_residual(L, v, lam)
        if residual <= tol:
            return lam, v, residual, it, lam2 - lam
    raise ConvergenceError(
        f"inverse iteration stalled at residual {residual:.3e}", last_residual=residual, iterations=max_iter
    )


# --------------------------------------------------------------------------
# general sparse route


def pcg(A, b, tol, maxiter=None, x0=None):
    """Conjugate gradients with Jacobi preconditioning for SPD ``A``.

    Stops when ``||b - A x|| <= tol ||b||``.  Raises
    :class:`PreconditionError` on a non-positive curvature direction (the
    matrix is not positive definite).
    """
    maxiter = maxiter or 10 * b.size
    inv_diag = 1.0 / A.diagonal()
    x = np.zeros_like(b) if x0 is None else x0.copy()
    r = b - A @ x
    z = inv_diag * r
    p = z.copy()
    rz = r @ z
    bnorm = np.linalg.norm(b)
    if bnorm == 0.0:
        return x, 0
    for k in range(1, maxiter + 1):
        Ap = A @ p
        curv = p @ Ap
        if curv <= 0:
            raise PreconditionError("shifted operator is not positive definite")
        alpha = rz / curv
        x += alpha * p
        r -= alpha * Ap
        if np.linalg.norm(r) <= tol * bnorm:
            return x, k
        z = inv_diag * r
        rz_new = r @ z
        p = z + (rz_new / rz) * p
        rz = rz_new
    return x, maxiter


def _shifted_system(L, sigma):
    """``W (L - sigma)`` as a symmetric sparse matrix."""
    return (L.stiffness + sp.diags(L.mass * (L.potential - sigma))).tocsr()


def _normalize(L, v):
    return v / np.sqrt(L.inner(v, v))


def _inverse_iteration(L, tol, max_iter):
    sigma0 = float(np.min(L.potential)) - 1.0
    sigma = sigma0
    A = _shifted_system(L, sigma)
    v = _normalize(L, np.ones(L.dimension))
    lam = rayleigh_quotient(L, v)
    residual = _relative_residual(L, v, lam)
    for it in range(1, max_iter + 1):
        inner_tol = max(1e-2 * min(residual, 1.0), 1e-13)
        try:
            y, _ = pcg(A, L.mass * v, inner_tol, x0=v / max(lam - sigma, 1e-12))
        except PreconditionError:
            # re-shift overshot lambda_1: fall back to the safe initial shift
            sigma = sigma0
            A = _shifted_system(L, sigma)
            y, _ = pcg(A, L.mass * v, inner_tol)
        v = _normalize(L, y)
        lam = rayleigh_quotient(L, v)
        residual = _relative_residual(L, v, lam)
        if residual <= tol:
            return lam, v, residual, it, sigma
        if it == 5:
            sigma = lam - 0.1 * (lam - sigma0)
            A = _shifted_system(L, sigma)
    raise ConvergenceError(
        f"inverse iteration stalled at residual {residual:.3e}", last_residual=residual, iterations=max_iter
    )


def _second_eigenvalue(L, lam1):
    """``lambda_2`` by shift-invert Lanczos (sparse LU) just below
    ``lambda_1``.  Only a diagnostic: near-degenerate ``lambda_2, lambda_3``
    make deflated inverse iteration with a definite shift crawl."""
    A = (L.stiffness + sp.diags(L.mass * L.potential)).tocsc()
    B = sp.diags(L.mass).tocsc()
    sigma = lam1 - 0.5 * max(1.0, abs(lam1))
    vals = eigsh(A, k=2, M=B, sigma=sigma, which="LM", v0=np.ones(L.dimension), tol=1e-10,
                 return_eigenvectors=False)
    return float(np.max(vals))


def principal_eigenpair(L, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER):
    """Smallest eigenvalue of ``L`` and its positive eigenfunction.

    The eigenvector is sign-normalised, scaled to unit mass norm and checked
    for strict positivity; ``lambda_1`` is cross-checked against the
    Rayleigh quotients of eight seeded random vectors.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    if L.tridiagonal:
        lam, v, residual, iterations, gap = _tridiagonal_eigenpair(L, tol, max_iter)
        method = "sturm-bisection+inverse-iteration"
    else:
        lam, v, residual, iterations, _ = _inverse_iteration(L, tol, max_iter)
        gap = _second_eigenvalue(L, lam) - lam
        method = "shifted-inverse-iteration+pcg"

    if L.inner(v, np.ones_like(v)) < 0:
        v = -v
    v = _normalize(L, v)
    if not np.all(v > 0):
        raise PositivityError(
            f"principal eigenvector changes sign (min {np.min(v):.3e}); the operator is not irreducible"
        )

    rng = np.random.default_rng(0)
    for k in range(RANDOM_PROBES):
        probe = rng.standard_normal(L.dimension)
        if k % 2:
            probe = np.abs(probe)
        if rayleigh_quotient(L, probe) < lam - tol:
            raise ConvergenceError("converged eigenvalue is not the smallest", last_residual=residual)

    return EigenResult(
        lambda1=float(lam),
        eigenfunction=ScalarField(L.geometry, v),
        residual=float(residual),
        iterations=int(iterations),
        gap=float(gap),
        gap_marginal=bool(gap < 10 * tol),
        method=method,
    )


# --------------------------------------------------------------------------
# constant scalar curvature construction


@dataclass(frozen=True, eq=False)
class ConstantScalarConstruction:
    """``spacetime`` has warping ``f`` = principal eigenfunction and constant
    scalar curvature ``tau = 2 lambda_1``.

    ``constancy`` is ``max - min`` of the scalar curvature computed with the
    same stencil as ``L`` and ``consistency`` is ``|mean - tau|``; both sit at
    solver accuracy.  ``pointwise_constancy`` uses an independent stencil
    (:func:`pointwise_scalar_curvature`) and measures discretisation error.
    """

    spacetime: StandardStaticSpacetime
    tau: float
    eigen: EigenResult
    constancy: float
    consistency: float
    pointwise_constancy: float
    constancy_tol: float

    def __iter__(self):
        # unpacks as (spacetime, tau)
        return iter((self.spacetime, self.tau))

    @property
    def discretization_ok(self):
        return self.pointwise_constancy <= self.constancy_tol


def construct_constant_scalar(
    geometry, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER, constancy_tol=DEFAULT_CONSTANCY_TOL
):
    """Standard static space-time over a compact ``geometry`` with constant
    scalar curvature, from the principal eigenpair of ``L``."""
    if not geometry.compact:
        raise PreconditionError("constant scalar curvature construction needs a compact fiber")
    tau_F = fiber_scalar_curvature(geometry)
    eig = principal_eigenpair(assemble_L(geometry, tau_F), tol=tol, max_iter=max_iter)
    st = StandardStaticSpacetime(geometry, eig.eigenfunction)
    tau = 2.0 * eig.lambda1
    field = spacetime_scalar_curvature(st).values
    constancy = float(np.max(field) - np.min(field))
    consistency = float(abs(np.mean(field) - tau))
    scale = max(1.0, abs(tau))
    if constancy > constancy_tol * scale or consistency > constancy_tol * scale:
        raise ConvergenceError(
            f"scalar curvature of the constructed space-time is not constant "
            f"(spread {constancy:.3e}, offset {consistency:.3e})",
            last_residual=eig.residual,
        )
    pw = pointwise_scalar_curvature(st).values
    if tau < infimum(tau_F) - constancy_tol:
        warnings.warn(
            f"2*lambda_1 = {tau:.6g} lies below inf tau_F = {infimum(tau_F):.6g}; "
            "suspect discretisation error",
            RuntimeWarning,
            stacklevel=2,
        )
    return ConstantScalarConstruction(
        spacetime=st,
        tau=tau,
        eigen=eig,
        constancy=constancy,
        consistency=consistency,
        pointwise_constancy=float(np.max(pw) - np.min(pw)),
        constancy_tol=constancy_tol,
    )


def refinement_study(make_geometry, grids, **kwargs):
    """Run :func:`construct_constant_scalar` on ``make_geometry(n)`` for each
    ``n`` and report how the discretisation residual decays.

    Returns a list of dicts with keys ``grid``, ``tau``, ``lambda1``,
    ``pointwise_constancy`` and ``ratio`` (previous residual over this one).
    """
    rows = []
    for n in grids:
        c = construct_constant_scalar(make_geometry(n), **kwargs)
        row = {
            "grid": n,
            "tau": c.tau,
            "lambda1": c.eigen.lambda1,
            "pointwise_constancy": c.pointwise_constancy,
            "ratio": None,
        }
        if rows:
            row["ratio"] = rows[-1]["pointwise_constancy"] / c.pointwise_constancy
        rows.append(row)
    return rows
