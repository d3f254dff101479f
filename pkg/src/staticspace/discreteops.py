"""Finite-difference operators on fiber grids.

Radial charts use a flux (finite-volume) Laplacian

    Delta f_i = [k_{i+1/2}(f_{i+1} - f_i) - k_{i-1/2}(f_i - f_{i-1})] / (m_i h^2)

with face conductance ``k = psi^{s-1}/a`` (zero on pole faces) and cell
density ``m``; it is second order, exactly conservative, and symmetric in
the volume-weighted inner product.  Nodes next to a non-pole chart end use
one-sided stencils.  Tori use the periodic five-point
Laplacian scaled by ``exp(-2u)``.
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import PreconditionError, UnsupportedFieldError
from .fiber import ScalarField, check_field, sphere_area, volume_weights


# --------------------------------------------------------------------------
# radial stencils


# One-sided end stencils (third order) for chart ends that are not poles.
END_D1 = np.array([-11.0, 18.0, -9.0, 2.0]) / 6.0
END_D2 = np.array([35.0, -104.0, 114.0, -56.0, 11.0]) / 12.0


def first_difference(f, h, lower_pole=False, upper_pole=False):
    """Central first differences; even reflection at poles, one-sided
    stencils at other ends."""
    d = np.empty_like(f)
    d[1:-1] = (f[2:] - f[:-2]) / (2 * h)
    # at a pole the mirrored ghost value equals the end node
    d[0] = (f[1] - f[0]) / (2 * h) if lower_pole else END_D1 @ f[:4] / h
    d[-1] = (f[-1] - f[-2]) / (2 * h) if upper_pole else -(END_D1 @ f[:-5:-1]) / h
    return d


def second_difference(f, h, lower_pole=False, upper_pole=False):
    """Central second differences with the same end treatment as
    :func:`first_difference`."""
    h2 = h * h
    d = np.empty_like(f)
    d[1:-1] = (f[2:] - 2 * f[1:-1] + f[:-2]) / h2
    d[0] = (f[1] - f[0]) / h2 if lower_pole else END_D2 @ f[:5] / h2
    d[-1] = (f[-2] - f[-1]) / h2 if upper_pole else END_D2 @ f[:-6:-1] / h2
    return d


def _d1(g, f):
    return first_difference(f, g.h, g.lower_pole, g.upper_pole)


def _d2(g, f):
    return second_difference(f, g.h, g.lower_pole, g.upper_pole)


def _radial_stiffness(g):
    """Symmetric tridiagonal ``K`` with ``W^{-1} K = -Delta`` on pole/interior rows."""
    k = sphere_area(g.s - 1) * g.face_conductance / g.h
    inner = k[1:-1]
    diag = k[:-1] + k[1:]
    if not g.lower_pole:
        diag[0] -= k[0]
    if not g.upper_pole:
        diag[-1] -= k[-1]
    return sp.diags([-inner, diag, -inner], [-1, 0, 1], format="csr")


def _radial_laplacian(g, f):
    k = g.face_conductance
    flux = k[1:-1] * np.diff(f)
    div = np.zeros_like(f)
    div[:-1] += flux
    div[1:] -= flux
    lap = div / (g.cell_density * g.h**2)
    a = g.a_nodes
    for idx, is_pole in ((0, g.lower_pole), (-1, g.upper_pole)):
        if is_pole:
            continue
        d1 = _d1(g, f)[idx]
        d2 = _d2(g, f)[idx]
        lap[idx] = (d2 - g.da_nodes[idx] / a[idx] * d1) / a[idx] ** 2
        if g.s >= 2:
            lap[idx] += (g.s - 1) * g.dpsi_nodes[idx] / g.psi_nodes[idx] * d1 / a[idx] ** 2
    return lap


# --------------------------------------------------------------------------
# torus stencils


def _torus_d1(g, f):
    fx = (np.roll(f, -1, 0) - np.roll(f, 1, 0)) / (2 * g.hx)
    fy = (np.roll(f, -1, 1) - np.roll(f, 1, 1)) / (2 * g.hy)
    return fx, fy


def _torus_flat_laplacian(g, f):
    fxx = (np.roll(f, -1, 0) - 2 * f + np.roll(f, 1, 0)) / g.hx**2
    fyy = (np.roll(f, -1, 1) - 2 * f + np.roll(f, 1, 1)) / g.hy**2
    return fxx, fyy


def _torus_stiffness(g):
    nx, ny = g.nx, g.ny

    def ring(m, h):
        main = np.full(m, 2.0)
        off = np.full(m - 1, -1.0)
        T = sp.diags([off, main, off], [-1, 0, 1], format="lil")
        T[0, m - 1] = -1.0
        T[m - 1, 0] = -1.0
        return T.tocsr() / h**2

    K = sp.kron(ring(nx, g.hx), sp.identity(ny)) + sp.kron(sp.identity(nx), ring(ny, g.hy))
    return (K * (g.hx * g.hy)).tocsr()


# --------------------------------------------------------------------------
# public operators


def laplacian(geometry, fld):
    """Laplace-Beltrami ``Delta_F f = div grad f`` (no minus sign)."""
    f = check_field(geometry, fld)
    if geometry.is_radial:
        return ScalarField(geometry, _radial_laplacian(geometry, f))
    fxx, fyy = _torus_flat_laplacian(geometry, f)
    return ScalarField(geometry, (fxx + fyy) / geometry.conformal_factor)


def hessian_radial(geometry, fld):
    """Hessian of a radial function as ``h_rr dr^2 + h_sph dsigma^2``.

    ``h_rr = f'' - (a'/a) f'``.  ``h_sph`` (exactly ``psi psi' f' / a^2``
    in the continuum) is taken as the trace complement of the Laplacian
    stencil, so ``h_rr/a^2 + (s-1) h_sph/psi^2`` reproduces
    :func:`laplacian` to rounding.  For ``s = 1`` the 1x1 Hessian is
    ``a^2 Delta f``.
    """
    if not geometry.is_radial:
        raise UnsupportedFieldError("hessian_radial needs a radial chart")
    f = check_field(geometry, fld)
    lap = _radial_laplacian(geometry, f)
    a2 = geometry.a_nodes**2
    if geometry.s == 1:
        return ScalarField(geometry, a2 * lap), None
    h_rr = _d2(geometry, f) - geometry.da_nodes / geometry.a_nodes * _d1(geometry, f)
    h_sph = geometry.psi_nodes**2 / (geometry.s - 1) * (lap - h_rr / a2)
    return ScalarField(geometry, h_rr), ScalarField(geometry, h_sph)


def hessian_components(geometry, fld):
    """Hessian of ``f`` keyed like ``geometry.metric_components()``."""
    if geometry.is_radial:
        h_rr, h_sph = hessian_radial(geometry, fld)
        out = {"rr": h_rr.values}
        if h_sph is not None:
            out["sph"] = h_sph.values
        return out
    f = check_field(geometry, fld)
    u = geometry.u_values
    fx, fy = _torus_d1(geometry, f)
    ux, uy = _torus_d1(geometry, u)
    fxx, fyy = _torus_flat_laplacian(geometry, f)
    fxy = (
        np.roll(np.roll(f, -1, 0), -1, 1)
        - np.roll(np.roll(f, -1, 0), 1, 1)
        - np.roll(np.roll(f, 1, 0), -1, 1)
        + np.roll(np.roll(f, 1, 0), 1, 1)
    ) / (4 * geometry.hx * geometry.hy)
    # Christoffel symbols of exp(2u) delta
    return {
        "xx": fxx - ux * fx + uy * fy,
        "xy": fxy - uy * fx - ux * fy,
        "yy": fyy + ux * fx - uy * fy,
    }


def gradient_norm(geometry, fld):
    """``|grad f|_{g_F}`` per node."""
    f = check_field(geometry, fld)
    if geometry.is_radial:
        return ScalarField(geometry, np.abs(_d1(geometry, f)) / geometry.a_nodes)
    fx, fy = _torus_d1(geometry, f)
    return ScalarField(geometry, np.exp(-geometry.u_values) * np.hypot(fx, fy))


@dataclass(frozen=True, eq=False)
class SparseSymmetricOperator:
    """``L v = W^{-1} K v + V v`` with ``K`` symmetric and ``W`` the node
    volume weights, so ``L`` is self-adjoint for ``<u, v> = sum u v W``."""

    geometry: object
    stiffness: sp.csr_matrix
    mass: np.ndarray
    potential: np.ndarray

    @property
    def dimension(self):
        return self.mass.size

    @property
    def tridiagonal(self):
        return self.geometry.is_radial

    def apply(self, v):
        v = np.asarray(v, dtype=float).ravel()
        return self.stiffness @ v / self.mass + self.potential * v

    def inner(self, u, v):
        return float(np.sum(np.ravel(u) * np.ravel(v) * self.mass))

    def shifted(self, c):
        """Same operator with ``c`` added to the potential."""
        return SparseSymmetricOperator(self.geometry, self.stiffness, self.mass, self.potential + c)

    def to_matrix(self):
        return (sp.diags(1.0 / self.mass) @ self.stiffness + sp.diags(self.potential)).tocsr()

    def to_coo_text(self):
        """One ``row col value`` line per stored entry of ``L``."""
        coo = self.to_matrix().tocoo()
        order = np.lexsort((coo.col, coo.row))
        return "".join(
            f"{r} {c} {v:.17g}\n" for r, c, v in zip(coo.row[order], coo.col[order], coo.data[order])
        )


def assemble_L(geometry, tau_F=None):
    """Matrix of ``v -> -Delta_F v + (tau_F/2) v`` on a compact fiber.

    ``tau_F`` may be any :class:`ScalarField` on ``geometry``; by default it
    is computed by :func:`staticspace.curvature.fiber_scalar_curvature`.
    """
    if not geometry.compact:
        raise PreconditionError(
            "the principal eigenproblem is only posed on compact fibers "
            "(TwoCaps radial charts or tori)"
        )
    if tau_F is None:
        from .curvature import fiber_scalar_curvature

        tau_F = fiber_scalar_curvature(geometry)
    tau = check_field(geometry, tau_F).ravel()
    K = _radial_stiffness(geometry) if geometry.is_radial else _torus_stiffness(geometry)
    w = volume_weights(geometry).values.ravel()
    return SparseSymmetricOperator(geometry, K, w, 0.5 * tau)
