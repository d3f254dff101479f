"""Fiber and space-time curvature of ``_f(a,b) x F``.

With ``g = -f^2 dt^2 + g_F`` on ``(a, b) x F`` everything is independent of
``t``, so space-time tensors are stored as fields on the fiber:

    tau = tau_F - 2 Delta_F(f) / f
    Ric(d_t + V, d_t + W) = Ric_F(V, W) + f Delta_F(f) - H^f(V, W) / f

where the mixed ``(t, V)`` components vanish identically.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import discreteops
from .errors import GeometryError, UnsupportedFieldError
from .fiber import AnalyticGeometry, ScalarField, check_field


@dataclass(frozen=True, eq=False)
class StandardStaticSpacetime:
    """Fiber, positive warping field ``f`` and the (metadata-only) time
    interval ``(a, b)``."""

    fiber: object
    f: ScalarField
    a: float = -math.inf
    b: float = math.inf

    def __post_init__(self):
        check_field(self.fiber, self.f)
        if not np.all(self.f.values > 0):
            raise GeometryError("warping function must be positive at every node", constraint="f>0")
        if not self.a < self.b:
            raise GeometryError("time interval needs a < b", constraint="a<b")

    @property
    def s(self):
        return self.fiber.s

    @property
    def n(self):
        return self.fiber.s + 1

    def scaled(self, c):
        """Same space-time with warping ``c f``."""
        return StandardStaticSpacetime(self.fiber, self.f.with_values(c * self.f.values), self.a, self.b)


@dataclass(frozen=True, eq=False)
class RicciReport:
    """Space-time Ricci tensor as fiber fields.

    ``fiber_block`` is keyed like ``fiber.metric_components()``: ``rr`` and
    ``sph`` on radial charts (``sph`` multiplies the unit-sphere metric),
    ``xx``, ``xy``, ``yy`` on tori.
    """

    ric_tt: ScalarField
    fiber_block: dict
    mixed_zero: bool = True

    @property
    def ric_fiber_rr(self):
        return self.fiber_block.get("rr")

    @property
    def ric_fiber_sph(self):
        return self.fiber_block.get("sph")


# --------------------------------------------------------------------------
# fiber curvature


def _proper_radial_derivatives(g):
    """``psi`` derivatives with respect to proper radial distance."""
    a, da = g.a_nodes, g.da_nodes
    dpsi = g.dpsi_nodes / a
    ddpsi = (g.ddpsi_nodes - da / a * g.dpsi_nodes) / a**2
    return dpsi, ddpsi


def _spectral_flat_laplacian(g, values):
    kx = 2 * np.pi * np.fft.fftfreq(g.nx, d=g.hx)
    ky = 2 * np.pi * np.fft.fftfreq(g.ny, d=g.hy)
    symbol = -(kx[:, None] ** 2 + ky[None, :] ** 2)
    return np.real(np.fft.ifft2(symbol * np.fft.fft2(values)))


def fiber_scalar_curvature(geometry):
    """``tau_F`` at every node.

    Closed forms for analytic kinds; otherwise
    ``-2(s-1) psi''/psi + (s-1)(s-2)(1 - psi'^2)/psi^2`` (proper-distance
    derivatives) on radial charts and ``-2 exp(-2u) Delta_0 u`` on tori,
    with ``Delta_0 u`` evaluated spectrally.
    """
    g = geometry
    if isinstance(g, AnalyticGeometry):
        return ScalarField(g, g.closed_form_scalar_curvature())
    if g.is_radial:
        ric_rr, ric_sph = _revolution_ricci(g)
        return ScalarField(g, _radial_trace(g, ric_rr, ric_sph))
    if g.kind == "conformal_torus":
        lap_u = _spectral_flat_laplacian(g, g.u_values)
        return ScalarField(g, -2.0 * lap_u / g.conformal_factor)
    raise UnsupportedFieldError(f"no scalar curvature for geometry kind {g.kind!r}")


def _radial_trace(g, rr, sph):
    t = rr / g.a_nodes**2
    if sph is not None:
        t = t + (g.s - 1) * sph / g.psi_nodes**2
    return t


def _revolution_ricci(g):
    s = g.s
    if s == 1:
        return np.zeros(g.n), None
    psi = g.psi_nodes
    dpsi, ddpsi = _proper_radial_derivatives(g)
    ric_rr = -(s - 1) * ddpsi / psi * g.a_nodes**2
    ric_sph = -psi * ddpsi + (s - 2) * (1.0 - dpsi**2)
    return ric_rr, ric_sph


def fiber_ricci_radial(geometry):
    """``Ric_F = ric_rr dr^2 + ric_sph dsigma^2`` on a radial chart.

    Components are in chart coordinates; ``ric_sph`` is ``None`` for ``s = 1``.
    """
    g = geometry
    if not g.is_radial:
        raise UnsupportedFieldError("fiber_ricci_radial needs a radial chart")
    if isinstance(g, AnalyticGeometry):
        rr, sph = g.closed_form_ricci()
    else:
        rr, sph = _revolution_ricci(g)
    return ScalarField(g, rr), (ScalarField(g, sph) if sph is not None else None)


def fiber_ricci_components(geometry):
    """``Ric_F`` keyed like ``geometry.metric_components()``."""
    if geometry.is_radial:
        rr, sph = fiber_ricci_radial(geometry)
        out = {"rr": rr.values}
        if sph is not None:
            out["sph"] = sph.values
        return out
    half_tau = 0.5 * fiber_scalar_curvature(geometry).values
    return {k: half_tau * v for k, v in geometry.metric_components().items()}


def metric_trace(geometry, components):
    """``g_F^{ij} T_ij`` for a diagonal-metric component dictionary."""
    gcomp = geometry.metric_components()
    mult = geometry.block_multiplicity()
    total = 0.0
    for key, value in components.items():
        if mult[key]:
            total = total + mult[key] * value / gcomp[key]
    return total


def min_ricci_eigenvalue(geometry):
    """Smallest eigenvalue of ``Ric_F`` relative to ``g_F`` at every node."""
    ric = fiber_ricci_components(geometry)
    gcomp = geometry.metric_components()
    if geometry.is_radial:
        return np.min([ric[k] / gcomp[k] for k in ric], axis=0)
    # Ric_F = (tau_F/2) g_F in two dimensions
    return ric["xx"] / gcomp["xx"]


# --------------------------------------------------------------------------
# space-time curvature


def spacetime_scalar_curvature(st):
    """``tau = tau_F - 2 Delta_F(f)/f`` at every fiber node."""
    if st.s == 1:
        from .ode2d import scalar_curvature_2d

        g = st.fiber
        if g.radial_factor is not None:
            raise UnsupportedFieldError("s = 1 fibers must use a unit-speed coordinate")
        tau = scalar_curvature_2d(st.f.values, x=g.nodes) + fiber_scalar_curvature(g).values
        return ScalarField(g, tau)
    tau_F = fiber_scalar_curvature(st.fiber).values
    lap = discreteops.laplacian(st.fiber, st.f).values
    return ScalarField(st.fiber, tau_F - 2.0 * lap / st.f.values)


def spacetime_ricci(st):
    g = st.fiber
    f = st.f.values
    lap = discreteops.laplacian(g, st.f).values
    hess = discreteops.hessian_components(g, st.f)
    ric_F = fiber_ricci_components(g)
    block = {k: ScalarField(g, ric_F[k] - hess[k] / f) for k in ric_F}
    return RicciReport(ric_tt=ScalarField(g, f * lap), fiber_block=block)


def ricci_trace(st, report=None):
    """``g^{ab} Ric_ab`` of the space-time, per fiber node."""
    report = report if report is not None else spacetime_ricci(st)
    f = st.f.values
    trace = -report.ric_tt.values / f**2
    trace = trace + metric_trace(st.fiber, {k: v.values for k, v in report.fiber_block.items()})
    return ScalarField(st.fiber, trace)


def spacetime_metric_components(st):
    """``g`` per node: ``tt`` plus the fiber blocks."""
    comps = {"tt": -st.f.values**2}
    comps.update(st.fiber.metric_components())
    return comps


def pointwise_scalar_curvature(st):
    """``tau`` from an independent discretisation of ``Delta_F f``.

    Radial charts: non-conservative central differences
    ``f'' + ((s-1) psi'/psi - a'/a) f'`` (divided by ``a^2``) with exact
    profile derivatives.  Tori: spectral (FFT) Laplacian.  Comparing this to
    :func:`spacetime_scalar_curvature` exposes discretisation error that the
    flux stencil, shared with the eigenproblem, cannot see.
    """
    g = st.fiber
    f = st.f.values
    tau_F = fiber_scalar_curvature(g).values
    if g.is_radial:
        d1 = discreteops._d1(g, f)
        d2 = discreteops._d2(g, f)
        a = g.a_nodes
        lap = (d2 - g.da_nodes / a * d1) / a**2
        if g.s >= 2:
            lap = lap + (g.s - 1) * g.dpsi_nodes / g.psi_nodes * d1 / a**2
    else:
        lap = _spectral_flat_laplacian(g, f) / g.conformal_factor
    return ScalarField(g, tau_F - 2.0 * lap / f)
