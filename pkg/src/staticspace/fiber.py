"""Fiber Riemannian manifolds ``(F, g_F)`` sampled on uniform grids.

Two families are supported:

* radial charts ``g_F = a(r)^2 dr^2 + psi(r)^2 dsigma^2_{s-1}``
  (:class:`RevolutionGeometry` and its closed-form catalog kinds in
  :class:`AnalyticGeometry`), sampled at cell centres so that a coordinate
  pole ``psi = 0`` is never a node;
* conformally flat tori ``g_F = exp(2u) (dx^2 + dy^2)``
  (:class:`ConformalTorusGeometry`) on a periodic vertex grid.

Fields on a radial chart are radial: one value per ``r`` node.
"""

import enum
import hashlib
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.interpolate import CubicSpline

from . import jets
from .errors import GeometryError, GeometryMismatchError, UnsupportedFieldError

MIN_RADIAL_NODES = 16
MIN_TORUS_NODES = 8


class Closure(str, enum.Enum):
    TWO_CAPS = "TwoCaps"
    BOUNDARY = "Boundary"


def sphere_area(k):
    """Volume of the unit round ``k``-sphere; ``k = 0`` returns 1 so that a
    one-dimensional fiber carries plain length measure."""
    if k == 0:
        return 1.0
    return 2.0 * math.pi ** ((k + 1) / 2) / math.gamma((k + 1) / 2)


# --------------------------------------------------------------------------
# profiles psi(r), a(r)


class Profile:
    """A one-variable function with exact first and second derivatives.

    Builtins are evaluated through :mod:`staticspace.jets`; sampled profiles
    go through a cubic spline.  ``regularity_tol`` is the slack allowed when
    checking smooth-cap conditions at poles.
    """

    def __init__(self, derivs, name, regularity_tol=1e-6):
        self._derivs = derivs
        self.name = name
        self.regularity_tol = regularity_tol

    def __repr__(self):
        return f"Profile({self.name!r})"

    def __call__(self, r):
        return self._derivs(np.asarray(r, dtype=float))[0]

    def derivatives(self, r):
        """``(psi, psi', psi'')`` at ``r``."""
        return self._derivs(np.asarray(r, dtype=float))

    @classmethod
    def from_jet_function(cls, fn, name):
        return cls(lambda r: jets.derivatives(fn, r), name)

    @classmethod
    def builtin(cls, spec, scale=1.0):
        """Named profile: ``sin``, ``sinh``, ``cosh``, ``linear``,
        ``const[:c]`` or ``perturbed_sin:eps``.

        ``scale`` R turns ``sin`` into ``R sin(r/R)`` (and likewise ``sinh``)
        so that the profile keeps unit slope at the pole.
        """
        name, _, arg = spec.partition(":")
        R = float(scale)
        if name == "sin":
            fn = lambda x: R * jets.sin(x / R)
        elif name == "sinh":
            fn = lambda x: R * jets.sinh(x / R)
        elif name == "cosh":
            fn = lambda x: R * jets.cosh(x / R)
        elif name == "linear":
            fn = lambda x: x
        elif name == "const":
            c = float(arg) if arg else 1.0
            if not c > 0:
                raise GeometryError(f"const profile needs c > 0, got {c}", constraint="psi>0")
            fn = lambda x: jets.Jet.constant(np.full(np.shape(x.v), c))
        elif name == "perturbed_sin":
            eps = float(arg) if arg else 0.1
            fn = lambda x: jets.sin(x) * (1.0 + eps * jets.sin(x) ** 2)
        else:
            raise GeometryError(f"unknown profile builtin {spec!r}", key="psi")
        label = spec if R == 1.0 else f"{spec}@{R!r}"
        return cls.from_jet_function(fn, label)

    @classmethod
    def from_samples(cls, nodes, values, *, lower_pole=None, upper_pole=None):
        """Spline through sampled values.

        At a pole ``r0`` the profile is extended oddly (``psi(2 r0 - r) =
        -psi(r)``), which pins ``psi(r0) = 0`` and keeps the spline smooth
        across the cap.
        """
        x = np.asarray(nodes, dtype=float)
        y = np.asarray(values, dtype=float)
        if x.shape != y.shape or x.ndim != 1:
            raise GeometryError("profile samples must match the node count", key="psi")
        k = min(4, len(x))
        if lower_pole is not None:
            x = np.concatenate([2 * lower_pole - x[:k][::-1], [lower_pole], x])
            y = np.concatenate([-y[:k][::-1], [0.0], y])
        if upper_pole is not None:
            x = np.concatenate([x, [upper_pole], 2 * upper_pole - x[-k:][::-1]])
            y = np.concatenate([y, [0.0], -y[-k:][::-1]])
        spline = CubicSpline(x, y)
        digest = hashlib.sha1(np.ascontiguousarray(values, dtype=float).tobytes()).hexdigest()[:12]
        return cls(
            lambda r: (spline(r), spline(r, 1), spline(r, 2)),
            f"samples:{digest}",
            regularity_tol=1e-3,
        )


# --------------------------------------------------------------------------
# geometries


@dataclass(frozen=True, eq=False)
class RevolutionGeometry:
    """Radial chart ``a(r)^2 dr^2 + psi(r)^2 dsigma^2_{s-1}`` on
    ``[r_min, r_max]`` with ``n`` cell-centred nodes.

    ``TwoCaps`` means both chart ends are smooth poles (sphere topology,
    compact without boundary).  ``Boundary`` is a manifold with boundary or
    a truncated chart of a noncompact manifold; an end where ``psi``
    vanishes is still treated as a pole.
    """

    s: int
    r_min: float
    r_max: float
    n: int
    psi: Profile
    closure: Closure = Closure.TWO_CAPS
    radial_factor: Profile | None = None

    def __post_init__(self):
        object.__setattr__(self, "closure", Closure(self.closure))
        self._validate()

    kind = "revolution"

    def _validate(self):
        if int(self.s) != self.s or self.s < 1:
            raise GeometryError(f"dimension s must be a positive integer, got {self.s}", key="s")
        if self.n < MIN_RADIAL_NODES:
            raise GeometryError(f"n must be >= {MIN_RADIAL_NODES}, got {self.n}", key="n", constraint="n>=16")
        if not self.r_min < self.r_max:
            raise GeometryError("r_min < r_max required", key="r_min", constraint="r_min<r_max")
        if self.s >= 2 and not np.all(self.psi_nodes > 0):
            raise GeometryError("psi must be positive on the chart interior", key="psi", constraint="psi>0")
        if not np.all(self.a_nodes > 0):
            raise GeometryError("radial metric factor must be positive", key="radial_factor")
        if self.closure is Closure.TWO_CAPS:
            tol = self.psi.regularity_tol
            scale = max(1.0, float(np.max(self.psi_nodes)))
            for end in (self.r_min, self.r_max):
                p, dp, _ = self.psi.derivatives(np.array([end]))
                a = self._a_derivs(np.array([end]))[0]
                if abs(p[0]) > tol * scale:
                    raise GeometryError(
                        f"TwoCaps needs psi = 0 at r = {end}, got {p[0]:.3g}", key="psi", constraint="cap:psi=0"
                    )
                if abs(abs(dp[0]) / a[0] - 1.0) > tol:
                    raise GeometryError(
                        f"TwoCaps needs |psi'| = 1 at r = {end}, got {abs(dp[0]) / a[0]:.6g}",
                        key="psi",
                        constraint="cap:|psi'|=1",
                    )

    # -- grid --------------------------------------------------------------

    @property
    def h(self):
        return (self.r_max - self.r_min) / self.n

    @cached_property
    def nodes(self):
        return self.r_min + (np.arange(self.n) + 0.5) * self.h

    @cached_property
    def faces(self):
        return self.r_min + np.arange(self.n + 1) * self.h

    @property
    def node_count(self):
        return self.n

    @property
    def shape(self):
        return (self.n,)

    is_radial = True

    @property
    def compact(self):
        return self.closure is Closure.TWO_CAPS

    @property
    def complete(self):
        """Completeness flag; only closed charts are complete by default."""
        return self.compact

    @property
    def truncated(self):
        return not self.compact

    @cached_property
    def lower_pole(self):
        if self.closure is Closure.TWO_CAPS:
            return True
        return self.s >= 2 and abs(float(self.psi(np.array([self.r_min]))[0])) < 1e-12

    @cached_property
    def upper_pole(self):
        if self.closure is Closure.TWO_CAPS:
            return True
        return self.s >= 2 and abs(float(self.psi(np.array([self.r_max]))[0])) < 1e-12

    @property
    def signature(self):
        a = self.radial_factor.name if self.radial_factor is not None else "1"
        return (self.kind, self.s, self.r_min, self.r_max, self.n, self.closure.value, self.psi.name, a)

    # -- metric data at nodes ----------------------------------------------

    def _a_derivs(self, r):
        if self.radial_factor is None:
            one = np.ones_like(r)
            return one, np.zeros_like(r), np.zeros_like(r)
        return self.radial_factor.derivatives(r)

    @cached_property
    def _psi_derivs(self):
        return self.psi.derivatives(self.nodes)

    @property
    def psi_nodes(self):
        return self._psi_derivs[0]

    @property
    def dpsi_nodes(self):
        return self._psi_derivs[1]

    @property
    def ddpsi_nodes(self):
        return self._psi_derivs[2]

    @cached_property
    def _a_node_derivs(self):
        return self._a_derivs(self.nodes)

    @property
    def a_nodes(self):
        return self._a_node_derivs[0]

    @property
    def da_nodes(self):
        return self._a_node_derivs[1]

    @cached_property
    def psi_faces(self):
        p = np.array(self.psi(self.faces), dtype=float)
        if self.lower_pole:
            p[0] = 0.0
        if self.upper_pole:
            p[-1] = 0.0
        return p

    @cached_property
    def a_faces(self):
        return self._a_derivs(self.faces)[0]

    @cached_property
    def face_conductance(self):
        """``psi^{s-1} / a`` on cell faces; zero on pole faces."""
        return self.psi_faces ** (self.s - 1) / self.a_faces

    @cached_property
    def cell_density(self):
        """Cell average of the volume density ``psi^{s-1} a`` (Simpson's rule).

        Node-value densities would be inconsistent with the face fluxes in the
        first cell next to a pole when ``s >= 3``.
        """
        k = self.s - 1
        left = self.psi_faces[:-1] ** k * self.a_faces[:-1]
        right = self.psi_faces[1:] ** k * self.a_faces[1:]
        mid = self.psi_nodes**k * self.a_nodes
        return (left + 4.0 * mid + right) / 6.0

    def metric_components(self):
        """Diagonal components of ``g_F`` per node, keyed by block name."""
        comps = {"rr": self.a_nodes**2}
        if self.s >= 2:
            comps["sph"] = self.psi_nodes**2
        return comps

    def block_multiplicity(self):
        return {"rr": 1, "sph": self.s - 1}

    @property
    def areal_radius(self):
        return self.psi_nodes

    def coordinates(self):
        return {"r": self.nodes}


@dataclass(frozen=True, eq=False)
class AnalyticGeometry(RevolutionGeometry):
    """Closed-form catalog fibers; build with the classmethod constructors."""

    kind: str = "analytic"
    params: tuple = ()
    chart: str = "r"

    def __post_init__(self):
        super().__post_init__()
        if self.kind == "schwarzschild_slice":
            m, r_lo, r_hi = (dict(self.params)[k] for k in ("m", "r_lo", "r_hi"))
            if not (m > 0 and r_lo > 2 * m):
                raise GeometryError("SchwarzschildSlice needs r_lo > 2m > 0", key="r_lo", constraint="r_lo>2m>0")

    @property
    def signature(self):
        return (self.kind, self.n) + tuple(self.params)

    @property
    def complete(self):
        # Truncated windows onto complete manifolds keep the flag of the
        # manifold they sample; the Schwarzschild slice is incomplete.
        return self.kind in ("round_sphere", "hyperbolic_space", "euclidean_interval")

    @classmethod
    def round_sphere(cls, s, radius=1.0, n=256):
        if not radius > 0:
            raise GeometryError("radius must be positive", key="radius")
        return cls(
            s=s, r_min=0.0, r_max=math.pi * radius, n=n,
            psi=Profile.builtin("sin", scale=radius), closure=Closure.TWO_CAPS,
            kind="round_sphere", params=(("s", s), ("radius", float(radius))),
        )

    @classmethod
    def hyperbolic_space(cls, s, scale=1.0, r_max=4.0, n=512):
        """Geodesic-polar chart of ``H^s`` (curvature ``-1/scale^2``) truncated
        at ``r_max``."""
        if not scale > 0:
            raise GeometryError("curvature scale must be positive", key="scale")
        return cls(
            s=s, r_min=0.0, r_max=float(r_max), n=n,
            psi=Profile.builtin("sinh", scale=scale), closure=Closure.BOUNDARY,
            kind="hyperbolic_space", params=(("s", s), ("scale", float(scale)), ("r_max", float(r_max))),
        )

    @classmethod
    def euclidean_interval(cls, c, d, n=256):
        return cls(
            s=1, r_min=float(c), r_max=float(d), n=n,
            psi=Profile.builtin("const"), closure=Closure.BOUNDARY,
            kind="euclidean_interval", params=(("c", float(c)), ("d", float(d))),
        )

    @classmethod
    def schwarzschild_slice(cls, m, r_lo, r_hi, n=512):
        """Time-symmetric slice ``dr^2/(1-2m/r) + r^2 dOmega^2``, ``r_lo <= r <= r_hi``.

        The chart coordinate is ``x = sqrt(r - 2m)``, in which the metric
        ``4(2m + x^2) dx^2 + (2m + x^2)^2 dOmega^2`` is polynomial; nodes are
        uniform in ``x``.  ``areal_radius`` gives ``r`` at the nodes.
        """
        m, r_lo, r_hi = float(m), float(r_lo), float(r_hi)
        if not (m > 0 and r_lo > 2 * m):
            raise GeometryError(
                f"SchwarzschildSlice needs r_lo > 2m > 0 (got m={m}, r_lo={r_lo})",
                key="r_lo", constraint="r_lo>2m>0",
            )
        if not r_hi > r_lo:
            raise GeometryError("r_hi must exceed r_lo", key="r_hi")
        psi = Profile.from_jet_function(lambda x: 2 * m + x * x, f"schwarzschild_r:{m!r}")
        a = Profile.from_jet_function(lambda x: 2.0 * jets.sqrt(2 * m + x * x), f"schwarzschild_a:{m!r}")
        return cls(
            s=3, r_min=math.sqrt(r_lo - 2 * m), r_max=math.sqrt(r_hi - 2 * m), n=n,
            psi=psi, closure=Closure.BOUNDARY, radial_factor=a,
            kind="schwarzschild_slice", params=(("m", m), ("r_lo", r_lo), ("r_hi", r_hi)), chart="x=sqrt(r-2m)",
        )

    def coordinates(self):
        if self.kind == "schwarzschild_slice":
            return {"x": self.nodes, "r": self.areal_radius}
        return {"r": self.nodes}

    # -- closed forms ------------------------------------------------------

    def closed_form_scalar_curvature(self):
        p = dict(self.params)
        s = self.s
        if self.kind == "round_sphere":
            k = 1.0 / p["radius"] ** 2
        elif self.kind == "hyperbolic_space":
            k = -1.0 / p["scale"] ** 2
        elif self.kind == "euclidean_interval":
            k = 0.0
        else:
            return np.zeros(self.n)
        return np.full(self.n, s * (s - 1) * k)

    def closed_form_ricci(self):
        """``(ric_rr, ric_sph)`` in chart components (``ric_sph`` multiplies
        the unit-sphere metric)."""
        p = dict(self.params)
        s = self.s
        comps = self.metric_components()
        if self.kind in ("round_sphere", "hyperbolic_space", "euclidean_interval"):
            if self.kind == "round_sphere":
                k = 1.0 / p["radius"] ** 2
            elif self.kind == "hyperbolic_space":
                k = -1.0 / p["scale"] ** 2
            else:
                k = 0.0
            lam = (s - 1) * k
            return lam * comps["rr"], (lam * comps["sph"] if s >= 2 else None)
        m = p["m"]
        r = self.areal_radius
        # proper-radial component -2m/r^3, tangential m/r^3
        return -2.0 * m / r**3 * comps["rr"], m / r


@dataclass(frozen=True, eq=False)
class TorusExponent:
    """Conformal exponent ``u(x, y)`` on a periodic box."""

    name: str
    samples: np.ndarray | None = None
    amplitude: float = 0.0

    @classmethod
    def parse(cls, spec):
        if isinstance(spec, str):
            name, _, arg = spec.partition(":")
            if name in ("const", "zero"):
                return cls(spec, amplitude=float(arg) if arg else 0.0)
            if name in ("sinsin", "cosx"):
                return cls(spec, amplitude=float(arg) if arg else 0.2)
            raise GeometryError(f"unknown conformal exponent builtin {spec!r}", key="u")
        arr = np.asarray(spec, dtype=float)
        digest = hashlib.sha1(np.ascontiguousarray(arr).tobytes()).hexdigest()[:12]
        return cls(f"samples:{digest}", samples=arr)

    def sample(self, X, Y, Lx, Ly):
        if self.samples is not None:
            if self.samples.shape != X.shape:
                raise GeometryError(
                    f"u samples have shape {self.samples.shape}, grid is {X.shape}", key="u"
                )
            return self.samples.copy()
        name = self.name.partition(":")[0]
        if name in ("const", "zero"):
            return np.full(X.shape, self.amplitude)
        if name == "sinsin":
            return self.amplitude * np.sin(2 * np.pi * X / Lx) * np.sin(2 * np.pi * Y / Ly)
        return self.amplitude * np.cos(2 * np.pi * X / Lx)


@dataclass(frozen=True, eq=False)
class ConformalTorusGeometry:
    """Flat torus ``[0, Lx) x [0, Ly)`` with metric ``exp(2u)(dx^2 + dy^2)``."""

    nx: int
    ny: int
    Lx: float = 2 * math.pi
    Ly: float = 2 * math.pi
    u: TorusExponent = field(default_factory=lambda: TorusExponent("const"))

    kind = "conformal_torus"
    s = 2
    is_radial = False
    compact = True
    complete = True
    truncated = False
    closure = None

    def __post_init__(self):
        if not isinstance(self.u, TorusExponent):
            object.__setattr__(self, "u", TorusExponent.parse(self.u))
        if self.nx < MIN_TORUS_NODES or self.ny < MIN_TORUS_NODES:
            raise GeometryError(f"torus grid must be at least {MIN_TORUS_NODES} per side", key="nx")
        if not (self.Lx > 0 and self.Ly > 0):
            raise GeometryError("torus periods must be positive", key="Lx")
        if not np.all(np.isfinite(self.u_values)):
            raise GeometryError("conformal exponent must be finite", key="u")

    @property
    def hx(self):
        return self.Lx / self.nx

    @property
    def hy(self):
        return self.Ly / self.ny

    @cached_property
    def grid(self):
        x = np.arange(self.nx) * self.hx
        y = np.arange(self.ny) * self.hy
        return np.meshgrid(x, y, indexing="ij")

    @cached_property
    def u_values(self):
        X, Y = self.grid
        return self.u.sample(X, Y, self.Lx, self.Ly)

    @cached_property
    def conformal_factor(self):
        return np.exp(2.0 * self.u_values)

    @property
    def node_count(self):
        return self.nx * self.ny

    @property
    def shape(self):
        return (self.nx, self.ny)

    @property
    def signature(self):
        return (self.kind, self.nx, self.ny, self.Lx, self.Ly, self.u.name)

    def metric_components(self):
        e = self.conformal_factor
        return {"xx": e, "xy": np.zeros_like(e), "yy": e}

    def block_multiplicity(self):
        return {"xx": 1, "xy": 0, "yy": 1}

    def coordinates(self):
        X, Y = self.grid
        return {"x": X.ravel(), "y": Y.ravel()}


# --------------------------------------------------------------------------
# fields


def same_geometry(g1, g2):
    return g1 is g2 or g1.signature == g2.signature


@dataclass(frozen=True, eq=False)
class ScalarField:
    """Real values at the nodes of ``geometry``; read-only."""

    geometry: object
    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        g = self.geometry
        if g.is_radial and vals.ndim > 1 and vals.size != g.node_count:
            raise UnsupportedFieldError("fields on a radial chart must be radial (one value per r node)")
        if vals.size != g.node_count:
            raise GeometryError(
                f"field has {vals.size} values, geometry has {g.node_count} nodes", constraint="count"
            )
        vals = vals.reshape(g.shape)
        if not np.all(np.isfinite(vals)):
            raise GeometryError("field values must be finite", constraint="finite")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @classmethod
    def constant(cls, geometry, c):
        return cls(geometry, np.full(geometry.shape, float(c)))

    @classmethod
    def from_function(cls, geometry, fn):
        """Sample ``fn(r)`` on a radial chart or ``fn(x, y)`` on a torus."""
        if geometry.is_radial:
            return cls(geometry, fn(geometry.nodes))
        X, Y = geometry.grid
        return cls(geometry, fn(X, Y))

    def with_values(self, values):
        return ScalarField(self.geometry, values)

    def __len__(self):
        return self.values.size


def check_field(geometry, fld):
    if not same_geometry(fld.geometry, geometry):
        raise GeometryMismatchError("field is sampled on a different geometry")
    return fld.values


def volume_weights(geometry):
    """Quadrature weight ``dV`` at every node.

    Radial: ``|S^{s-1}| h`` times the cell average of ``psi^{s-1} a``.
    Torus: ``exp(2u) hx hy``.
    """
    if geometry.is_radial:
        w = sphere_area(geometry.s - 1) * geometry.cell_density * geometry.h
    else:
        w = geometry.conformal_factor * geometry.hx * geometry.hy
    return ScalarField(geometry, w)


def integrate(geometry, fld):
    vals = check_field(geometry, fld)
    return float(np.sum(vals * volume_weights(geometry).values))


def infimum(fld):
    """Minimum over sampled nodes.

    This is a sample infimum: it says nothing about values between nodes or
    outside a truncated chart.
    """
    return float(np.min(fld.values))
