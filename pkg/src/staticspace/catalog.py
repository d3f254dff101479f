"""Named space-times: Minkowski strip, Einstein static universe, anti-de
Sitter and the exterior Schwarzschild solution, with their verification
bundles, plus a seeded generator of random compact fibers."""

import math
from dataclasses import dataclass, field

import numpy as np

from . import discreteops, einstein
from .curvature import (
    StandardStaticSpacetime,
    fiber_scalar_curvature,
    min_ricci_eigenvalue,
    ricci_trace,
    spacetime_scalar_curvature,
)
from .einstein import DEFAULT_TOLERANCES, Hypothesis, make_report
from .errors import GeometryError
from .fiber import AnalyticGeometry, Closure, ConformalTorusGeometry, Profile, RevolutionGeometry, ScalarField
from .spectral import construct_constant_scalar

MIN_GRID = 64
ADS_R_MAX = 4.0
WARPED_GRID = 1024


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    params: dict = field(default_factory=dict)
    expected: dict = field(default_factory=dict)

    def describe(self):
        args = ", ".join(f"{k}={v}" for k, v in self.params.items())
        return f"{self.name}({args})"


def Minkowski(c=0.0, d=1.0):
    return CatalogEntry("Minkowski", {"c": float(c), "d": float(d)}, {"curvature": 1e-8})


def EinsteinStaticUniverse(s=3):
    return CatalogEntry("EinsteinStaticUniverse", {"s": int(s)}, {"einstein_residual_min": 0.1})


def AntiDeSitter(s=3, r_max=ADS_R_MAX):
    return CatalogEntry("AntiDeSitter", {"s": int(s), "r_max": float(r_max)}, {"residuals": 1e-4})


def SchwarzschildExterior(m=1.0, r_lo=2.5, r_hi=20.0):
    if not (m > 0 and r_lo > 2 * m):
        raise GeometryError(f"SchwarzschildExterior needs r_lo > 2m > 0 (got m={m}, r_lo={r_lo})",
                            key="r_lo", constraint="r_lo>2m>0")
    return CatalogEntry("SchwarzschildExterior", {"m": float(m), "r_lo": float(r_lo), "r_hi": float(r_hi)},
                        {"residuals": 1e-4})


ENTRIES = {
    "Minkowski": Minkowski,
    "EinsteinStaticUniverse": EinsteinStaticUniverse,
    "AntiDeSitter": AntiDeSitter,
    "SchwarzschildExterior": SchwarzschildExterior,
}


def entry_by_name(name, **params):
    try:
        return ENTRIES[name](**params)
    except KeyError:
        raise GeometryError(f"unknown catalog entry {name!r}; choose from {', '.join(ENTRIES)}", key="entry") from None


def build(entry, grid_n=512):
    if grid_n < MIN_GRID:
        raise GeometryError(f"catalog grids need at least {MIN_GRID} nodes, got {grid_n}", key="grid",
                            constraint=f"grid>={MIN_GRID}")
    p = entry.params
    if entry.name == "Minkowski":
        g = AnalyticGeometry.euclidean_interval(p["c"], p["d"], n=grid_n)
        f = np.ones(g.n)
    elif entry.name == "EinsteinStaticUniverse":
        g = AnalyticGeometry.round_sphere(p["s"], 1.0, n=grid_n)
        f = np.ones(g.n)
    elif entry.name == "AntiDeSitter":
        g = AnalyticGeometry.hyperbolic_space(p["s"], 1.0, r_max=p["r_max"], n=grid_n)
        f = np.cosh(g.nodes)
    elif entry.name == "SchwarzschildExterior":
        g = AnalyticGeometry.schwarzschild_slice(p["m"], p["r_lo"], p["r_hi"], n=grid_n)
        f = np.sqrt(1.0 - 2.0 * p["m"] / g.areal_radius)
    else:
        raise GeometryError(f"unknown catalog entry {entry.name!r}", key="entry")
    return StandardStaticSpacetime(g, ScalarField(g, f))


# --------------------------------------------------------------------------
# bundles


def _trace_identity_report(st, tol):
    tau = spacetime_scalar_curvature(st).values
    res = float(np.max(np.abs(ricci_trace(st).values - tau)) / max(1.0, np.max(np.abs(tau))))
    return make_report("trace_identity", [], {"trace": res}, tol)


def _einstein_expectation(st, lower):
    """Records the expected failure of the Einstein test as a pass."""
    lam, res = einstein.einstein_residual(st)
    hyp = Hypothesis("f is constant and the fiber has constant curvature", True, lam)
    return make_report("einstein_residual_expected_failure", [hyp],
                       {"shortfall": max(0.0, lower - res)}, 0.0,
                       (f"einstein_residual = {res:.6g} (expected > {lower}); lambda = {lam:.6g}",))


def _einstein_residual_report(st, tol, expect_lambda=None):
    lam, res = einstein.einstein_residual(st)
    residuals = {"einstein": res}
    if expect_lambda is not None:
        residuals["lambda"] = abs(lam - expect_lambda) / max(1.0, abs(expect_lambda))
    return make_report("einstein_residual", [], residuals, tol, (f"lambda = {lam:.10g}",))


def _warped_report(st, tol):
    s = st.s
    tau = float(np.mean(spacetime_scalar_curvature(st).values))
    line = AnalyticGeometry.euclidean_interval(-1.0, 1.0, n=WARPED_GRID)
    k = math.sqrt(-tau / (s * (s + 1))) if tau < 0 else 1.0
    psi = ScalarField(line, np.exp(k * line.nodes))
    return einstein.check_warped_structure(psi, tau, s, tol)


def _schwarzschild_reports(st, tol):
    g = st.fiber
    lap = discreteops.laplacian(g, st.f).values
    tau_F = fiber_scalar_curvature(g).values
    min_ric = min_ricci_eigenvalue(g)
    i = int(np.argmin(min_ric))
    r_w = float(g.areal_radius[i])
    return [
        _einstein_residual_report(st, tol, expect_lambda=0.0),
        make_report("static_vacuum", [], {"laplacian_f": float(np.max(np.abs(lap / st.f.values))),
                                          "tau_F": float(np.max(np.abs(tau_F)))}, tol),
        make_report(
            "fiber_ricci_negative_direction",
            [Hypothesis("fiber Ricci has a negative eigenvalue", bool(min_ric[i] < 0), float(min_ric[i]))],
            {}, tol, (f"witness r = {r_w:.6g}, min Ric_F eigenvalue = {min_ric[i]:.6g}",),
        ),
    ]


def verify_entry(entry, grid_n=512, tol=DEFAULT_TOLERANCES):
    """Run the entry's verification bundle; returns a list of reports."""
    st = build(entry, grid_n)
    reports = [_trace_identity_report(st, 1e-8)]
    if entry.name == "EinsteinStaticUniverse":
        reports += [
            _einstein_expectation(st, entry.expected["einstein_residual_min"]),
            einstein.check_constant_scalar_integral(st, tol),
            einstein.check_scalar_bound_noncompact(st, tol),
        ]
    elif entry.name == "AntiDeSitter":
        reports += [
            _einstein_residual_report(st, tol.conclusion, expect_lambda=-float(st.s)),
            einstein.check_einstein_relations(st, tol),
            einstein.check_hessian_remark(st, tol),
            _warped_report(st, tol),
        ]
    elif entry.name == "SchwarzschildExterior":
        reports += _schwarzschild_reports(st, tol.conclusion)
        reports.append(einstein.check_einstein_relations(st, tol))
    else:
        tau = spacetime_scalar_curvature(st).values
        reports += [
            make_report("zero_curvature", [], {"tau": float(np.max(np.abs(tau)))}, entry.expected["curvature"]),
            einstein.check_einstein_relations(st, tol),
            einstein.check_einstein_bounds(st, tol),
        ]
    return reports


# --------------------------------------------------------------------------
# random compact fibers


def random_compact_fiber(rng, radial_n=256, torus_n=64):
    """A compact fiber drawn from ``rng``: a perturbed round sphere of
    dimension 2 or 3, or a conformal torus with a few random Fourier modes."""
    if rng.random() < 0.5:
        s = int(rng.integers(2, 4))
        eps = float(rng.uniform(-0.4, 0.6))
        return RevolutionGeometry(s, 0.0, math.pi, radial_n, Profile.builtin(f"perturbed_sin:{eps!r}"), Closure.TWO_CAPS)
    g0 = ConformalTorusGeometry(torus_n, torus_n)
    X, Y = g0.grid
    u = np.zeros_like(X)
    for _ in range(int(rng.integers(1, 4))):
        kx, ky = rng.integers(0, 3, size=2)
        amp, phase = rng.uniform(-0.25, 0.25), rng.uniform(0, 2 * np.pi)
        u += amp * np.cos(kx * X + ky * Y + phase)
    return ConformalTorusGeometry(torus_n, torus_n, u=u)


def random_battery(seed=0, count=50, tol=DEFAULT_TOLERANCES, **kwargs):
    """Construct constant-``tau`` space-times over ``count`` random compact
    fibers and run every check; returns ``[(fiber, reports), ...]``."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        g = random_compact_fiber(rng, **kwargs)
        st, _ = construct_constant_scalar(g)
        out.append((g, einstein.verify(st, tol=tol)))
    return out
