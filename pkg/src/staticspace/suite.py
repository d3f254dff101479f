"""Acceptance battery: nine criteria, each returning its measurements and a
pass flag.  Used by the ``suite`` command and the acceptance tests."""

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import catalog, einstein, ode2d
from .curvature import StandardStaticSpacetime, ricci_trace, spacetime_scalar_curvature
from .errors import DomainError
from .fiber import AnalyticGeometry, Closure, ConformalTorusGeometry, Profile, RevolutionGeometry, ScalarField
from .spectral import construct_constant_scalar

PERTURBED_SPHERE = "perturbed_sin:0.2"
TORUS_EXPONENT = "sinsin:0.2"
SPHERE_GRIDS = (512, 1024)
TORUS_GRIDS = (160, 320)


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    measurements: dict = field(default_factory=dict)

    def line(self):
        shown = ", ".join(f"{k}={_fmt(v)}" for k, v in self.measurements.items())
        return f"criterion {self.number} [{'PASS' if self.passed else 'FAIL'}] {self.title}: {shown}"


def _fmt(v):
    if isinstance(v, bool) or isinstance(v, (int, np.integer)):
        return str(v)
    if isinstance(v, float):
        return f"{v:.3g}"
    return str(v)


def perturbed_sphere(n):
    return RevolutionGeometry(2, 0.0, math.pi, n, Profile.builtin(PERTURBED_SPHERE), Closure.TWO_CAPS)


def conformal_torus(n):
    return ConformalTorusGeometry(n, n, u=TORUS_EXPONENT)


# --------------------------------------------------------------------------


def criterion_1():
    t0 = time.perf_counter()
    errs = []
    for n in (512, 1024):
        st = catalog.build(catalog.AntiDeSitter(3), n)
        errs.append(float(np.max(np.abs(spacetime_scalar_curvature(st).values + 12.0))))
    elapsed = time.perf_counter() - t0
    ratio = errs[0] / errs[1]
    ok = errs[0] <= 1e-4 and ratio >= 3.5 and elapsed < 5.0
    return CriterionResult(1, "anti-de Sitter tau = -12, second order", ok,
                           {"err_512": errs[0], "err_1024": errs[1], "ratio": ratio, "seconds": elapsed})


def criterion_2():
    worst = 0.0
    for make in (catalog.Minkowski, catalog.EinsteinStaticUniverse, catalog.AntiDeSitter, catalog.SchwarzschildExterior):
        st = catalog.build(make(), 512)
        diff = np.abs(ricci_trace(st).values - spacetime_scalar_curvature(st).values)
        worst = max(worst, float(np.max(diff)))
    return CriterionResult(2, "trace of Ricci equals tau on all catalog entries", worst <= 1e-8, {"max_abs": worst})


def _construction_study(make, grids):
    rows = []
    for n in grids:
        t0 = time.perf_counter()
        c = construct_constant_scalar(make(n))
        rows.append({
            "grid": n,
            "seconds": time.perf_counter() - t0,
            "f_positive": bool(np.all(c.spacetime.f.values > 0)),
            "residual": c.eigen.residual,
            "constancy": c.constancy,
            "pointwise": c.pointwise_constancy,
            "tau": c.tau,
        })
    return rows


def criterion_3():
    m = {}
    ok = True
    for label, make, grids in (("sphere", perturbed_sphere, SPHERE_GRIDS), ("torus", conformal_torus, TORUS_GRIDS)):
        coarse, fine = _construction_study(make, grids)
        ratio = coarse["pointwise"] / fine["pointwise"]
        m.update({
            f"{label}_tau": fine["tau"],
            f"{label}_residual": fine["residual"],
            f"{label}_constancy": fine["constancy"],
            f"{label}_pointwise": fine["pointwise"],
            f"{label}_ratio": ratio,
            f"{label}_seconds": fine["seconds"],
        })
        ok &= (fine["f_positive"] and fine["residual"] <= 1e-8 and fine["constancy"] <= 1e-4
               and fine["pointwise"] <= 1e-4 and ratio >= 3.5 and fine["seconds"] < 30.0)
    return CriterionResult(3, "constant scalar curvature construction", bool(ok), m)


def criterion_4():
    fibers = {
        "sphere_s2": AnalyticGeometry.round_sphere(2, n=256),
        "sphere_s3": AnalyticGeometry.round_sphere(3, 2.0, n=256),
        "flat_torus": ConformalTorusGeometry(64, 64, u="const:0.3"),
        "revolution_sin": RevolutionGeometry(2, 0.0, math.pi, 256, Profile.builtin("sin"), Closure.TWO_CAPS),
    }
    m = {}
    for name, g in fibers.items():
        f = construct_constant_scalar(g).spacetime.f.values
        m[name] = float((np.max(f) - np.min(f)) / np.mean(f))
    return CriterionResult(4, "constant tau_F forces constant f", max(m.values()) <= 1e-6, m)


def criterion_5():
    ads = catalog.build(catalog.AntiDeSitter(3), 512)
    rel = einstein.check_einstein_relations(ads)
    sch = catalog.build(catalog.SchwarzschildExterior(1.0, 2.5, 20.0), 512)
    vac = einstein.check_einstein_relations(sch)
    _, sch_res = einstein.einstein_residual(sch)
    m = {f"ads_{k}": v for k, v in rel.residuals.items()}
    m.update({f"schwarzschild_{k}": v for k, v in vac.residuals.items()})
    m["schwarzschild_ricci"] = sch_res
    ok = rel.verdict is einstein.Verdict.PASS and vac.verdict is einstein.Verdict.PASS and sch_res <= 1e-4
    return CriterionResult(5, "Einstein relations on anti-de Sitter and Schwarzschild", bool(ok), m)


def criterion_6():
    line = AnalyticGeometry.euclidean_interval(-1.0, 1.0, n=1024)
    m = {}
    for sign in (1, -1):
        psi = ScalarField(line, np.exp(sign * line.nodes))
        m[f"exp_{'+' if sign > 0 else '-'}t"] = einstein.check_warped_structure(psi, -12.0, 3).residuals["ode"]
    return CriterionResult(6, "warped-structure ODE for psi = exp(+-t)", max(m.values()) <= 1e-6, m)


def random_admissible_2d(rng, count=200):
    """``count`` admissible ``(tau, c1, c2, domain)`` quadruples; rejection
    sampling against the positivity check, a quarter of them flat."""
    out = []
    while len(out) < count:
        tau = 0.0 if rng.random() < 0.25 else float(rng.uniform(-6, 6))
        c1, c2 = (float(v) for v in rng.uniform(-1, 1, size=2))
        lo = float(rng.uniform(-2, 1))
        domain = (lo, lo + float(rng.uniform(0.2, 2)))
        try:
            out.append(ode2d.solve_constant_tau(tau, c1, c2, domain))
        except DomainError:
            continue
    return out


def criterion_7(seed=0):
    rng = np.random.default_rng(seed)
    worst_tau = worst_lambda = 0.0
    flat_ok = True
    for fam in random_admissible_2d(rng):
        x = fam.sample_points(256)
        tau = ode2d.scalar_curvature_2d(fam, x)
        lam = ode2d.einstein_lambda_2d(fam, x)
        worst_tau = max(worst_tau, float(np.max(np.abs(tau - fam.tau))))
        worst_lambda = max(worst_lambda, float(np.max(np.abs(lam.values - tau / 2))))
        flat_ok &= lam.ricci_flat == (fam.branch is ode2d.Branch.LINEAR)
    ok = worst_tau <= 1e-10 and worst_lambda <= 1e-12 and flat_ok
    return CriterionResult(7, "2D round trip", bool(ok),
                           {"max_tau_error": worst_tau, "max_lambda_error": worst_lambda, "ricci_flat_iff_linear": bool(flat_ok)})


def criterion_8(seed=0):
    t0 = time.perf_counter()
    results = catalog.random_battery(seed, 50)
    verdicts = [r.verdict for _, reports in results for r in reports]
    fails = sum(v is einstein.Verdict.FAIL for v in verdicts)
    elapsed = time.perf_counter() - t0
    return CriterionResult(8, "no counterexamples among 50 random compact fibers", fails == 0,
                           {"fails": fails, "reports": len(verdicts),
                            "passes": sum(v is einstein.Verdict.PASS for v in verdicts), "seconds": elapsed})


def criterion_9():
    reports = catalog.verify_entry(catalog.EinsteinStaticUniverse(3), 256)
    expected = next(r for r in reports if r.name == "einstein_residual_expected_failure")
    _, res = einstein.einstein_residual(catalog.build(catalog.EinsteinStaticUniverse(3), 256))
    ok = res > 0.1 and expected.verdict is einstein.Verdict.PASS
    return CriterionResult(9, "Einstein static universe is not Einstein (expected)", bool(ok),
                           {"einstein_residual": res, "recorded": expected.verdict.value})


CRITERIA = (criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7,
            criterion_8, criterion_9)


def run_suite(seed=0, echo=None):
    results = []
    for fn in CRITERIA:
        r = fn(seed) if fn in (criterion_7, criterion_8) else fn()
        if echo:
            echo(r.line())
        results.append(r)
    return results
