"""Numerical checks of the Einstein, scalar-bound and rigidity statements for
standard static space-times.

Each check returns a :class:`CheckReport`.  Hypotheses are evaluated on the
sampled grid; a hypothesis that a finite chart cannot certify (growth at
infinity on a truncated chart, say) is marked ``chart_only`` and turns an
otherwise passing verdict into ``CheckedOnChartOnly``.

Residuals are dimensionless: curvature differences are divided by
``max(1, |curvature scale|)`` and tensor differences by the largest metric
component at the node.
"""

import enum
from dataclasses import asdict, dataclass, field

import numpy as np

from . import discreteops
from .curvature import (
    fiber_ricci_components,
    fiber_scalar_curvature,
    min_ricci_eigenvalue,
    spacetime_metric_components,
    spacetime_ricci,
    spacetime_scalar_curvature,
)
from .fiber import AnalyticGeometry, ScalarField, infimum, integrate, volume_weights


@dataclass(frozen=True)
class Tolerances:
    hypothesis: float = 1e-6
    conclusion: float = 1e-4


DEFAULT_TOLERANCES = Tolerances()


class Verdict(str, enum.Enum):
    PASS = "Pass"
    FAIL = "Fail"
    HYPOTHESES_NOT_MET = "HypothesesNotMet"
    CHECKED_ON_CHART_ONLY = "CheckedOnChartOnly"


@dataclass(frozen=True)
class Hypothesis:
    description: str
    satisfied: bool
    witness: float
    chart_only: bool = False


@dataclass(frozen=True)
class CheckReport:
    name: str
    hypotheses: tuple
    residuals: dict
    tolerance: float
    verdict: Verdict
    notes: tuple = field(default_factory=tuple)

    @property
    def failed(self):
        return self.verdict is Verdict.FAIL

    def to_dict(self):
        d = asdict(self)
        d["verdict"] = self.verdict.value
        d["hypotheses"] = [asdict(h) for h in self.hypotheses]
        return d


def decide(hypotheses, residuals, tolerance):
    if not all(h.satisfied for h in hypotheses):
        return Verdict.HYPOTHESES_NOT_MET
    if any(not r <= tolerance for r in residuals.values()):
        return Verdict.FAIL
    if any(h.chart_only for h in hypotheses):
        return Verdict.CHECKED_ON_CHART_ONLY
    return Verdict.PASS


def make_report(name, hypotheses, residuals, tolerance, notes=()):
    hypotheses = tuple(hypotheses)
    residuals = {k: float(v) for k, v in residuals.items()}
    return CheckReport(name, hypotheses, residuals, float(tolerance), decide(hypotheses, residuals, tolerance), tuple(notes))


def _chart_notes(st):
    g = st.fiber
    if g.compact:
        return ()
    coords = ", ".join(f"{k} in [{v.min():.6g}, {v.max():.6g}]" for k, v in g.coordinates().items())
    return (f"on sampled chart: {coords}",)


def _per_node_scale(comps):
    return np.max([np.abs(v) for v in comps.values()], axis=0)


def _mean_tau(st):
    return float(np.mean(spacetime_scalar_curvature(st).values))


def _tau_constancy(st):
    tau = spacetime_scalar_curvature(st).values
    return float(np.max(tau) - np.min(tau)) / max(1.0, float(np.max(np.abs(tau))))


# --------------------------------------------------------------------------


def einstein_residual(st):
    """``(lambda, residual)`` with ``lambda = mean(tau)/n`` and ``residual``
    the largest ``|Ric - lambda g|`` over nodes and components, each node
    normalised by its largest metric component."""
    lam = _mean_tau(st) / st.n
    ric = spacetime_ricci(st)
    g = spacetime_metric_components(st)
    comps = {"tt": ric.ric_tt.values, **{k: v.values for k, v in ric.fiber_block.items()}}
    diff = np.max([np.abs(comps[k] - lam * g[k]) for k in comps], axis=0)
    return lam, float(np.max(diff / _per_node_scale(g)))


def _einstein_hypothesis(st, tol):
    lam, res = einstein_residual(st)
    return lam, Hypothesis("space-time is Einstein (max |Ric - lambda g|/|g|)", res <= tol.conclusion, res)


def _fiber_block_residual(st, coefficient):
    """``max |Ric_F - H/f - coefficient g_F| / |g_F|`` over nodes."""
    g = st.fiber
    f = st.f.values
    ric = fiber_ricci_components(g)
    hess = discreteops.hessian_components(g, st.f)
    gc = g.metric_components()
    diff = np.max([np.abs(ric[k] - hess[k] / f - coefficient * gc[k]) for k in gc], axis=0)
    return float(np.max(diff / _per_node_scale(gc)))


def check_einstein_relations(st, tol=DEFAULT_TOLERANCES):
    """For Einstein ``st``: ``Delta f = -(tau/n) f``,
    ``Ric_F = H^f/f + (tau/n) g_F`` and ``(s+1) tau_F = (s-1) tau``."""
    lam, hyp = _einstein_hypothesis(st, tol)
    s, tau = st.s, lam * st.n
    f = st.f.values
    lap = discreteops.laplacian(st.fiber, st.f).values
    tau_F = fiber_scalar_curvature(st.fiber).values
    scale = max(1.0, abs(lam))
    trace_scale = max(1.0, (s + 1) * float(np.max(np.abs(tau_F))), (s - 1) * abs(tau))
    residuals = {
        "laplacian_relation": np.max(np.abs(lap / f + lam)) / scale,
        "fiber_ricci_relation": _fiber_block_residual(st, lam),
        "trace_relation": np.max(np.abs((s + 1) * tau_F - (s - 1) * tau)) / trace_scale,
    }
    return make_report("einstein_relations", [hyp], residuals, tol.conclusion, _chart_notes(st))


def check_hessian_remark(st, tol=DEFAULT_TOLERANCES):
    """For Einstein ``st`` over an Einstein fiber:
    ``H^f = (tau_F/s - tau/n) f g_F``."""
    g = st.fiber
    s = st.s
    tau_F = fiber_scalar_curvature(g).values
    ric = fiber_ricci_components(g)
    gc = g.metric_components()
    fiber_einstein = float(
        np.max(np.max([np.abs(ric[k] - tau_F / s * gc[k]) for k in gc], axis=0) / _per_node_scale(gc))
    )
    lam, st_hyp = _einstein_hypothesis(st, tol)
    hyps = [
        Hypothesis("fiber is Einstein (max |Ric_F - (tau_F/s) g_F|/|g_F|)", fiber_einstein <= tol.hypothesis, fiber_einstein),
        st_hyp,
    ]
    f = st.f.values
    hess = discreteops.hessian_components(g, st.f)
    coeff = tau_F / s - lam
    diff = np.max([np.abs(hess[k] / f - coeff * gc[k]) for k in gc], axis=0)
    residuals = {"hessian_relation": float(np.max(diff / _per_node_scale(gc))) / max(1.0, float(np.max(np.abs(coeff))))}
    return make_report("hessian_remark", hyps, residuals, tol.conclusion, _chart_notes(st))


def check_constant_scalar_integral(st, tol=DEFAULT_TOLERANCES):
    """On a compact fiber with constant ``tau``: ``int_F (tau_F - tau) f = 0``."""
    g = st.fiber
    spread = _tau_constancy(st)
    hyps = [
        Hypothesis("fiber is compact", bool(g.compact), float(g.compact)),
        Hypothesis("space-time scalar curvature is constant", spread <= tol.conclusion, spread),
    ]
    tau_bar = _mean_tau(st)
    tau_F = fiber_scalar_curvature(g)
    vol = float(np.sum(volume_weights(g).values))
    mean_f = integrate(g, st.f) / vol
    integrand = ScalarField(g, (tau_F.values - tau_bar) * st.f.values)
    residual = abs(integrate(g, integrand)) / (vol * mean_f * max(1.0, abs(tau_bar)))
    return make_report("constant_scalar_integral", hyps, {"integral": residual}, tol.conclusion, _chart_notes(st))


def _closed_form_curvature(g):
    """Analytic kinds carry closed-form, constant-sign curvature, so their
    fiber hypotheses hold beyond the sampled chart."""
    return isinstance(g, AnalyticGeometry)


def _common_fiber_hypotheses(st, tol):
    """Completeness, nonnegative Ricci and the ``Delta tau_F`` sign."""
    g = st.fiber
    tau_F = fiber_scalar_curvature(g)
    complete = bool(g.complete)
    chart_only = not (g.compact or _closed_form_curvature(g))
    min_ric = float(np.min(min_ricci_eigenvalue(g)))
    lap_tau_F = float(np.max(discreteops.laplacian(g, tau_F).values))
    hyps = {
        "complete": Hypothesis("fiber is complete without boundary (geometry flag)", complete, float(complete)),
        "ricci": Hypothesis("Ric_F >= 0 (min eigenvalue on grid)", min_ric >= -tol.hypothesis, min_ric,
                            chart_only=chart_only),
        "laplacian": Hypothesis("Delta_F tau_F <= 0 (max on grid)", lap_tau_F <= tol.hypothesis, lap_tau_F,
                                chart_only=chart_only),
    }
    grad = float(np.max(discreteops.gradient_norm(g, tau_F).values))
    hyps["growth"] = Hypothesis("|grad tau_F| = o(r) (max |grad tau_F| on grid)", True, grad,
                                chart_only=chart_only)
    return hyps, tau_F


def check_scalar_bound_noncompact(st, tol=DEFAULT_TOLERANCES):
    """Constant ``tau`` over a complete fiber with ``Ric_F >= 0``,
    ``Delta tau_F <= 0`` and sub-linear ``|grad tau_F|``: ``tau <= inf tau_F``."""
    hyps, tau_F = _common_fiber_hypotheses(st, tol)
    spread = _tau_constancy(st)
    hyp_list = [
        Hypothesis("space-time scalar curvature is constant", spread <= tol.conclusion, spread),
        hyps["complete"], hyps["ricci"], hyps["laplacian"], hyps["growth"],
    ]
    tau_bar = _mean_tau(st)
    excess = max(0.0, tau_bar - infimum(tau_F)) / max(1.0, abs(tau_bar))
    return make_report("scalar_bound_noncompact", hyp_list, {"bound_excess": excess}, tol.conclusion, _chart_notes(st))


def check_einstein_bounds(st, tol=DEFAULT_TOLERANCES):
    """Einstein ``st`` over a complete fiber with ``Ric_F >= 0``: the
    space-time is Ricci-flat (``tau = tau_F = 0``) and ``f`` is constant;
    if also ``Delta tau_F <= 0``, ``tau <= (s+1)/s inf tau_F``."""
    hyps, tau_F = _common_fiber_hypotheses(st, tol)
    lam, st_hyp = _einstein_hypothesis(st, tol)
    tau = lam * st.n
    f = st.f.values
    residuals = {
        "tau": abs(tau),
        "tau_F": float(np.max(np.abs(tau_F.values))),
        "f_constancy": float((np.max(f) - np.min(f)) / np.mean(f)),
    }
    hyp_list = [st_hyp, hyps["complete"], hyps["ricci"]]
    notes = list(_chart_notes(st))
    if hyps["laplacian"].satisfied:
        s = st.s
        residuals["first_bound_excess"] = max(0.0, tau - (s + 1) / s * infimum(tau_F)) / max(1.0, abs(tau))
        hyp_list += [hyps["laplacian"], hyps["growth"]]
    else:
        notes.append("Delta tau_F <= 0 fails on the grid; first bound not asserted")
    return make_report("einstein_bounds", hyp_list, residuals, tol.conclusion, notes)


def check_warped_structure(psi, tau, s, tol=DEFAULT_TOLERANCES):
    """Residual of ``psi'' + tau/(s(s+1)) psi = 0`` for ``psi`` sampled on a
    uniform one-dimensional grid, relative to ``max |psi|``."""
    g = psi.geometry
    values = psi.values
    hyps = [
        Hypothesis("tau < 0", tau < 0, float(tau)),
        Hypothesis("psi > 0", bool(np.all(values > 0)), float(np.min(values))),
        Hypothesis("s >= 2", s >= 2, float(s)),
        Hypothesis("psi sampled on a uniform 1D grid", g.is_radial and g.s == 1 and g.radial_factor is None, 1.0),
    ]
    if not all(h.satisfied for h in hyps):
        return make_report("warped_structure", hyps, {}, tol.conclusion)
    d2 = discreteops.second_difference(values, g.h)
    residual = np.max(np.abs(d2 + tau / (s * (s + 1)) * values)) / np.max(np.abs(values))
    return make_report("warped_structure", hyps, {"ode": residual}, tol.conclusion)


CHECKS = {
    "einstein_relations": check_einstein_relations,
    "hessian_remark": check_hessian_remark,
    "constant_scalar_integral": check_constant_scalar_integral,
    "scalar_bound_noncompact": check_scalar_bound_noncompact,
    "einstein_bounds": check_einstein_bounds,
}


def verify(st, checks=None, tol=DEFAULT_TOLERANCES):
    """Run the named space-time checks (all by default)."""
    names = list(CHECKS) if checks is None else list(checks)
    unknown = [n for n in names if n not in CHECKS]
    if unknown:
        raise KeyError(f"unknown checks: {', '.join(unknown)}")
    return [CHECKS[n](st, tol) for n in names]
