"""``staticspace`` command line.

Exit codes: 0 success, 1 a verification Fail, 2 invalid input or config,
3 solver non-convergence or a non-finite number in a report.  Output goes to
``--out`` if given, otherwise into ``$STATICSPACE_OUTPUT_DIR`` if set,
otherwise to standard output.
"""

import argparse
import csv
import io
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__, catalog, einstein, ode2d
from .config import build_geometry, build_spacetime, load_config
from .curvature import fiber_scalar_curvature, ricci_trace, spacetime_scalar_curvature
from .discreteops import assemble_L
from .errors import ConfigError, ConvergenceError, DomainError, GeometryError, PositivityError, PreconditionError
from .spectral import construct_constant_scalar

OUTPUT_DIR_ENV = "STATICSPACE_OUTPUT_DIR"

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_SOLVER = 0, 1, 2, 3


class NonFiniteError(ValueError):
    pass


class UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


# --------------------------------------------------------------------------
# emission


def _finite(obj, where="report"):
    if isinstance(obj, dict):
        for k, v in obj.items():
            _finite(v, f"{where}/{k}")
    elif isinstance(obj, (list, tuple)):
        for i, v in enumerate(obj):
            _finite(v, f"{where}/{i}")
    elif isinstance(obj, float) and not math.isfinite(obj):
        raise NonFiniteError(f"non-finite value at {where}")
    return obj


def to_json(obj):
    return json.dumps(_finite(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def fields_csv(columns):
    """CSV text from an ordered mapping of equal-length columns."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in zip(*(np.ravel(v) for v in columns.values())):
        _finite(list(map(float, row)), "csv")
        # + 0.0 folds negative zero
        w.writerow([repr(float(x) + 0.0) for x in row])
    return buf.getvalue()


def _destination(args, default_name):
    if getattr(args, "out", None):
        return Path(args.out)
    env = os.environ.get(OUTPUT_DIR_ENV)
    if env:
        return Path(env) / default_name
    return None


def _emit(text, path, stdout):
    if path is None:
        stdout.write(text)
        return
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def _reports_csv(reports):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["check", "verdict", "residual", "value", "tolerance"])
    for r in reports:
        items = sorted(r.residuals.items()) or [("", float("nan"))]
        for name, value in items:
            w.writerow([r.name, r.verdict.value, name, "" if name == "" else repr(_finite(value)), repr(r.tolerance)])
    return buf.getvalue()


def _coordinate_columns(g):
    if g.is_radial:
        return dict(g.coordinates())
    X, Y = g.grid
    return {"x": X, "y": Y}


# --------------------------------------------------------------------------
# subcommands


def cmd_curvature(args, stdout):
    cfg = load_config(args.spacetime)
    st = build_spacetime(cfg, args.grid)
    g = st.fiber
    tau = spacetime_scalar_curvature(st).values
    tau_F = fiber_scalar_curvature(g).values
    if args.format == "csv":
        cols = _coordinate_columns(g)
        cols.update({"f": st.f.values, "tau_F": tau_F, "tau": tau})
        _emit(fields_csv(cols), _destination(args, "curvature.csv"), stdout)
    else:
        report = {
            "geometry": g.kind,
            "nodes": int(np.size(tau)),
            "s": g.s,
            "tau": {"min": float(tau.min()), "max": float(tau.max()), "mean": float(tau.mean())},
            "tau_F": {"min": float(tau_F.min()), "max": float(tau_F.max()), "mean": float(tau_F.mean())},
            "trace_identity": float(np.max(np.abs(ricci_trace(st).values - tau))),
            **cfg.provenance(),
        }
        _emit(to_json(report), _destination(args, "curvature.json"), stdout)
    return EXIT_OK


def cmd_eigen(args, stdout):
    cfg = load_config(args.geometry)
    if "geometry" not in cfg.document:
        raise ConfigError("eigen needs a 'geometry' document", path=("geometry",))
    g = build_geometry(cfg.document["geometry"], args.grid or cfg.document.get("grid"))
    tol = args.tol if args.tol is not None else cfg.eigen_tol
    max_iter = args.max_iter if args.max_iter is not None else cfg.max_iter
    if args.export_coo:
        coo = Path(args.export_coo)
        coo.parent.mkdir(parents=True, exist_ok=True)
        coo.write_text(assemble_L(g).to_coo_text(), encoding="utf-8")
    c = construct_constant_scalar(g, tol=tol, max_iter=max_iter, constancy_tol=cfg.constancy_tol)
    e = c.eigen
    report = {
        "lambda1": e.lambda1,
        "tau": c.tau,
        "residual": e.residual,
        "iterations": e.iterations,
        "gap": e.gap,
        "gap_marginal": bool(e.gap_marginal),
        "method": e.method,
        "constancy_residual": c.constancy,
        "pointwise_constancy": c.pointwise_constancy,
        "geometry": g.kind,
        "nodes": int(np.size(e.eigenfunction.values)),
        **cfg.provenance(),
    }
    report["tolerances"]["eigen"] = tol
    report["tolerances"]["max_iter"] = max_iter
    dest = _destination(args, "eigen.json")
    _emit(to_json(report), dest, stdout)
    if dest is not None:
        cols = _coordinate_columns(g)
        cols["f"] = e.eigenfunction.values
        _emit(fields_csv(cols), dest.with_suffix(".f.csv"), stdout)
    return EXIT_OK


def _emit_reports(args, reports, stdout, extra=None):
    if args.format == "csv":
        _emit(_reports_csv(reports), _destination(args, f"{args.command}.csv"), stdout)
    else:
        doc = {"reports": [r.to_dict() for r in reports], **(extra or {})}
        _emit(to_json(doc), _destination(args, f"{args.command}.json"), stdout)
    return EXIT_FAIL if any(r.failed for r in reports) else EXIT_OK


def cmd_verify(args, stdout):
    cfg = load_config(args.spacetime)
    st = build_spacetime(cfg)
    checks = args.checks or cfg.document.get("checks", "all")
    names = None if checks == "all" else [c.strip() for c in (checks.split(",") if isinstance(checks, str) else checks)]
    unknown = [n for n in names or [] if n not in einstein.CHECKS]
    if unknown:
        raise ConfigError(f"unknown checks {unknown}; choose from {', '.join(einstein.CHECKS)} or 'all'", path=("checks",))
    reports = einstein.verify(st, names, tol=cfg.tolerances)
    return _emit_reports(args, reports, stdout, cfg.provenance())


def cmd_catalog(args, stdout):
    entry = catalog.entry_by_name(args.entry)
    reports = catalog.verify_entry(entry, args.grid)
    extra = {"entry": entry.describe(), "grid": args.grid}
    return _emit_reports(args, reports, stdout, extra)


def _domain(text):
    try:
        lo, hi = (float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"domain must be 'a,b', got {text!r}") from None
    return lo, hi


def cmd_ode2d(args, stdout):
    fam = ode2d.solve_constant_tau(args.tau, args.c1, args.c2, args.domain)
    x = fam.sample_points(args.samples)
    f = fam(x)
    tau = ode2d.scalar_curvature_2d(fam, x)
    lam = ode2d.einstein_lambda_2d(fam, x)
    text = f"# branch={fam.branch.value}; {ode2d.RATE_CONVENTION}\n"
    text += fields_csv({"x": x, "f": f, "tau": tau, "lambda": lam.values})
    _emit(text, _destination(args, "ode2d.csv"), stdout)
    return EXIT_OK


def cmd_suite(args, stdout):
    from .suite import run_suite

    results = run_suite(args.seed, echo=lambda line: stdout.write(line + "\n"))
    doc = {"criteria": [{"number": r.number, "title": r.title, "passed": r.passed, "measurements": r.measurements}
                        for r in results], "seed": args.seed}
    dest = _destination(args, "suite.json")
    if dest is not None:
        _emit(to_json(doc), dest, stdout)
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


# --------------------------------------------------------------------------


def build_parser():
    p = _Parser(prog="staticspace", description="Curvature and theorem checks for standard static space-times.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("curvature", help="scalar curvature fields of a space-time")
    c.add_argument("--spacetime", required=True, help="JSON space-time config")
    c.add_argument("--grid", type=int)
    c.add_argument("--format", choices=["json", "csv"], default="json")
    c.add_argument("--out")
    c.set_defaults(func=cmd_curvature)

    e = sub.add_parser("eigen", help="principal eigenpair and constant-tau construction")
    e.add_argument("--geometry", required=True, help="JSON geometry config")
    e.add_argument("--tol", type=float)
    e.add_argument("--max-iter", type=int)
    e.add_argument("--grid", type=int)
    e.add_argument("--out", help="JSON report path; f is written next to it as CSV")
    e.add_argument("--export-coo", metavar="PATH", help="write L as 'row col value' lines")
    e.set_defaults(func=cmd_eigen)

    v = sub.add_parser("verify", help="run theorem checks on a space-time")
    v.add_argument("--spacetime", required=True)
    v.add_argument("--checks", help="comma-separated check names or 'all'")
    v.add_argument("--format", choices=["json", "csv"], default="json")
    v.add_argument("--out")
    v.set_defaults(func=cmd_verify)

    k = sub.add_parser("catalog", help="verification bundle of a catalog entry")
    k.add_argument("--entry", required=True, choices=sorted(catalog.ENTRIES))
    k.add_argument("--grid", type=int, default=512)
    k.add_argument("--format", choices=["json", "csv"], default="json")
    k.add_argument("--out")
    k.set_defaults(func=cmd_catalog)

    o = sub.add_parser("ode2d", help="constant-tau warping functions in two dimensions")
    o.add_argument("--tau", type=float, required=True)
    o.add_argument("--c1", type=float, required=True)
    o.add_argument("--c2", type=float, required=True)
    o.add_argument("--domain", type=_domain, required=True, help="a,b; write --domain=-1,2 when a is negative (inf/-inf allowed)")
    o.add_argument("--samples", type=int, default=ode2d.POSITIVITY_SAMPLES)
    o.add_argument("--out")
    o.set_defaults(func=cmd_ode2d)

    s = sub.add_parser("suite", help="run the acceptance battery")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out")
    s.set_defaults(func=cmd_suite)
    return p


def run(argv=None, stdout=None, stderr=None):
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        return args.func(args, stdout)
    except (ConfigError, GeometryError, DomainError, PreconditionError, UsageError, OSError) as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_INPUT
    except (ConvergenceError, PositivityError, NonFiniteError) as exc:
        stderr.write(f"solver error: {exc}\n")
        return EXIT_SOLVER


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
