"""JSON run configurations: schema validation and construction of
geometries and space-times from validated documents.

A geometry document is ``{"kind": ..., <parameters>}``; a space-time
document adds a ``warping`` or names a catalog entry::

    {"geometry": {"kind": "hyperbolic_space", "s": 3, "n": 512}, "warping": "cosh"}
    {"catalog": {"entry": "AntiDeSitter", "params": {"s": 3}}, "grid": 512}
"""

import difflib
import json
import math
from dataclasses import dataclass, field

import jsonschema
import numpy as np

from .catalog import ENTRIES, build, entry_by_name
from .curvature import StandardStaticSpacetime
from .einstein import Tolerances
from .errors import ConfigError, GeometryError
from .fiber import AnalyticGeometry, Closure, ConformalTorusGeometry, Profile, RevolutionGeometry, ScalarField
from .spectral import DEFAULT_CONSTANCY_TOL, DEFAULT_MAX_ITER, DEFAULT_TOL

DEFAULT_RADIAL_GRID = 512
DEFAULT_TORUS_GRID = 320

_NUM = {"type": "number"}
_POS = {"type": "number", "exclusiveMinimum": 0}
_GRID = {"type": "integer", "minimum": 8}
_PROFILE = {"oneOf": [{"type": "string"}, {"type": "array", "items": _NUM, "minItems": 4}]}

GEOMETRY_KINDS = {
    "revolution": {
        "required": ["s", "r_min", "r_max", "psi"],
        "properties": {"s": {"type": "integer", "minimum": 1}, "r_min": _NUM, "r_max": _NUM, "n": _GRID,
                       "psi": _PROFILE, "closure": {"enum": [c.value for c in Closure]}},
    },
    "conformal_torus": {
        "required": [],
        "properties": {"nx": _GRID, "ny": _GRID, "Lx": _POS, "Ly": _POS,
                       "u": {"oneOf": [{"type": "string"}, {"type": "array", "items": {"type": "array", "items": _NUM}}]}},
    },
    "round_sphere": {"required": ["s"], "properties": {"s": {"type": "integer", "minimum": 2}, "radius": _POS, "n": _GRID}},
    "hyperbolic_space": {"required": ["s"], "properties": {"s": {"type": "integer", "minimum": 2}, "scale": _POS,
                                                           "r_max": _POS, "n": _GRID}},
    "euclidean_interval": {"required": ["c", "d"], "properties": {"c": _NUM, "d": _NUM, "n": _GRID}},
    "schwarzschild_slice": {"required": ["m", "r_lo", "r_hi"], "properties": {"m": _POS, "r_lo": _POS, "r_hi": _POS,
                                                                             "n": _GRID}},
}


def _geometry_schema():
    branches = []
    for kind, spec in GEOMETRY_KINDS.items():
        props = {"kind": {"const": kind}, **spec["properties"]}
        branches.append({
            "if": {"properties": {"kind": {"const": kind}}},
            "then": {"properties": props, "required": spec["required"], "additionalProperties": False},
        })
    return {"type": "object", "required": ["kind"],
            "properties": {"kind": {"enum": list(GEOMETRY_KINDS)}}, "allOf": branches}


SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "geometry": _geometry_schema(),
        "warping": {"oneOf": [{"type": "string"}, {"type": "array"}]},
        "catalog": {
            "type": "object", "additionalProperties": False, "required": ["entry"],
            "properties": {"entry": {"enum": list(ENTRIES)}, "params": {"type": "object"}},
        },
        "grid": {"type": "integer", "minimum": 16},
        "interval": {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2},
        "tolerances": {
            "type": "object", "additionalProperties": False,
            "properties": {"hypothesis": _POS, "conclusion": _POS, "eigen": _POS, "constancy": _POS,
                           "max_iter": {"type": "integer", "minimum": 1}},
        },
        "checks": {"oneOf": [{"const": "all"}, {"type": "array", "items": {"type": "string"}}]},
        "seed": {"type": "integer", "minimum": 0},
        "format": {"enum": ["json", "csv"]},
        "output": {"type": "string"},
    },
}


@dataclass(frozen=True)
class RunConfig:
    document: dict
    tolerances: Tolerances = field(default_factory=Tolerances)
    eigen_tol: float = DEFAULT_TOL
    max_iter: int = DEFAULT_MAX_ITER
    constancy_tol: float = DEFAULT_CONSTANCY_TOL
    seed: int = 0
    format: str = "json"
    output: str | None = None

    def provenance(self):
        return {
            "tolerances": {"hypothesis": self.tolerances.hypothesis, "conclusion": self.tolerances.conclusion,
                           "eigen": self.eigen_tol, "constancy": self.constancy_tol, "max_iter": self.max_iter},
            "seed": self.seed,
        }


def _allowed_keys(schema, instance):
    keys = set(schema.get("properties", {}))
    for branch in schema.get("allOf", []):
        kind = branch["if"]["properties"]["kind"]["const"]
        if isinstance(instance, dict) and instance.get("kind") == kind:
            keys |= set(branch["then"]["properties"])
    return keys


def _describe(error):
    if error.validator == "additionalProperties":
        allowed = sorted(_allowed_keys(error.schema, error.instance))
        extra = sorted(set(error.instance) - set(allowed))
        parts = []
        for key in extra:
            close = difflib.get_close_matches(key, allowed, n=1, cutoff=0.5)
            hint = f" (did you mean {close[0]!r}?)" if close else ""
            parts.append(f"unknown key {key!r}{hint}")
        return "; ".join(parts) + f"; allowed keys: {', '.join(allowed)}"
    return error.message


def validate(document):
    """Raise :class:`ConfigError` naming the offending key path."""
    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(document), key=lambda e: (len(e.absolute_path), list(map(str, e.absolute_path))))
    if errors:
        err = errors[0]
        raise ConfigError(_describe(err), path=err.absolute_path)
    geo = document.get("geometry")
    if geo and geo["kind"] == "schwarzschild_slice" and not geo["r_lo"] > 2 * geo["m"]:
        raise ConfigError(f"constraint r_lo > 2m violated (r_lo={geo['r_lo']}, m={geo['m']})", path=("geometry", "r_lo"))
    if "geometry" in document and "catalog" in document:
        raise ConfigError("give either 'geometry' or 'catalog', not both", path=())
    return document


def parse_config(document):
    validate(document)
    tol = document.get("tolerances", {})
    return RunConfig(
        document=document,
        tolerances=Tolerances(tol.get("hypothesis", 1e-6), tol.get("conclusion", 1e-4)),
        eigen_tol=tol.get("eigen", DEFAULT_TOL),
        max_iter=tol.get("max_iter", DEFAULT_MAX_ITER),
        constancy_tol=tol.get("constancy", DEFAULT_CONSTANCY_TOL),
        seed=document.get("seed", 0),
        format=document.get("format", "json"),
        output=document.get("output"),
    )


def load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            document = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc.msg} (line {exc.lineno})") from exc
    return parse_config(document)


# --------------------------------------------------------------------------
# construction


def build_geometry(doc, grid=None):
    """Geometry from a validated ``geometry`` document; ``grid`` overrides
    the node count."""
    p = dict(doc)
    kind = p.pop("kind")
    try:
        if kind == "conformal_torus":
            n = grid or DEFAULT_TORUS_GRID
            u = p.get("u", "const")
            if not isinstance(u, str):
                u = np.asarray(u, dtype=float)
                n = u.shape[0]
            return ConformalTorusGeometry(p.get("nx", n), p.get("ny", n), p.get("Lx", 2 * math.pi),
                                          p.get("Ly", 2 * math.pi), u=u)
        n = grid or p.pop("n", DEFAULT_RADIAL_GRID)
        p.pop("n", None)
        if kind == "revolution":
            psi = p["psi"]
            closure = Closure(p.get("closure", Closure.TWO_CAPS.value))
            if isinstance(psi, str):
                profile = Profile.builtin(psi)
            else:
                values = np.asarray(psi, dtype=float)
                nodes = np.linspace(p["r_min"], p["r_max"], values.size)
                caps = closure is Closure.TWO_CAPS
                inner = slice(1, -1) if caps else slice(None)
                profile = Profile.from_samples(nodes[inner], values[inner],
                                               lower_pole=p["r_min"] if caps else None,
                                               upper_pole=p["r_max"] if caps else None)
            return RevolutionGeometry(p["s"], p["r_min"], p["r_max"], n, profile, closure)
        return getattr(AnalyticGeometry, kind)(**p, n=n)
    except GeometryError as exc:
        raise ConfigError(str(exc), path=("geometry", exc.key) if exc.key else ("geometry",)) from exc


def _warping_values(g, spec):
    if not isinstance(spec, str):
        values = np.asarray(spec, dtype=float)
        if values.shape != g.shape:
            raise ConfigError(f"warping samples have shape {values.shape}, geometry has {g.shape}", path=("warping",))
        return values
    name, _, arg = spec.partition(":")
    if name == "const":
        return np.full(g.shape, float(arg) if arg else 1.0)
    if not g.is_radial:
        raise ConfigError(f"warping {spec!r} needs a radial chart", path=("warping",))
    if name == "cosh":
        return np.cosh(g.nodes)
    if name == "schwarzschild":
        if g.kind != "schwarzschild_slice":
            raise ConfigError("warping 'schwarzschild' needs a schwarzschild_slice geometry", path=("warping",))
        return np.sqrt(1.0 - 2.0 * dict(g.params)["m"] / g.areal_radius)
    raise ConfigError(f"unknown warping {spec!r}; use const[:c], cosh, schwarzschild, eigen or samples",
                      path=("warping",))


def build_spacetime(cfg, grid=None):
    """Space-time described by ``cfg`` (catalog entry or geometry + warping).

    ``warping: "eigen"`` builds the constant-scalar-curvature warping from the
    principal eigenfunction.
    """
    doc = cfg.document
    grid = grid or doc.get("grid")
    if "catalog" in doc:
        try:
            entry = entry_by_name(doc["catalog"]["entry"], **doc["catalog"].get("params", {}))
            return build(entry, grid or DEFAULT_RADIAL_GRID)
        except (TypeError, GeometryError) as exc:
            raise ConfigError(str(exc), path=("catalog",)) from exc
    if "geometry" not in doc:
        raise ConfigError("a space-time needs 'geometry' or 'catalog'")
    g = build_geometry(doc["geometry"], grid)
    spec = doc.get("warping", "const")
    interval = doc.get("interval", [-math.inf, math.inf])
    if spec == "eigen":
        from .spectral import construct_constant_scalar

        st, _ = construct_constant_scalar(g, tol=cfg.eigen_tol, max_iter=cfg.max_iter, constancy_tol=cfg.constancy_tol)
        f = st.f
    else:
        f = ScalarField(g, _warping_values(g, spec))
    try:
        return StandardStaticSpacetime(g, f, *interval)
    except GeometryError as exc:
        raise ConfigError(str(exc), path=("warping",)) from exc
