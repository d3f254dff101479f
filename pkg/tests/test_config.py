import json
import math

import pytest

from staticspace.config import build_geometry, build_spacetime, load_config, parse_config
from staticspace.errors import ConfigError


def write(tmp_path, doc, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return p


def test_minimal_geometry_file(tmp_path):
    cfg = load_config(write(tmp_path, {"geometry": {"kind": "round_sphere", "s": 2}}))
    g = build_geometry(cfg.document["geometry"])
    assert g.kind == "round_sphere" and g.n == 512
    assert cfg.tolerances.hypothesis == 1e-6 and cfg.tolerances.conclusion == 1e-4


def test_schwarzschild_horizon_constraint(tmp_path):
    doc = {"geometry": {"kind": "schwarzschild_slice", "m": 1.0, "r_lo": 2.0, "r_hi": 20.0}}
    with pytest.raises(ConfigError, match="r_lo > 2m") as exc:
        load_config(write(tmp_path, doc))
    assert exc.value.path == ("geometry", "r_lo")


def test_unknown_key_suggests_warping(tmp_path):
    doc = {"geometry": {"kind": "hyperbolic_space", "s": 3}, "warpfunc": "cosh"}
    with pytest.raises(ConfigError, match="did you mean 'warping'"):
        load_config(write(tmp_path, doc))


def test_unknown_nested_key_names_path():
    with pytest.raises(ConfigError) as exc:
        parse_config({"geometry": {"kind": "round_sphere", "s": 2, "radios": 1.0}})
    assert str(exc.value).startswith("geometry:") and "radius" in str(exc.value)


def test_type_error_names_path():
    with pytest.raises(ConfigError) as exc:
        parse_config({"geometry": {"kind": "round_sphere", "s": "two"}})
    assert str(exc.value).startswith("geometry/s:")


def test_unreadable_and_malformed_files(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError, match="not valid JSON"):
        load_config(bad)


def test_tolerance_overrides_recorded():
    cfg = parse_config({"catalog": {"entry": "Minkowski"}, "tolerances": {"conclusion": 1e-6, "eigen": 1e-9}})
    prov = cfg.provenance()
    assert prov["tolerances"]["conclusion"] == 1e-6 and prov["tolerances"]["eigen"] == 1e-9
    assert prov["tolerances"]["hypothesis"] == 1e-6


def test_catalog_spacetime():
    st = build_spacetime(parse_config({"catalog": {"entry": "AntiDeSitter", "params": {"s": 3}}, "grid": 128}))
    assert st.fiber.kind == "hyperbolic_space" and st.fiber.n == 128


def test_bad_catalog_params():
    with pytest.raises(ConfigError):
        build_spacetime(parse_config({"catalog": {"entry": "AntiDeSitter", "params": {"dimension": 3}}}))


def test_geometry_with_named_warping():
    doc = {"geometry": {"kind": "schwarzschild_slice", "m": 1, "r_lo": 3, "r_hi": 10, "n": 64}, "warping": "schwarzschild"}
    st = build_spacetime(parse_config(doc))
    assert st.fiber.n == 64


def test_sampled_profile_and_warping():
    n = 101
    r = [math.pi * i / (n - 1) for i in range(n)]
    doc = {
        "geometry": {"kind": "revolution", "s": 2, "r_min": 0, "r_max": math.pi, "n": 64,
                     "psi": [math.sin(x) for x in r]},
        "warping": [1.0] * 64,
    }
    st = build_spacetime(parse_config(doc))
    assert st.fiber.kind == "revolution"


def test_eigen_warping_builds_constant_scalar_spacetime():
    from staticspace.curvature import spacetime_scalar_curvature

    doc = {"geometry": {"kind": "conformal_torus", "nx": 32, "ny": 32, "u": "cosx:0.2"}, "warping": "eigen"}
    tau = spacetime_scalar_curvature(build_spacetime(parse_config(doc))).values
    assert tau.max() - tau.min() <= 1e-4


def test_warping_shape_mismatch():
    doc = {"geometry": {"kind": "round_sphere", "s": 2, "n": 64}, "warping": [1.0] * 10}
    with pytest.raises(ConfigError, match="warping"):
        build_spacetime(parse_config(doc))


def test_geometry_invariant_violation_is_config_error():
    doc = {"geometry": {"kind": "revolution", "s": 2, "r_min": 0, "r_max": 3.0, "psi": "sin"}}
    with pytest.raises(ConfigError, match="TwoCaps"):
        build_spacetime(parse_config(doc))
