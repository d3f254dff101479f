import math

import numpy as np
import pytest

import oracles
from staticspace import errors
from staticspace.curvature import (
    StandardStaticSpacetime,
    fiber_ricci_components,
    fiber_ricci_radial,
    fiber_scalar_curvature,
    min_ricci_eigenvalue,
    pointwise_scalar_curvature,
    ricci_trace,
    spacetime_metric_components,
    spacetime_ricci,
    spacetime_scalar_curvature,
)
from staticspace.fiber import AnalyticGeometry, Closure, ConformalTorusGeometry, Profile, RevolutionGeometry, ScalarField


def ads(n=512):
    g = AnalyticGeometry.hyperbolic_space(3, n=n)
    return StandardStaticSpacetime(g, ScalarField(g, np.cosh(g.nodes)))


def schwarzschild(n=512, m=1.0):
    g = AnalyticGeometry.schwarzschild_slice(m, 2.5, 20.0, n=n)
    return StandardStaticSpacetime(g, ScalarField(g, np.sqrt(1 - 2 * m / g.areal_radius)))


def esu(n=256):
    g = AnalyticGeometry.round_sphere(3, n=n)
    return StandardStaticSpacetime(g, ScalarField.constant(g, 1.0))


def minkowski():
    g = AnalyticGeometry.euclidean_interval(0.0, 1.0, 128)
    return StandardStaticSpacetime(g, ScalarField.constant(g, 1.0))


def perturbed(s, n=256, eps=0.2):
    return RevolutionGeometry(s, 0.0, math.pi, n, Profile.builtin(f"perturbed_sin:{eps}"), Closure.TWO_CAPS)


# --------------------------------------------------------------------------
# fiber


@pytest.mark.parametrize("s, value", [(2, 2.0), (3, 6.0), (4, 12.0)])
def test_round_sphere_scalar_curvature(s, value):
    g = AnalyticGeometry.round_sphere(s, n=64)
    np.testing.assert_allclose(fiber_scalar_curvature(g).values, value, atol=1e-6)


def test_hyperbolic_scalar_curvature():
    g = AnalyticGeometry.hyperbolic_space(3, n=64)
    np.testing.assert_allclose(fiber_scalar_curvature(g).values, -6.0, atol=1e-6)


def test_revolution_formula_on_sin_profile_matches_sphere():
    g = RevolutionGeometry(3, 0.0, math.pi, 64, Profile.builtin("sin"), Closure.TWO_CAPS)
    np.testing.assert_allclose(fiber_scalar_curvature(g).values, 6.0, atol=1e-9)


@pytest.mark.parametrize("s", [2, 3])
def test_revolution_curvature_against_christoffel_oracle(s):
    eps = 0.2
    g = perturbed(s, n=64, eps=eps)
    psi = lambda r: np.sin(r) * (1 + eps * np.sin(r) ** 2)
    metric = oracles.revolution_metric(psi, s)
    tau = fiber_scalar_curvature(g).values
    for i in (3, 20, 40, 60):
        x = [g.nodes[i]] + [1.1] * (s - 1)
        assert tau[i] == pytest.approx(oracles.scalar(metric, x), abs=1e-6)


def test_torus_curvature_against_christoffel_oracle():
    g = ConformalTorusGeometry(64, 64, u="sinsin:0.2")
    tau = fiber_scalar_curvature(g).values
    X, Y = g.grid
    metric = oracles.conformal_plane(lambda x, y: 0.2 * np.sin(x) * np.sin(y))
    for i, j in ((0, 0), (5, 17), (33, 40), (60, 2)):
        assert tau[i, j] == pytest.approx(oracles.scalar(metric, [X[i, j], Y[i, j]]), abs=1e-6)


def test_schwarzschild_slice_is_scalar_flat_via_generic_formula():
    a = AnalyticGeometry.schwarzschild_slice(1.0, 2.5, 20.0, n=256)
    generic = RevolutionGeometry(3, a.r_min, a.r_max, a.n, a.psi, Closure.BOUNDARY, radial_factor=a.radial_factor)
    assert np.max(np.abs(fiber_scalar_curvature(generic).values)) <= 1e-5
    assert np.max(np.abs(fiber_scalar_curvature(a).values)) <= 1e-5


def test_sphere_and_hyperbolic_ricci():
    g = AnalyticGeometry.round_sphere(2, n=64)
    rr, sph = fiber_ricci_radial(g)
    np.testing.assert_allclose(rr.values, 1.0)
    np.testing.assert_allclose(sph.values, np.sin(g.nodes) ** 2, atol=1e-14)
    h = AnalyticGeometry.hyperbolic_space(3, n=64)
    ric = fiber_ricci_components(h)
    for k, v in h.metric_components().items():
        np.testing.assert_allclose(ric[k], -2.0 * v, atol=1e-12)


def test_schwarzschild_fiber_ricci_against_oracle():
    g = AnalyticGeometry.schwarzschild_slice(1.0, 2.5, 20.0, n=256)
    ric = fiber_ricci_components(g)
    gc = g.metric_components()
    metric = oracles.schwarzschild_fiber(1.0)
    for i in (0, 50, 128, 255):
        r = g.areal_radius[i]
        x = [r, 0.9, 0.3]
        ratio = np.diag(oracles.ricci(metric, x)) / np.diag(metric(x))
        assert ric["rr"][i] / gc["rr"][i] == pytest.approx(ratio[0], rel=1e-6)
        assert ric["sph"][i] / gc["sph"][i] == pytest.approx(ratio[1], rel=1e-6)


def test_schwarzschild_fiber_ricci_has_both_signs_near_r3():
    g = AnalyticGeometry.schwarzschild_slice(1.0, 2.5, 20.0, n=512)
    i = int(np.argmin(np.abs(g.areal_radius - 3.0)))
    ric = fiber_ricci_components(g)
    gc = g.metric_components()
    eig = sorted([ric["rr"][i] / gc["rr"][i], ric["sph"][i] / gc["sph"][i]])
    assert eig[0] < 0 < eig[1]
    assert min_ricci_eigenvalue(g)[i] == pytest.approx(eig[0])


# --------------------------------------------------------------------------
# space-time


def test_einstein_static_universe_scalar_curvature():
    np.testing.assert_allclose(spacetime_scalar_curvature(esu()).values, 6.0, atol=1e-12)


def test_anti_de_sitter_scalar_curvature():
    assert np.max(np.abs(spacetime_scalar_curvature(ads()).values + 12)) <= 1e-4


def test_schwarzschild_scalar_curvature():
    assert np.max(np.abs(spacetime_scalar_curvature(schwarzschild()).values)) <= 1e-4


def test_scalar_curvature_second_order_on_schwarzschild():
    e = [np.max(np.abs(spacetime_scalar_curvature(schwarzschild(n)).values)) for n in (256, 512)]
    assert e[0] / e[1] >= 3.5


def test_pointwise_oracle_agrees_on_anti_de_sitter():
    assert np.max(np.abs(pointwise_scalar_curvature(ads()).values + 12)) <= 1e-4


def test_minkowski_ricci_vanishes():
    rep = spacetime_ricci(minkowski())
    assert np.max(np.abs(rep.ric_tt.values)) <= 1e-9
    assert all(np.max(np.abs(v.values)) <= 1e-9 for v in rep.fiber_block.values())
    assert rep.mixed_zero


def test_anti_de_sitter_ricci_is_minus_three_g():
    st = ads()
    rep = spacetime_ricci(st)
    g = spacetime_metric_components(st)
    assert np.max(np.abs(rep.ric_tt.values / (-3 * g["tt"]) - 1)) <= 1e-4
    for k, v in rep.fiber_block.items():
        scale = np.maximum(g["rr"], g[k])
        assert np.max(np.abs(v.values + 3 * g[k]) / scale) <= 1e-4


def test_anti_de_sitter_ricci_against_oracle():
    st = ads(512)
    rep = spacetime_ricci(st)
    metric = oracles.static_metric(lambda y: np.cosh(y[0]), oracles.revolution_metric(np.sinh, 3))
    for i in (40, 200, 400):
        x = [0.0, st.fiber.nodes[i], 1.0, 0.5]
        R = np.diag(oracles.ricci(metric, x))
        assert rep.ric_tt.values[i] == pytest.approx(R[0], rel=1e-4)
        assert rep.ric_fiber_rr.values[i] == pytest.approx(R[1], rel=1e-4)
        assert rep.ric_fiber_sph.values[i] == pytest.approx(R[2], rel=1e-4)


def test_schwarzschild_ricci_vanishes():
    st = schwarzschild()
    rep = spacetime_ricci(st)
    g = spacetime_metric_components(st)
    scale = np.max([np.abs(v) for v in g.values()], axis=0)
    assert np.max(np.abs(rep.ric_tt.values) / scale) <= 1e-4
    for v in rep.fiber_block.values():
        assert np.max(np.abs(v.values) / scale) <= 1e-4


def test_schwarzschild_oracle_is_vacuum():
    metric = oracles.static_metric(lambda y: np.sqrt(1 - 2 / y[0]), oracles.schwarzschild_fiber(1.0))
    assert np.max(np.abs(oracles.ricci(metric, [0.0, 4.0, 1.0, 0.2]))) <= 1e-8


def _random_spacetimes(rng):
    sts = [ads(256), schwarzschild(256), esu(), minkowski()]
    g = perturbed(2)
    sts.append(StandardStaticSpacetime(g, ScalarField(g, 1 + 0.5 * rng.random() * np.cos(g.nodes))))
    t = ConformalTorusGeometry(32, 32, u="sinsin:0.3")
    X, Y = t.grid
    sts.append(StandardStaticSpacetime(t, ScalarField(t, 2 + np.sin(X) * np.cos(Y))))
    return sts


def test_trace_identity(rng):
    for st in _random_spacetimes(rng):
        tau = spacetime_scalar_curvature(st).values
        assert np.max(np.abs(ricci_trace(st).values - tau)) <= 1e-8


def test_warping_scale_invariance(rng):
    for st in _random_spacetimes(rng):
        c = 3.7
        a, b = spacetime_ricci(st), spacetime_ricci(st.scaled(c))
        np.testing.assert_allclose(spacetime_scalar_curvature(st.scaled(c)).values,
                                   spacetime_scalar_curvature(st).values, rtol=1e-12, atol=1e-9)
        np.testing.assert_allclose(b.ric_tt.values, c**2 * a.ric_tt.values, rtol=1e-12, atol=1e-9)
        for k in a.fiber_block:
            np.testing.assert_allclose(b.fiber_block[k].values, a.fiber_block[k].values, rtol=1e-12, atol=1e-9)


def test_constant_warping_reduces_to_fiber():
    g = perturbed(3)
    st = StandardStaticSpacetime(g, ScalarField.constant(g, 2.0))
    np.testing.assert_array_equal(spacetime_scalar_curvature(st).values, fiber_scalar_curvature(g).values)
    ric_F = fiber_ricci_components(g)
    for k, v in spacetime_ricci(st).fiber_block.items():
        np.testing.assert_array_equal(v.values, ric_F[k])


def test_two_dimensional_spacetime_uses_tau_minus_two_fpp_over_f():
    g = AnalyticGeometry.euclidean_interval(0.0, 1.0, 256)
    st = StandardStaticSpacetime(g, ScalarField(g, np.exp(g.nodes)))
    assert np.max(np.abs(spacetime_scalar_curvature(st).values + 2)) <= 1e-4


def test_warping_must_be_positive():
    g = AnalyticGeometry.round_sphere(2, n=32)
    with pytest.raises(errors.GeometryError):
        StandardStaticSpacetime(g, ScalarField(g, np.cos(g.nodes)))
