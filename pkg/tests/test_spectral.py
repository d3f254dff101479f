import math

import numpy as np
import pytest
import scipy.linalg
import scipy.sparse as sp

from staticspace import errors
from staticspace.discreteops import assemble_L
from staticspace.fiber import AnalyticGeometry, Closure, ConformalTorusGeometry, Profile, RevolutionGeometry, ScalarField
from staticspace.spectral import (
    construct_constant_scalar,
    pcg,
    principal_eigenpair,
    rayleigh_quotient,
    refinement_study,
    sturm_count,
)


def perturbed_sphere(n=512, eps=0.1):
    return RevolutionGeometry(2, 0.0, math.pi, n, Profile.builtin(f"perturbed_sin:{eps}"), Closure.TWO_CAPS)


def dense_reference(L):
    """Eigenvalues of ``L`` from the symmetrised dense matrix."""
    w = np.sqrt(L.mass)
    A = L.stiffness.toarray() / np.outer(w, w) + np.diag(L.potential)
    return scipy.linalg.eigvalsh(A)


def test_flat_torus_principal_pair():
    g = ConformalTorusGeometry(32, 32)
    e = principal_eigenpair(assemble_L(g))
    assert abs(e.lambda1) <= 1e-9
    f = e.eigenfunction.values
    assert (f.max() - f.min()) / f.mean() <= 1e-6


def test_unit_sphere_principal_pair():
    g = AnalyticGeometry.round_sphere(2, n=256)
    e = principal_eigenpair(assemble_L(g))
    assert e.lambda1 == pytest.approx(1.0, abs=1e-8)
    f = e.eigenfunction.values
    assert (f.max() - f.min()) / f.mean() <= 1e-6


def test_perturbed_sphere_matches_dense_solver():
    L = assemble_L(perturbed_sphere(256))
    e = principal_eigenpair(L)
    ref = dense_reference(L)
    assert e.residual <= 1e-8
    assert np.all(e.eigenfunction.values > 0)
    assert e.lambda1 == pytest.approx(ref[0], abs=1e-9)
    assert e.gap > 0 and not e.gap_marginal


def test_torus_matches_dense_solver():
    L = assemble_L(ConformalTorusGeometry(16, 16, u="sinsin:0.3"))
    e = principal_eigenpair(L)
    ref = dense_reference(L)
    assert e.lambda1 == pytest.approx(ref[0], abs=1e-8)
    assert e.gap == pytest.approx(ref[1] - ref[0], rel=1e-8)


def test_eigenfunction_has_unit_mass_norm():
    L = assemble_L(perturbed_sphere(128))
    v = principal_eigenpair(L).eigenfunction.values
    assert L.inner(v, v) == pytest.approx(1.0, rel=1e-12)


def test_rayleigh_quotient_examples(rng):
    L = assemble_L(perturbed_sphere(256))
    e = principal_eigenpair(L)
    assert rayleigh_quotient(L, e.eigenfunction) == pytest.approx(e.lambda1, abs=1e-10)
    flat = assemble_L(ConformalTorusGeometry(16, 16))
    assert abs(rayleigh_quotient(flat, np.ones(256))) <= 1e-12
    sphere = assemble_L(AnalyticGeometry.round_sphere(2, n=128))
    for _ in range(5):
        assert rayleigh_quotient(sphere, rng.random(128) + 0.01) >= 1 - 1e-8


def test_potential_shift_moves_lambda_exactly():
    L = assemble_L(perturbed_sphere(256))
    base = principal_eigenpair(L).lambda1
    assert principal_eigenpair(L.shifted(0.75)).lambda1 - base == pytest.approx(0.75, abs=1e-10)


def test_gap_positive_on_compact_catalog_fibers():
    for g in (AnalyticGeometry.round_sphere(2, n=128), AnalyticGeometry.round_sphere(3, n=128),
              ConformalTorusGeometry(24, 24, u="cosx:0.2")):
        e = principal_eigenpair(assemble_L(g))
        assert e.gap > 0 and not e.gap_marginal


def test_non_convergence_reports_last_residual():
    L = assemble_L(ConformalTorusGeometry(32, 32, u="sinsin:0.4"))
    with pytest.raises(errors.ConvergenceError) as exc:
        principal_eigenpair(L, tol=1e-14, max_iter=2)
    assert exc.value.last_residual > 0 and exc.value.iterations == 2


def test_sturm_count_matches_dense_eigenvalues(rng):
    d = rng.normal(size=40)
    e = rng.normal(size=39)
    eig = scipy.linalg.eigh_tridiagonal(d, e, eigvals_only=True)
    for x in (-3.0, -0.5, 0.0, 0.7, 2.5):
        assert sturm_count(d, e, x) == int(np.sum(eig < x))


def test_pcg_solves_spd_system(rng):
    n = 50
    B = rng.normal(size=(n, n))
    A = sp.csr_matrix(B @ B.T + n * np.eye(n))
    b = rng.normal(size=n)
    x, _ = pcg(A, b, 1e-12)
    np.testing.assert_allclose(A @ x, b, atol=1e-9)


def test_pcg_detects_indefinite_matrix():
    A = sp.csr_matrix(np.array([[1.0, 2.0], [2.0, 1.0]]))
    with pytest.raises(errors.PreconditionError):
        pcg(A, np.array([1.0, -1.0]), 1e-10)


# --------------------------------------------------------------------------
# construction


def test_construction_on_round_three_sphere_gives_constant_f():
    st, tau = construct_constant_scalar(AnalyticGeometry.round_sphere(3, n=256))
    f = st.f.values
    assert tau == pytest.approx(6.0, abs=1e-8)
    assert (f.max() - f.min()) / f.mean() <= 1e-6


def test_construction_on_perturbed_sphere():
    c = construct_constant_scalar(perturbed_sphere(512))
    f = c.spacetime.f.values
    assert np.all(f > 0) and (f.max() - f.min()) / f.mean() > 1e-2
    assert c.tau == pytest.approx(2 * c.eigen.lambda1)
    assert c.constancy <= 1e-4 and c.pointwise_constancy <= 1e-4
    assert c.discretization_ok


def test_construction_on_small_conformal_torus():
    c = construct_constant_scalar(ConformalTorusGeometry(64, 64, u="sinsin:0.2"))
    f = c.spacetime.f.values
    assert np.all(f > 0) and (f.max() - f.min()) / f.mean() > 1e-2
    assert c.constancy <= 1e-4 and c.consistency <= 1e-4
    assert c.eigen.residual <= 1e-8


def test_construction_refuses_noncompact_fiber():
    with pytest.raises(errors.PreconditionError):
        construct_constant_scalar(AnalyticGeometry.hyperbolic_space(3, n=64))


def test_refinement_shows_second_order():
    rows = refinement_study(perturbed_sphere, [128, 256, 512])
    assert all(r["ratio"] >= 3.5 for r in rows[1:])


def test_below_infimum_warning_is_diagnostic_only():
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("error")
        construct_constant_scalar(perturbed_sphere(256))
