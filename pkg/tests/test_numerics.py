"""Eigenvalues, multiset pairing, Newton iteration, deflation, affine fits."""

import numpy as np
import pytest

from iombench.numerics import (
    DegenerateFitError,
    EigenSolveError,
    MAX_EIGEN_DIM,
    NewtonProblem,
    affine_fit,
    assignment_pairs,
    deflate,
    eigenvalues,
    fd_jacobian,
    multiset_close,
    multiset_max_deviation,
    newton_solve,
    sort_complex,
)


# -- eigenvalues ---------------------------------------------------------------


def companion(coeffs):
    """Companion matrix of x^n + c_{n-1} x^{n-1} + ... + c_0 (monic)."""
    n = len(coeffs)
    m = np.zeros((n, n), dtype=complex)
    m[1:, :-1] = np.eye(n - 1)
    m[:, -1] = -np.asarray(coeffs, dtype=complex)
    return m


def test_eigenvalues_match_polynomial_roots():
    # dual route: the companion matrix of a polynomial with known roots
    roots = np.array([2.0, -1.0 + 0.5j, -1.0 - 0.5j, 0.25j])
    coeffs = np.poly(roots)          # leading 1, then descending powers
    comp = companion(coeffs[1:][::-1])
    got = eigenvalues(comp)
    assert multiset_max_deviation(got, roots) < 1e-10


def test_eigenvalues_validation():
    with pytest.raises(EigenSolveError):
        eigenvalues(np.zeros((2, 3)))
    with pytest.raises(EigenSolveError):
        eigenvalues(np.zeros((MAX_EIGEN_DIM + 1, MAX_EIGEN_DIM + 1)))
    assert len(eigenvalues(np.zeros((0, 0)))) == 0


def test_sort_complex_order():
    vals = [1 + 1j, -1, 1 - 1j, 0]
    out = sort_complex(vals)
    assert list(out) == [-1, 0, 1 - 1j, 1 + 1j]


# -- multiset comparison ---------------------------------------------------------


def test_assignment_pairs_conjugate_tie():
    # canonical sorting would swap the partners when real parts tie to
    # rounding; the assignment pairing must not
    eps = 1e-13
    a = [1.0 + 1.0j, (1.0 + eps) - 1.0j]
    b = [1.0 - 1.0j, 1.0 + 1.0j]
    assert multiset_max_deviation(a, b) < 1e-12


def test_multiset_deviation_basics():
    assert multiset_max_deviation([], []) == 0.0
    assert multiset_max_deviation([1j, 2], [2, 1j]) == 0.0
    with pytest.raises(ValueError):
        multiset_max_deviation([1], [1, 2])
    assert multiset_close([1.0, 2.0], [1.0, 2.0 + 1e-12])
    assert not multiset_close([1.0], [1.5])
    assert not multiset_close([1.0], [1.0, 2.0])


# -- Newton ----------------------------------------------------------------------


def _square_system(x):
    # z1^2 - 4 = 0, z2^3 - 8 = 0
    return np.array([x[0] ** 2 - 4.0, x[1] ** 3 - 8.0], dtype=complex)


def test_newton_converges_quadratically():
    problem = NewtonProblem(2, _square_system)
    res = newton_solve(problem, [1.5 + 0.1j, 1.7], tol=1e-12)
    assert res.converged
    assert abs(res.x[0] - 2.0) < 1e-10
    assert abs(res.x[1] - 2.0) < 1e-10
    # the residual history should collapse fast once in the basin
    assert res.iterations < 15


def test_newton_seed_dimension_checked():
    problem = NewtonProblem(2, _square_system)
    with pytest.raises(ValueError):
        newton_solve(problem, [1.0])


def test_newton_reports_singular_jacobian():
    flat = NewtonProblem(1, lambda x: np.array([x[0] * 0.0 + 1.0]))
    res = newton_solve(flat, [0.5])
    assert not res.converged
    assert "ill-conditioned" in res.reason or "stalled" in res.reason


def test_newton_handles_raising_residual():
    def bad(x):
        raise ArithmeticError("pole")

    res = newton_solve(NewtonProblem(1, bad), [1.0])
    assert not res.converged
    assert "raised" in res.reason


def test_fd_jacobian_matches_analytic():
    x0 = np.array([1.3 + 0.2j, -0.7], dtype=complex)
    jac = fd_jacobian(_square_system, x0)
    analytic = np.array([[2 * x0[0], 0], [0, 3 * x0[1] ** 2]])
    assert np.max(np.abs(jac - analytic)) < 1e-6


def test_deflation_repels_known_root():
    problem = NewtonProblem(1, lambda x: np.array([x[0] ** 2 - 4.0]))
    # plain Newton from 1.9 lands on +2
    plain = newton_solve(problem, [1.9])
    assert abs(plain.x[0] - 2.0) < 1e-9
    # with +2 deflated, the same start must not certify +2 again
    deflated = deflate(problem, [[2.0]])
    res = newton_solve(deflated, [1.9], tol=1e-10, max_iter=80)
    if res.converged:
        assert abs(res.x[0] + 2.0) < 1e-6


def test_deflation_far_field_not_smaller():
    problem = NewtonProblem(1, lambda x: np.array([x[0] ** 2 - 4.0]))
    deflated = deflate(problem, [[2.0]])
    far = np.array([50.0 + 0.0j])
    raw = np.abs(problem.residual(far))
    mod = np.abs(deflated.residual(far))
    # distance factors are clipped at 1, so deflation never shrinks the
    # residual away from the known roots
    assert np.all(mod >= raw - 1e-12)


# -- affine fit -------------------------------------------------------------------


def test_affine_fit_recovers_exact_map():
    rng = np.random.default_rng(5)
    a = rng.standard_normal(6) + 1j * rng.standard_normal(6)
    scale_true, offset_true = 1.7 - 0.3j, 0.25 + 1.1j
    b = scale_true * a + offset_true
    scale, offset, rms = affine_fit(a, b)
    assert abs(scale - scale_true) < 1e-12
    assert abs(offset - offset_true) < 1e-12
    assert rms < 1e-12


def test_affine_fit_degenerate_rejected():
    with pytest.raises(DegenerateFitError):
        affine_fit([1.0, 1.0], [2.0, 3.0])
    with pytest.raises(DegenerateFitError):
        affine_fit([1.0], [2.0])
    with pytest.raises(DegenerateFitError):
        affine_fit([1.0, 2.0], [1.0])
