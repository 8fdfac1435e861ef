"""Elliptic conserved operator on two-fold Fock products and its ILW limit."""

import cmath

import numpy as np
import pytest

from iombench import bethe
from iombench.elliptic import (
    EllipticParams,
    build_elliptic_I1,
    closed_form_eigenvalue,
    elliptic_spectrum_vs_bethe,
    ilw_limit_check,
    scaling_params,
)
from iombench.partitions import enumerate_pairs

EP = EllipticParams(0.4, 0.5, 0.05, 1.0, 1.3)


def test_derived_parameters():
    assert EP.q2 == pytest.approx(1.0 / (0.4 * 0.5))
    assert EP.q ** 2 == pytest.approx(EP.q2)
    assert EP.p == pytest.approx(0.05 / EP.q2)


def test_twist_modulus_guard():
    with pytest.raises(ValueError):
        EllipticParams(0.4, 0.5, 6.0, 1.0, 1.3)   # |p| = 6/5 outside the disk
    with pytest.raises(ValueError):
        EllipticParams(0.0, 0.5, 0.05, 1.0, 1.3)


def test_vacuum_eigenvalue_closed_form():
    op = build_elliptic_I1(EP, 0)
    want = (complex(EP.u1) + complex(EP.u2)) / EP.q
    assert abs(op.block(0)[0, 0] - want) < 1e-14
    assert abs(closed_form_eigenvalue(EP, []) - want) < 1e-14


def test_block_dimensions_follow_pair_counts():
    op = build_elliptic_I1(EP, 3)
    for level in range(4):
        assert op.block(level).shape[0] == len(enumerate_pairs(level))
    assert [len(s) for s in op.spectra()] == [1, 2, 5, 10]


def test_full_matrix_is_block_diagonal():
    op = build_elliptic_I1(EP, 2)
    fm = op.full_matrix
    sizes = [op.block(level).shape[0] for level in range(3)]
    assert fm.shape[0] == sum(sizes)
    start = 0
    for level, size in enumerate(sizes):
        sl = slice(start, start + size)
        assert np.array_equal(fm[sl, sl], op.block(level))
        start += size
    # off-diagonal blocks empty
    mask = np.ones_like(fm, dtype=bool)
    start = 0
    for size in sizes:
        mask[start:start + size, start:start + size] = False
        start += size
    assert np.max(np.abs(fm[mask])) == 0.0


def test_levels_zero_one_match_bethe_roots():
    roots_by_level = {}
    for level in range(2):
        system = bethe.ToroidalGl1System(EP.q1, EP.q3, EP.pbar,
                                         (EP.u1, EP.u2), level)
        res = bethe.solve_all(system, bethe.SolveOptions(
            tol=1e-10, expected_count=len(enumerate_pairs(level))))
        roots_by_level[level] = [sol.groups[0] for sol in res.solutions]
    report = elliptic_spectrum_vs_bethe(EP, 1, roots_by_level)
    assert report.counts_match
    assert report.max_deviation < 1e-8


def test_count_mismatch_reported_as_infinite():
    report = elliptic_spectrum_vs_bethe(EP, 1, {0: [[]], 1: []})
    assert not report.counts_match
    assert report.levels[1].max_deviation == float("inf")


def test_scaling_params_algebra():
    r, tau, pihat, h = 2.5, -0.7, 1.3, 0.05
    ep = scaling_params(r, tau, pihat, h)
    eps = h / r
    assert ep.q1 == pytest.approx(cmath.exp(-(r - 1.0) * eps))
    assert ep.q3 == pytest.approx(cmath.exp(r * eps))
    assert ep.p == pytest.approx(cmath.exp(2.0 * tau))
    assert ep.u1 + ep.u2 == pytest.approx(2.0 * ep.q)
    assert ep.u2 / ep.u1 == pytest.approx(cmath.exp(-pihat * eps))


def test_limit_check_residual_shrinks():
    report = ilw_limit_check(2.5, -0.7, 1.3, (0.1, 0.05), 1)
    assert report.h_values == (0.1, 0.05)
    assert len(report.ratios) == 1
    assert report.max_residuals[1] < report.max_residuals[0]
