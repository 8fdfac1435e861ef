"""Eigenvalue series, root-sum maps, Gaudin residues and the oper check."""

import cmath
import math

import mpmath as mp
import numpy as np
import pytest

from iombench import bethe
from iombench.partitions import nodes, partitions_up_to
from iombench.spectrum import (
    GammaPoleError,
    g1_vacuum,
    gaudin_gamma,
    gaudin_gamma_check,
    gaudin_gamma_via_weight,
    ilw_eigenvalue_from_roots,
    oper_apparent_singularity_check,
    r1_report,
    series_exp,
    series_inv,
    series_mul,
    t2_series,
    t_series_cor52,
    t_series_direct,
)


# -- truncated power-series helpers ------------------------------------------------


def test_series_mul_inv_round_trip():
    rng = np.random.default_rng(3)
    a = rng.standard_normal(7) + 1j * rng.standard_normal(7)
    a[0] = 1.0 + 0.2j
    prod = series_mul(a, series_inv(a))
    want = np.zeros(7, dtype=complex)
    want[0] = 1.0
    assert np.max(np.abs(prod - want)) < 1e-12


def test_series_exp_matches_taylor():
    a = np.array([0.0, 0.3 - 0.1j, -0.2, 0.05j, 0.0, 0.0], dtype=complex)
    out = series_exp(a)
    taylor = np.zeros_like(a)
    taylor[0] = 1.0
    power = taylor.copy()
    for k in range(1, 12):
        power = series_mul(power, a)
        taylor = taylor + power / math.factorial(k)
    assert np.max(np.abs(out - taylor)) < 1e-12


# -- one-color eigenvalue series ----------------------------------------------------


def test_vacuum_coefficient_is_partition_generating_value():
    system = bethe.ToroidalGl1System(0.4, 0.5, 0.05, (1.0,), 0)
    oracle = 1.0 / complex(mp.qp(complex(system.p)))
    for route in (t_series_direct, t_series_cor52):
        got = route(system, [], 0)[0]
        assert abs(got - oracle) < 1e-12


def test_two_routes_agree_off_shell():
    # the coefficient identity is a formal rearrangement, so it holds for
    # arbitrary root values, not only on Bethe solutions
    rng = np.random.default_rng(17)
    q1 = 0.35 + 0.2 * rng.random() + 0.04j * rng.standard_normal()
    q3 = 0.5 + 0.15 * rng.random() + 0.04j * rng.standard_normal()
    weights = tuple(0.9 + 0.4 * rng.random(2) + 0.1j * rng.standard_normal(2))
    system = bethe.ToroidalGl1System(q1, q3, 0.08, weights, 2)
    roots = 0.3 + rng.random(2) + 0.1j * rng.standard_normal(2)
    direct = t_series_direct(system, roots, 2)
    coeff = t_series_cor52(system, roots, 2)
    assert np.max(np.abs(direct - coeff)) < 1e-10


# -- two-color series -----------------------------------------------------------------


def test_two_color_vacuum_sum():
    system = bethe.ToroidalGl2System(0.4, 0.5, 0.02 * 0.15, 0.15, (), (), 0, 0)
    for color in (0, 1):
        series = t2_series(system, [], [], 0, color=color)
        assert series.conjectural
        total = 0.0j
        for lam in partitions_up_to(30):
            term = 1.0 + 0.0j
            for (a, b) in nodes(lam):
                term *= system.p0 if (a - b + color) % 2 == 0 else system.p1
            total += term
        assert abs(series.coefficients[0] - total) < 1e-12


def test_two_color_color_validation():
    system = bethe.ToroidalGl2System(0.4, 0.5, 0.02, 0.15, (), (), 0, 0)
    with pytest.raises(ValueError):
        t2_series(system, [], [], 0, color=2)


# -- root-sum eigenvalue map ----------------------------------------------------------


def test_ilw_eigenvalue_is_linear_in_root_sum():
    beta = 0.6 + 0.0j
    factor = (1.0 - beta) / cmath.sqrt(beta)
    roots = [0.3 + 0.1j, -0.2]
    assert ilw_eigenvalue_from_roots(roots, beta) == pytest.approx(
        factor * (0.1 + 0.1j))
    assert ilw_eigenvalue_from_roots([], beta) == 0.0


# -- Gaudin residues and oper consistency ---------------------------------------------


def closed_form_pair(r, pihat, v):
    beta = (r - 1.0) / r
    s = beta * v
    return s, s * (pihat - 1.0) / (pihat + 1.0)


def test_gamma_two_routes_agree_on_solution():
    r, pihat, v = 2.5, 1.3, 1.0
    s, t = closed_form_pair(r, pihat, v)
    system = bethe.AffineGaudinSystem(r, pihat, v, 1, 1)
    roots = np.array([s, t], dtype=complex)
    report = gaudin_gamma_check(system, roots)
    assert report.max_deviation < 1e-12
    assert report.passed()
    # and disagree off the solution
    off = gaudin_gamma_check(system, roots * 1.07)
    assert off.max_deviation > 1e-3


def test_gamma_routes_are_genuinely_different_functions():
    system = bethe.AffineGaudinSystem(2.5, 1.3, 1.0, 1, 1)
    x = np.array([0.41, 0.09], dtype=complex)
    a = gaudin_gamma(system, x)
    b = gaudin_gamma_via_weight(system, x)
    assert np.max(np.abs(a - b)) > 1e-3


def test_oper_obstruction_vanishes_only_on_solutions():
    r, pihat, v = 2.5, 1.3, 1.0
    s, t = closed_form_pair(r, pihat, v)
    system = bethe.AffineGaudinSystem(r, pihat, v, 1, 1)
    roots = np.array([s, t], dtype=complex)
    on = oper_apparent_singularity_check(system, roots)
    assert on.passed and on.max_obstruction < 1e-12
    off = oper_apparent_singularity_check(system, roots * (1.0 + 1e-3) + 1e-3)
    assert off.max_obstruction > 1e-4
    # Frobenius exponents of the double pole
    lo, hi = on.exponent_pair
    assert lo == pytest.approx(-(pihat - 1.0) / 2.0)
    assert hi == pytest.approx((pihat - 1.0) / 2.0 + 1.0)


def test_g1_vacuum_even_in_momentum():
    val_plus = g1_vacuum(0.6, 0.22 + 0.1j)
    val_minus = g1_vacuum(0.6, -0.22 - 0.1j)
    assert val_plus == pytest.approx(val_minus)


def test_g1_vacuum_pole_guard():
    # 1 - 2 beta = -1 at beta = 1: nonpositive integer Gamma argument
    with pytest.raises(GammaPoleError):
        g1_vacuum(1.0, 0.37)


def test_r1_report_shape():
    r, pihat, v = 2.5, 1.3, 1.0
    s, t = closed_form_pair(r, pihat, v)
    system = bethe.AffineGaudinSystem(r, pihat, v, 1, 1)
    rep = r1_report(system, np.array([s, t], dtype=complex))
    assert rep.conjectural
    assert rep.root_sum == pytest.approx(s - t)
    with pytest.raises(ValueError):
        r1_report(bethe.AffineGaudinSystem(r, pihat, v, 2, 1),
                  np.array([0.1, 0.2, 0.05], dtype=complex))
