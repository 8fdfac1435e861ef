"""Eigenvalue series from Bethe roots, and downstream spectral checks.

The transfer-operator eigenvalue attached to a one-color root configuration
is a power series in w = 1/u.  Two independent routes are implemented: the
direct route multiplies a weight prefactor, a root-ratio factor, and a sum
over partitions of per-node factors; the coefficient route assembles each
power of w from partition-indexed numeric sums against power sums of the
roots.  Their agreement is a strong consistency check and is enforced in
the tests; nothing here assumes it.

The two-color analogue colors the nodes of each partition by diagonal
parity.  It is flagged conjectural: only its internal color-swap symmetry
is checked, not an independent derivation.

Also here: the map from ILW Bethe roots to eigenvalues of the cubic
integral of motion, the Gaudin residue vector gamma, a second-order-oper
apparent-singularity check (no-logarithm obstruction at each root), and a
conjectural norm-constant report built from gamma-function factors.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gamma as _gamma_fn

from .bethe import AffineGaudinSystem, ToroidalGl1System, ToroidalGl2System
from .partitions import enumerate_partitions, nodes, partitions_up_to

#: partition sums are truncated once |p|^L drops below this tail bound.
SERIES_TAIL = 1e-14
_MAX_TRUNCATION = 200


class SeriesDomainError(ValueError):
    """Series evaluation outside its convergence domain."""


class GammaPoleError(ArithmeticError):
    """A gamma-function argument hit a nonpositive integer."""


# -- dense truncated series in w -------------------------------------------------

def series_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    n = len(a)
    out = np.zeros(n, dtype=complex)
    for i in range(n):
        if a[i] == 0:
            continue
        out[i:] += a[i] * b[:n - i]
    return out


def series_inv(a: np.ndarray) -> np.ndarray:
    if a[0] == 0:
        raise SeriesDomainError("series with zero constant term has no inverse")
    n = len(a)
    out = np.zeros(n, dtype=complex)
    out[0] = 1.0 / a[0]
    for k in range(1, n):
        out[k] = -np.dot(a[1:k + 1], out[k - 1::-1]) / a[0]
    return out


def series_exp(a: np.ndarray) -> np.ndarray:
    if a[0] != 0:
        raise SeriesDomainError("series_exp expects zero constant term")
    n = len(a)
    out = np.zeros(n, dtype=complex)
    out[0] = 1.0
    # b' = a' b termwise: n b_n = sum_k k a_k b_{n-k}
    for k in range(1, n):
        acc = 0.0 + 0.0j
        for j in range(1, k + 1):
            acc += j * a[j] * out[k - j]
        out[k] = acc / k
    return out


def _poly_from_roots(values, length: int) -> np.ndarray:
    """prod_i (1 - c_i w) truncated to the series length."""
    out = np.zeros(length, dtype=complex)
    out[0] = 1.0
    for c in values:
        lin = np.zeros(length, dtype=complex)
        lin[0] = 1.0
        if length > 1:
            lin[1] = -c
        out = series_mul(out, lin)
    return out


def _scale_series(a: np.ndarray, factor: complex) -> np.ndarray:
    powers = factor ** np.arange(len(a))
    return a * powers


def _truncation_order(p_abs: float) -> int:
    if p_abs == 0.0:
        return 0
    if p_abs >= 1.0:
        raise SeriesDomainError("partition sum diverges for |p| >= 1")
    order = int(math.ceil(math.log(SERIES_TAIL) / math.log(p_abs)))
    return min(max(order, 1), _MAX_TRUNCATION)


# -- one-color eigenvalue series --------------------------------------------------

def _node_factor(node, q1: complex, q3: complex) -> complex:
    a, b = node
    return q3 ** (a - 1) * q1 ** (b - 1)


def t_series_direct(system: ToroidalGl1System, roots, ell_max: int) -> np.ndarray:
    """Eigenvalue series by direct assembly.

    T(u) = phi(u) * (Q(u/q2)/Q(u)) * sum over partitions of the product of
    per-node factors a(u / q_node), where Q(u) = prod_i (1 - t_i/u) and
    a(u) carries one power of the twist p per node.
    """
    q1, q3, q2 = complex(system.q1), complex(system.q3), system.q2
    p = system.p
    n = ell_max + 1
    t = np.asarray(roots, dtype=complex)
    v = np.asarray(system.weights, dtype=complex)

    log_phi = np.zeros(n, dtype=complex)
    for r in range(1, n):
        kernel = (1.0 - q2 ** (-r)) / ((1.0 - q1 ** r) * (1.0 - q3 ** r))
        log_phi[r] = kernel / r * np.sum(v ** r)
    phi = series_exp(log_phi)

    front = series_mul(_poly_from_roots(q2 * t, n),
                       series_inv(_poly_from_roots(t, n)))

    a_base = np.zeros(n, dtype=complex)
    a_base[0] = 1.0
    for vj in v:
        a_base = series_mul(a_base, _poly_from_roots([vj], n))
        a_base = series_mul(a_base, series_inv(_poly_from_roots([vj / q2], n)))
    for s in (q1, q2, q3):
        a_base = series_mul(a_base, _poly_from_roots(t / s, n))
        a_base = series_mul(a_base, series_inv(_poly_from_roots(t * s, n)))
    a_base = p * a_base

    order = _truncation_order(abs(p))
    node_cache: dict = {}
    total = np.zeros(n, dtype=complex)
    for lam in partitions_up_to(order):
        prod = np.zeros(n, dtype=complex)
        prod[0] = 1.0
        for node in nodes(lam):
            cached = node_cache.get(node)
            if cached is None:
                cached = _scale_series(a_base, _node_factor(node, q1, q3))
                node_cache[node] = cached
            prod = series_mul(prod, cached)
        total += prod
    return series_mul(series_mul(phi, front), total)


def t_series_cor52(system: ToroidalGl1System, roots, ell_max: int) -> np.ndarray:
    """Eigenvalue series via partition-indexed coefficient sums.

    Coefficient of w^ell collects, over multiplicity patterns alpha with
    sum r*alpha_r = ell, the numeric partition sum C_alpha times
    prod_r w_r^alpha_r / alpha_r!, where w_r pairs power sums of the roots
    against power sums of the weights.
    """
    q1, q3, q2 = complex(system.q1), complex(system.q3), system.q2
    p = system.p
    t = np.asarray(roots, dtype=complex)
    v = np.asarray(system.weights, dtype=complex)
    n = ell_max + 1

    w_vals = {}
    for r in range(1, n):
        kappa = (1.0 - q1 ** r) * (1.0 - q2 ** r) * (1.0 - q3 ** r)
        b_r = 1.0 / ((1.0 - q1 ** r) * (1.0 - q3 ** r))
        w_vals[r] = kappa / r * (np.sum(t ** r)
                                 - (q1 ** r * q3 ** r) * b_r * np.sum(v ** r))

    # alpha patterns, one per partition of each ell
    patterns: list[tuple[int, dict]] = [(0, {})]
    for ell in range(1, n):
        for lam in enumerate_partitions(ell):
            mult: dict = {}
            for part in lam:
                mult[part] = mult.get(part, 0) + 1
            patterns.append((ell, mult))

    order = _truncation_order(abs(p))
    c_alpha = {idx: 0.0 + 0.0j for idx in range(len(patterns))}
    for lam in partitions_up_to(order):
        weight = p ** sum(lam)
        z_vals = {}
        for r in range(1, n):
            acc = 1.0 / ((1.0 - q3 ** r) * (1.0 - q1 ** r))
            for a, b in nodes(lam):
                acc -= q3 ** ((a - 1) * r) * q1 ** ((b - 1) * r)
            z_vals[r] = acc
        for idx, (_, mult) in enumerate(patterns):
            term = weight
            for r, count in mult.items():
                term *= z_vals[r] ** count
            c_alpha[idx] += term

    out = np.zeros(n, dtype=complex)
    for idx, (ell, mult) in enumerate(patterns):
        term = c_alpha[idx]
        for r, count in mult.items():
            term *= w_vals[r] ** count / math.factorial(count)
        out[ell] += term
    return out


# -- two-color eigenvalue series (conjectural) -------------------------------------

@dataclass(frozen=True)
class TwoColorSeries:
    coefficients: tuple[complex, ...]
    color: int
    conjectural: bool = True


def t2_series(system: ToroidalGl2System, roots0, roots1, ell_max: int,
              color: int = 0) -> TwoColorSeries:
    """Two-color eigenvalue series; nodes colored by diagonal parity.

    Node (a, b) of the partition carries color (a - b + color) mod 2 and
    contributes the corresponding single-color factor; the weight prefactor
    uses separate kernels for same-color and cross-color weights.  The
    formula is conjectural, hence the flag on the result.
    """
    if color not in (0, 1):
        raise ValueError("color must be 0 or 1")
    q1, q3, q2 = complex(system.q1), complex(system.q3), system.q2
    n = ell_max + 1
    groups = (np.asarray(roots0, dtype=complex), np.asarray(roots1, dtype=complex))
    weights = (np.asarray(system.weights0, dtype=complex),
               np.asarray(system.weights1, dtype=complex))
    twists = (system.p0, system.p1)

    def a_series(c: int) -> np.ndarray:
        own, other = groups[c], groups[1 - c]
        out = np.zeros(n, dtype=complex)
        out[0] = 1.0
        for vj in weights[c]:
            out = series_mul(out, _poly_from_roots([vj], n))
            out = series_mul(out, series_inv(_poly_from_roots([vj / q2], n)))
        out = series_mul(out, _poly_from_roots(own / q2, n))
        out = series_mul(out, series_inv(_poly_from_roots(own * q2, n)))
        for s in (q1, q3):
            out = series_mul(out, _poly_from_roots(other / s, n))
            out = series_mul(out, series_inv(_poly_from_roots(other * s, n)))
        return twists[c] * out

    factors = (a_series(0), a_series(1))

    log_phi = np.zeros(n, dtype=complex)
    for r in range(1, n):
        denom = (1.0 - q1 ** (2 * r)) * (1.0 - q3 ** (2 * r))
        same = (1.0 - q2 ** (-r)) * (1.0 + q2 ** (-r)) / denom
        cross = (1.0 - q2 ** (-r)) * (q1 ** r + q3 ** r) / denom
        for cprime in (0, 1):
            kernel = same if cprime == color else cross
            log_phi[r] += kernel / r * np.sum(weights[cprime] ** r)
    phi = series_exp(log_phi)

    own_roots = groups[color]
    front = series_mul(_poly_from_roots(q2 * own_roots, n),
                       series_inv(_poly_from_roots(own_roots, n)))

    order = _truncation_order(max(abs(twists[0]), abs(twists[1])))
    node_cache: dict = {}
    total = np.zeros(n, dtype=complex)
    for lam in partitions_up_to(order):
        prod = np.zeros(n, dtype=complex)
        prod[0] = 1.0
        for node in nodes(lam):
            a, b = node
            c_node = (a - b + color) % 2
            key = (node, c_node)
            cached = node_cache.get(key)
            if cached is None:
                cached = _scale_series(factors[c_node], _node_factor(node, q1, q3))
                node_cache[key] = cached
            prod = series_mul(prod, cached)
        total += prod
    coeffs = series_mul(series_mul(phi, front), total)
    return TwoColorSeries(tuple(complex(c) for c in coeffs), color)


# -- ILW eigenvalue map -------------------------------------------------------------

def ilw_eigenvalue_from_roots(roots, beta: complex) -> complex:
    """Cubic-integral eigenvalue of a shifted-root configuration."""
    return ((1.0 - beta) / cmath.sqrt(beta)
            * complex(np.sum(np.asarray(roots, dtype=complex))))


# -- Gaudin residues, oper check, norm constant -------------------------------------

def gaudin_gamma(system: AffineGaudinSystem, roots) -> np.ndarray:
    """Residue vector gamma at the first-group roots."""
    x = np.asarray(roots, dtype=complex)
    s_roots, t_roots = x[:system.n0], x[system.n0:]
    ph = complex(system.pihat)
    out = np.zeros(system.n0, dtype=complex)
    for i, si in enumerate(s_roots):
        others = np.delete(s_roots, i)
        out[i] = (ph - 1.0) / si + np.sum(2.0 / (si - others)) - np.sum(2.0 / (si - t_roots))
    return out


def gaudin_gamma_via_weight(system: AffineGaudinSystem, roots) -> np.ndarray:
    """Equivalent residue formula through the weight location.

    Equal to gaudin_gamma on solutions of the Bethe equations; the identity
    is exactly the first-group equation, so agreement doubles as a root
    certificate.
    """
    x = np.asarray(roots, dtype=complex)
    s_roots = x[:system.n0]
    r, v = complex(system.r), complex(system.v)
    return 1.0 / (s_roots - v) + (r - 3.0) / s_roots


@dataclass(frozen=True)
class GammaReport:
    gammas: tuple[complex, ...]
    gammas_via_weight: tuple[complex, ...]
    max_deviation: float

    def passed(self, tol: float = 1e-9) -> bool:
        return self.max_deviation <= tol


def gaudin_gamma_check(system: AffineGaudinSystem, roots) -> GammaReport:
    """Residues computed two ways; equal exactly on Bethe solutions."""
    direct = gaudin_gamma(system, roots)
    via_weight = gaudin_gamma_via_weight(system, roots)
    dev = float(np.max(np.abs(direct - via_weight))) if len(direct) else 0.0
    return GammaReport(tuple(complex(g) for g in direct),
                       tuple(complex(g) for g in via_weight), dev)


@dataclass(frozen=True)
class OperReport:
    obstructions: tuple[complex, ...]
    max_obstruction: float
    tol: float
    passed: bool
    exponent_pair: tuple[float, float]


def oper_apparent_singularity_check(system: AffineGaudinSystem, roots,
                                    tol: float = 1e-8) -> OperReport:
    """No-logarithm obstruction of the oper at each first-group root.

    The second-order operator has a double pole with exponents {-1, 2} at
    each first-group root; the configuration is consistent iff the local
    Frobenius recursion closes at step three.  Obstruction per root:
    O = -gamma*a2 + c0*a1 + c1*a0 with a0 = 1, a1 = -gamma/2,
    a2 = (c0 + gamma^2/2)/2 and c0, c1 the regular part of the potential
    and its derivative at the root.
    """
    x = np.asarray(roots, dtype=complex)
    s_roots = x[:system.n0]
    gam = gaudin_gamma(system, roots)
    ph = complex(system.pihat)
    l = (ph - 1.0) / 2.0
    ll1 = l * (l + 1.0)
    obstructions = []
    for i, si in enumerate(s_roots):
        others = np.delete(s_roots, i)
        gam_others = np.delete(gam, i)
        c0 = (-ll1 / si ** 2 + np.sum(gam) / si
              - np.sum(2.0 / (si - others) ** 2)
              - np.sum(gam_others / (si - others)))
        c1 = (2.0 * ll1 / si ** 3 - np.sum(gam) / si ** 2
              + np.sum(4.0 / (si - others) ** 3)
              + np.sum(gam_others / (si - others) ** 2))
        a1 = -gam[i] / 2.0
        a2 = (c0 + gam[i] ** 2 / 2.0) / 2.0
        obstructions.append(-gam[i] * a2 + c0 * a1 + c1)
    max_obs = max((abs(o) for o in obstructions), default=0.0)
    return OperReport(tuple(complex(o) for o in obstructions), float(max_obs),
                      tol, max_obs <= tol, (-l.real, l.real + 1.0))


def _check_gamma_arg(arg: complex) -> None:
    if abs(arg.imag) < 1e-12:
        nearest = round(arg.real)
        if nearest <= 0 and abs(arg.real - nearest) < 1e-8:
            raise GammaPoleError("gamma argument %s at a nonpositive integer" % arg)


def g1_vacuum(beta: float, momentum: complex) -> complex:
    """Vacuum norm constant; even under momentum sign flip."""
    args = (1.0 - 2.0 * beta, 1.0 - beta - 2.0 * momentum, 1.0 - beta + 2.0 * momentum)
    for a in args:
        _check_gamma_arg(complex(a))
    return (4.0 * math.pi ** 2 * _gamma_fn(complex(args[0]))
            / (_gamma_fn(complex(args[1])) * _gamma_fn(complex(args[2]))))


@dataclass(frozen=True)
class R1Report:
    value: complex
    vacuum_factor: complex
    momentum: complex
    root_sum: complex
    conjectural: bool = True
    note: str = ("first-order coefficient of the norm constant; the sign "
                 "convention of the root-sum correction is not independently "
                 "pinned down here, treat as conjectural")


def r1_report(system: AffineGaudinSystem, roots) -> R1Report:
    """First correction to the norm constant from a Gaudin configuration."""
    if system.n0 != system.n1:
        raise ValueError("norm constant needs equal group sizes")
    r, ph, v = complex(system.r), complex(system.pihat), complex(system.v)
    beta = (r - 1.0) / r
    central = 1.0 - 6.0 * (1.0 - beta) ** 2 / beta
    momentum = cmath.sqrt((central - 1.0) / 24.0 * ph ** 2)
    x = np.asarray(roots, dtype=complex)
    s_roots, t_roots = x[:system.n0], x[system.n0:]
    root_sum = complex(np.sum(s_roots) - np.sum(t_roots))
    vac = g1_vacuum(beta.real if abs(beta.imag) < 1e-15 else beta, momentum)
    denom = 1.0 - beta + 2.0 * momentum
    _check_gamma_arg(complex(denom))
    value = vac * (1.0 - (1.0 / v) * (2.0 * (1.0 - 2.0 * beta) / denom) * root_sum)
    return R1Report(complex(value), complex(vac), complex(momentum), root_sum)
