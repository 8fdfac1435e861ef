"""Elliptic integral of motion on a two-family Fock space.

The operator is the constant term in z of a dressed vertex-current pair,
u1/q times the normal-ordered exponential of one oscillator family plus
u2/q times that of the second.  The two families carry an asymmetric
elliptic mode pairing built from (q1, q3, p); its creation parts are
proportional to independent modes, so occupation states are the usual
pairs of partitions.  The operator is grading preserving and is assembled
blockwise per level from matching-degree pieces of the two exponentials.

The scaling-limit comparison against the ILW Hamiltonians lives here too:
eigenvalues of the elliptic operator, pooled over levels, are affine-fitted
against the quadratic-plus-cubic ILW prediction, with the calibration frozen
on levels 0 and 1; the leftover residual must shrink like the fourth power
of the step parameter.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import ilw as ilw_mod
from . import numerics
from .fock import LevelBasis, OscillatorSpec, fock_level_basis, heisenberg_action
from .partitions import enumerate_partitions

#: reject twists this close to (or beyond) the unit circle.
_P_MODULUS_GUARD = 1e-6
_POLE_GUARD = 1e-12


@dataclass(frozen=True)
class EllipticParams:
    """Weights (q1, q3), twist pbar and the two Fock weights u1, u2.

    Derived: q2 = 1/(q1 q3), q = principal sqrt(q2), p = pbar / q2.
    The twist must satisfy |p| < 1 for the mode pairing to make sense.
    """

    q1: complex
    q3: complex
    pbar: complex
    u1: complex
    u2: complex

    def __post_init__(self):
        if abs(complex(self.q1)) < 1e-12 or abs(complex(self.q3)) < 1e-12:
            raise ValueError("q1 and q3 must be nonzero")
        if abs(self.p) >= 1.0 - _P_MODULUS_GUARD:
            raise ValueError("|p| = %.6g is not inside the unit disk" % abs(self.p))

    @property
    def q2(self) -> complex:
        return 1.0 / (complex(self.q1) * complex(self.q3))

    @property
    def q(self) -> complex:
        return cmath.sqrt(self.q2)

    @property
    def p(self) -> complex:
        return complex(self.pbar) / self.q2


def pairing(params: EllipticParams, i: int, j: int, m: int) -> complex:
    """Contraction [B^i_m, B^j_{-m}] of the elliptic oscillator families.

    Diagonal families share one formula; the two cross pairings differ by a
    factor p^m, which is what makes the current elliptic rather than
    trigonometric.  Requires m > 0.
    """
    if m <= 0:
        raise ValueError("pairing is defined for positive modes")
    q1m = complex(params.q1) ** m
    q3m = complex(params.q3) ** m
    q2m = params.q2 ** m
    pm = params.p ** m
    denom = 1.0 - pm
    if abs(denom) < _POLE_GUARD:
        raise ValueError("twist pole: p^%d is too close to 1" % m)
    if i == j:
        return -(1.0 / m) * ((1.0 - pm * q2m) / denom) * (1.0 - q1m) * (1.0 - q3m)
    factor = pm if (i, j) == (1, 2) else 1.0
    return -(1.0 / m) * (factor / denom) * (1.0 - q1m) * (1.0 - q2m) * (1.0 - q3m)


def boson_oscillators(params: EllipticParams) -> OscillatorSpec:
    return OscillatorSpec(2, lambda i, j, m: pairing(params, i, j, m))


@dataclass(frozen=True, eq=False)
class EllipticOperator:
    """Blockwise matrix of the constant-term operator on levels 0..max_level."""

    params: EllipticParams
    max_level: int
    bases: tuple[LevelBasis, ...]
    blocks: tuple[np.ndarray, ...]

    def block(self, level: int) -> np.ndarray:
        return self.blocks[level]

    @property
    def full_matrix(self) -> np.ndarray:
        dims = [b.shape[0] for b in self.blocks]
        out = np.zeros((sum(dims), sum(dims)), dtype=complex)
        at = 0
        for b in self.blocks:
            n = b.shape[0]
            out[at:at + n, at:at + n] = b
            at += n
        return out

    def spectra(self) -> list[np.ndarray]:
        """Canonically sorted eigenvalues, one array per level."""
        return [numerics.sort_complex(numerics.eigenvalues(b)) for b in self.blocks]


def _exp_degree_parts(osc: OscillatorSpec, family: int, degree: int,
                      bases: list[LevelBasis], source_level: int, create: bool):
    """Degree-d part of exp(sum of one family's modes) as a matrix.

    create=False: annihilation side, source_level -> source_level - degree.
    create=True: creation side, source_level -> source_level + degree.
    Each partition mu of the degree contributes its operator chain divided
    by the product of multiplicity factorials.
    """
    src = bases[source_level]
    tgt_level = source_level + degree if create else source_level - degree
    out = np.zeros((bases[tgt_level].dimension, src.dimension), dtype=complex)
    for mu in enumerate_partitions(degree):
        sym = 1.0
        for part in set(mu.parts):
            sym *= math.factorial(mu.parts.count(part))
        chain = np.eye(src.dimension, dtype=complex)
        level = source_level
        for part in mu.parts:
            mode = -part if create else part
            chain = heisenberg_action(osc, family, mode,
                                      bases[level], bases[level - mode]) @ chain
            level -= mode
        out += chain / sym
    return out


def build_elliptic_I1(params: EllipticParams, max_level: int) -> EllipticOperator:
    """Constant term of the dressed two-family current, levels 0..max_level.

    For each level the constant term pairs the degree-d piece of the
    creation exponential with the degree-d piece of the annihilation
    exponential, d running from 0 to the level; each family is weighted by
    its Fock weight over q.
    """
    if max_level < 0:
        raise ValueError("max_level must be non-negative")
    osc = boson_oscillators(params)
    bases = [fock_level_basis(osc, l) for l in range(max_level + 1)]
    weights = {1: complex(params.u1) / params.q, 2: complex(params.u2) / params.q}
    blocks = []
    for level in range(max_level + 1):
        dim = bases[level].dimension
        block = np.zeros((dim, dim), dtype=complex)
        for family in (1, 2):
            for d in range(level + 1):
                ann = _exp_degree_parts(osc, family, d, bases, level, create=False)
                cre = _exp_degree_parts(osc, family, d, bases, level - d, create=True)
                block += weights[family] * (cre @ ann)
        blocks.append(block)
    return EllipticOperator(params, max_level, tuple(bases), tuple(blocks))


def closed_form_eigenvalue(params: EllipticParams, roots) -> complex:
    """Bethe-root eigenvalue -q (1-q1)(1-q3) sum(t) + (u1+u2)/q."""
    total = complex(sum(roots)) if len(roots) else 0.0j
    return (-params.q * (1.0 - complex(params.q1)) * (1.0 - complex(params.q3)) * total
            + (complex(params.u1) + complex(params.u2)) / params.q)


# -- comparisons ---------------------------------------------------------------

@dataclass(frozen=True)
class LevelComparison:
    level: int
    operator_count: int
    bethe_count: int
    max_deviation: float

    @property
    def counts_match(self) -> bool:
        return self.operator_count == self.bethe_count


@dataclass(frozen=True)
class BetheCompareReport:
    scale: complex
    offset: complex
    levels: tuple[LevelComparison, ...]

    @property
    def max_deviation(self) -> float:
        return max((lc.max_deviation for lc in self.levels), default=0.0)

    @property
    def counts_match(self) -> bool:
        return all(lc.counts_match for lc in self.levels)


def _paired_affine(a: np.ndarray, b: np.ndarray):
    """Least-squares scale/offset for already-paired points (no re-sorting)."""
    design = np.column_stack([a, np.ones(len(a), dtype=complex)])
    coef, *_ = np.linalg.lstsq(design, b, rcond=None)
    return complex(coef[0]), complex(coef[1])


def elliptic_spectrum_vs_bethe(params: EllipticParams, max_level: int,
                               roots_by_level) -> BetheCompareReport:
    """Operator spectra against Bethe closed-form values, level by level.

    roots_by_level maps a level to the list of admissible root multisets at
    that level.  One global affine calibration (scale, offset) is fitted on
    the levels 0 and 1 points and then frozen; per-level deviations are the
    largest pointwise distances after canonical sorting.  A count mismatch
    at some level is reported with deviation +inf at that level.
    """
    op = build_elliptic_I1(params, max_level)
    spectra = op.spectra()
    bethe = {}
    for level in range(max_level + 1):
        values = [closed_form_eigenvalue(params, roots)
                  for roots in roots_by_level.get(level, [])]
        bethe[level] = numerics.sort_complex(values)
    cal_a, cal_b = [], []
    for level in range(min(1, max_level) + 1):
        if len(spectra[level]) == len(bethe[level]) and len(bethe[level]):
            pa, pb = numerics.assignment_pairs(spectra[level], bethe[level])
            cal_a.extend(pa)
            cal_b.extend(pb)
    if len(cal_a) >= 2 and np.max(np.abs(np.asarray(cal_a) - np.mean(cal_a))) > 1e-300:
        scale, offset = _paired_affine(np.asarray(cal_a, dtype=complex),
                                       np.asarray(cal_b, dtype=complex))
    else:
        scale, offset = 1.0 + 0.0j, 0.0j
    levels = []
    for level in range(max_level + 1):
        ops = spectra[level]
        bv = bethe[level]
        if len(ops) != len(bv):
            levels.append(LevelComparison(level, len(ops), len(bv), float("inf")))
            continue
        dev = numerics.multiset_max_deviation(scale * ops + offset, bv)
        levels.append(LevelComparison(level, len(ops), len(bv), dev))
    return BetheCompareReport(scale, offset, tuple(levels))


def scaling_params(r: complex, tau: complex, pihat: complex, h: float) -> EllipticParams:
    """Elliptic parameters of the ILW scaling regime at step parameter h.

    eps = h/r; the weights are exponentials e^{-(r-1)eps}, e^{r eps}, the
    twist is fixed by p = e^{2 tau}, and the Fock weights satisfy
    u2/u1 = e^{-pihat*eps} with the normalization u1 + u2 = 2q.
    """
    eps = h / complex(r)
    q1 = cmath.exp(-(complex(r) - 1.0) * eps)
    q3 = cmath.exp(complex(r) * eps)
    q2 = 1.0 / (q1 * q3)
    pbar = cmath.exp(2.0 * complex(tau)) * q2
    q = cmath.sqrt(q2)
    ratio = cmath.exp(-complex(pihat) * eps)
    u1 = 2.0 * q / (1.0 + ratio)
    u2 = u1 * ratio
    return EllipticParams(q1, q3, pbar, u1, u2)


@dataclass(frozen=True)
class LimitCheckReport:
    """Residuals of the elliptic operator against the ILW expansion."""

    h_values: tuple[float, ...]
    max_residuals: tuple[float, ...]
    rms_residuals: tuple[float, ...]
    scales: tuple[complex, ...]
    offsets: tuple[complex, ...]

    @property
    def ratios(self) -> tuple[float, ...]:
        """Consecutive max-residual ratios; fourth-power scaling gives (h1/h2)^4."""
        out = []
        for a, b in zip(self.max_residuals, self.max_residuals[1:]):
            out.append(a / b if b else float("inf"))
        return tuple(out)


def ilw_limit_check(r: complex, tau: complex, pihat: complex,
                    h_values, max_level: int) -> LimitCheckReport:
    """Eigenvalues of the elliptic operator against 2 + beta h^2 H1 + beta^(3/2) h^3 H2.

    Both spectra are pooled over levels 0..max_level with pairing done per
    level (canonical sort within each level).  A single complex affine
    calibration absorbs the normalization conventions of the current; it is
    fitted on the levels <= 1 points, frozen, and the reported residual is
    taken over all pooled points.  The remainder of the expansion is fourth
    order in h, which is what the residual ratios measure.
    """
    params_ilw = ilw_mod.IlwParams(r, tau, pihat)
    beta = params_ilw.beta
    i2_by_level = [ilw_mod.ilw_spectrum(params_ilw, l) for l in range(max_level + 1)]
    i1_by_level = []
    for l in range(max_level + 1):
        m = ilw_mod.build_I1(params_ilw, l)
        scalar = complex(np.mean(np.diag(m)))
        if float(np.max(np.abs(m - scalar * np.eye(m.shape[0])))) > 1e-9:
            raise RuntimeError("first Hamiltonian unexpectedly non-scalar at level %d" % l)
        i1_by_level.append(scalar)

    h_values = tuple(float(h) for h in h_values)
    maxs, rmss, scales, offsets = [], [], [], []
    for h in h_values:
        ep = scaling_params(r, tau, pihat, h)
        spectra = build_elliptic_I1(ep, max_level).spectra()
        pred, eigs, cal_mask = [], [], []
        for l in range(max_level + 1):
            p_l = (2.0 + beta * h ** 2 * i1_by_level[l]
                   + beta ** 1.5 * h ** 3 * i2_by_level[l])
            pred.extend(numerics.sort_complex(p_l))
            eigs.extend(spectra[l])
            cal_mask.extend([l <= 1] * len(spectra[l]))
        pred = np.asarray(pred, dtype=complex)
        eigs = np.asarray(eigs, dtype=complex)
        cal = np.asarray(cal_mask)
        if cal.sum() >= 2 and np.max(np.abs(pred[cal] - np.mean(pred[cal]))) > 1e-300:
            scale, offset = _paired_affine(pred[cal], eigs[cal])
        else:
            scale, offset = 1.0 + 0.0j, eigs[0] - pred[0] if len(eigs) else 0.0j
        resid = np.abs(scale * pred + offset - eigs)
        maxs.append(float(np.max(resid)) if len(resid) else 0.0)
        rmss.append(float(np.sqrt(np.mean(resid ** 2))) if len(resid) else 0.0)
        scales.append(scale)
        offsets.append(offset)
    return LimitCheckReport(h_values, tuple(maxs), tuple(rmss),
                            tuple(scales), tuple(offsets))
