"""Quantum ILW Hamiltonians on Virasoro (x) Heisenberg level spaces.

The model couples one Virasoro Verma factor with one Heisenberg family
normalized to [a_m, a_{-m}] = m/2.  Parameters are the coupling r, the
twist-like parameter tau (entering through coth(m tau)) and the weight
parameter pihat; derived from them are beta = (r-1)/r, the central charge
and the highest weight.  The first Hamiltonian is scalar on each level
subspace, which is one of the standing cross-checks; the second carries the
actual spectral content and is compared against Bethe roots elsewhere.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from . import numerics
from .fock import (LevelBasis, OscillatorSpec, VermaSpec, heisenberg_action,
                   tensor_level_basis, virasoro_action)

#: guard against tau where coth(m tau) is singular.
_COTH_GUARD = 1e-12


def heisenberg_pairing(i: int, j: int, m: int) -> complex:
    """Single-family normalization [a_m, a_{-m}] = m/2."""
    return m / 2.0


OSCILLATORS = OscillatorSpec(1, heisenberg_pairing)


def coth(z: complex) -> complex:
    """Hyperbolic cotangent with saturation for large real part."""
    two = 2.0 * z
    if two.real > 50.0:
        return 1.0 + 0.0j
    if two.real < -50.0:
        return -1.0 + 0.0j
    e = cmath.exp(two)
    denom = e - 1.0
    if abs(denom) < _COTH_GUARD:
        raise ValueError("coth evaluated at a pole (tau too close to i*pi*Z/m)")
    return (e + 1.0) / denom


@dataclass(frozen=True)
class IlwParams:
    """Model parameters; beta, central charge and highest weight are derived."""

    r: complex
    tau: complex
    pihat: complex

    def __post_init__(self):
        r = complex(self.r)
        if abs(r) < 1e-12 or abs(r - 1.0) < 1e-12:
            raise ValueError("r must avoid 0 and 1 (beta degenerates)")
        if abs(cmath.exp(2.0 * complex(self.tau)) - 1.0) < _COTH_GUARD:
            raise ValueError("tau must keep exp(2 tau) away from 1")

    @property
    def beta(self) -> complex:
        r = complex(self.r)
        return (r - 1.0) / r

    @property
    def central_charge(self) -> complex:
        b = self.beta
        return 1.0 - 6.0 * (1.0 - b) ** 2 / b

    @property
    def highest_weight(self) -> complex:
        b = self.beta
        return ((1.0 - b) ** 2 / (4.0 * b)) * (complex(self.pihat) ** 2 - 1.0)

    @property
    def vacuum_shift(self) -> complex:
        """The additive constant (1-beta)^2 / (4 beta) of the first Hamiltonian."""
        b = self.beta
        return (1.0 - b) ** 2 / (4.0 * b)

    def verma(self) -> VermaSpec:
        return VermaSpec(self.central_charge, self.highest_weight)


class _Workspace:
    """Level bases and single-mode action matrices for one parameter set."""

    def __init__(self, params: IlwParams, max_level: int):
        self.params = params
        self.verma = params.verma()
        self._bases: dict[int, LevelBasis] = {}
        self._heis: dict[tuple[int, int], np.ndarray] = {}
        self._vir: dict[tuple[int, int], np.ndarray] = {}
        self.max_level = max_level

    def basis(self, level: int) -> LevelBasis:
        if level not in self._bases:
            self._bases[level] = tensor_level_basis(self.verma, OSCILLATORS, level)
        return self._bases[level]

    def a(self, mode: int, source_level: int) -> np.ndarray:
        """Matrix of a_mode from level source_level to source_level - mode."""
        key = (mode, source_level)
        if key not in self._heis:
            self._heis[key] = heisenberg_action(
                OSCILLATORS, 1, mode, self.basis(source_level),
                self.basis(source_level - mode))
        return self._heis[key]

    def L(self, n: int, source_level: int) -> np.ndarray:
        key = (n, source_level)
        if key not in self._vir:
            self._vir[key] = virasoro_action(
                self.verma, n, self.basis(source_level),
                self.basis(source_level - n))
        return self._vir[key]


def build_I1(params: IlwParams, level: int) -> np.ndarray:
    """First Hamiltonian L_0 + (1-beta)^2/(4 beta) + 2 sum_{m>0} a_{-m} a_m.

    Assembled honestly from action matrices; that it comes out scalar,
    (highest weight + level + vacuum shift) times the identity, is a
    validation target, not an input.
    """
    if level < 0:
        raise ValueError("level must be non-negative")
    ws = _Workspace(params, level)
    basis = ws.basis(level)
    mat = ws.L(0, level).astype(complex)
    mat += params.vacuum_shift * np.eye(basis.dimension)
    for m in range(1, level + 1):
        mat += 2.0 * ws.a(-m, level - m) @ ws.a(m, level)
    return mat


def build_I2(params: IlwParams, level: int) -> np.ndarray:
    """Second Hamiltonian on the level subspace.

    Three pieces: sum_{m != 0} L_{-m} a_m, the coth-weighted quadratic
    sum -(2(1-beta)/sqrt(beta)) sum_{m>0} m coth(m tau) a_{-m} a_m, and the
    cubic (1/3) sum over k+l+m=0 (all indices nonzero) of a_k a_l a_m.
    Zero modes are excluded throughout; mode indices are truncated to
    |index| <= level, beyond which every term annihilates the subspace.
    """
    if level < 0:
        raise ValueError("level must be non-negative")
    ws = _Workspace(params, 2 * level)
    dim = ws.basis(level).dimension
    mat = np.zeros((dim, dim), dtype=complex)
    beta = params.beta
    tau = complex(params.tau)

    # mixed Virasoro-Heisenberg piece, both signs of m
    for m in range(1, level + 1):
        mat += ws.L(-m, level - m) @ ws.a(m, level)
        mat += ws.L(m, level + m) @ ws.a(-m, level)

    # coth-weighted oscillator number piece
    prefactor = -2.0 * (1.0 - beta) / cmath.sqrt(beta)
    for m in range(1, level + 1):
        mat += (prefactor * m * coth(m * tau)) * (ws.a(-m, level - m) @ ws.a(m, level))

    # cubic piece, ordered triples (k, l, m), k + l + m = 0
    for k in range(-level, level + 1):
        if k == 0:
            continue
        for l in range(-level, level + 1):
            m = -k - l
            if l == 0 or m == 0 or abs(m) > level:
                continue
            lvl_after_m = level - m
            lvl_after_l = lvl_after_m - l
            if lvl_after_m < 0 or lvl_after_l < 0:
                continue
            term = ws.a(k, lvl_after_l) @ ws.a(l, lvl_after_m) @ ws.a(m, level)
            mat += term / 3.0
    return mat


def i1_expected_scalar(params: IlwParams, level: int) -> complex:
    """Closed-form value the first Hamiltonian must take on the level subspace."""
    return params.highest_weight + level + params.vacuum_shift


def ilw_spectrum(params: IlwParams, level: int) -> np.ndarray:
    """Canonically sorted eigenvalues of the second Hamiltonian at one level."""
    return numerics.sort_complex(numerics.eigenvalues(build_I2(params, level)))
