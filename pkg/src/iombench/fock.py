"""Graded level spaces and operator matrices on them.

Three ingredients: Heisenberg Fock factors with a configurable (possibly
asymmetric, cross-family) mode pairing, Virasoro Verma factors given by a
central charge and a highest weight, and level subspaces of their tensor
products.  States are occupation data: one partition for the Virasoro
monomial, one partition of mode labels per oscillator family.  Operator
matrices are assembled state by state through normal ordering, so every
convention (pairing normalization, commutator central term) lives in exactly
one place.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, NamedTuple

import numpy as np

from .partitions import enumerate_partitions


@dataclass(frozen=True)
class OscillatorSpec:
    """Heisenberg oscillator families b^i_m, i = 1..family_count.

    pairing(i, j, m) is the contraction [b^i_m, b^j_{-m}] for m > 0; all
    other commutators vanish.  Creation operators of all families commute,
    so occupation states are well-defined mode multisets per family.
    """

    family_count: int
    pairing: Callable[[int, int, int], complex]

    def __post_init__(self):
        if self.family_count < 1:
            raise ValueError("need at least one oscillator family")


@dataclass(frozen=True)
class VermaSpec:
    """Virasoro highest-weight data: central charge and highest weight."""

    central_charge: complex
    highest_weight: complex


class State(NamedTuple):
    """Occupation data: Virasoro partition (or None), one partition per family."""

    vir: tuple[int, ...] | None
    heis: tuple[tuple[int, ...], ...]

    @property
    def level(self) -> int:
        total = sum(self.vir) if self.vir is not None else 0
        return total + sum(sum(fam) for fam in self.heis)


@dataclass(frozen=True)
class LevelBasis:
    """The level-N subspace of a Verma (x) Fock tensor product.

    Either factor may be absent.  State order is deterministic: Virasoro
    level ascending, then reverse-lexicographic partitions, then oscillator
    level compositions with earlier families ascending.
    """

    level: int
    verma: VermaSpec | None
    oscillators: OscillatorSpec | None
    states: tuple[State, ...]
    _index: dict = field(repr=False, compare=False, default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "_index",
                           {s: i for i, s in enumerate(self.states)})

    @property
    def dimension(self) -> int:
        return len(self.states)

    def index_of(self, state: State) -> int:
        return self._index[state]

    def __contains__(self, state: State) -> bool:
        return state in self._index


def _family_fillings(families: int, total: int):
    """All tuples of per-family partitions with sizes summing to total."""
    if families == 0:
        if total == 0:
            yield ()
        return
    if families == 1:
        for lam in enumerate_partitions(total):
            yield (lam.parts,)
        return
    for first in range(total + 1):
        for lam in enumerate_partitions(first):
            for rest in _family_fillings(families - 1, total - first):
                yield (lam.parts,) + rest


def tensor_level_basis(verma: VermaSpec | None, oscillators: OscillatorSpec | None,
                       level: int) -> LevelBasis:
    """Level subspace of the tensor product; at least one factor required."""
    if verma is None and oscillators is None:
        raise ValueError("need a Verma factor, a Fock factor, or both")
    if level < 0:
        raise ValueError("level must be non-negative")
    families = oscillators.family_count if oscillators is not None else 0
    states = []
    vir_levels = range(level + 1) if verma is not None else (0,)
    for k in vir_levels:
        vir_parts = ([lam.parts for lam in enumerate_partitions(k)]
                     if verma is not None else [None])
        rest = level - k
        if oscillators is None and rest != 0:
            continue
        for vp in vir_parts:
            for filling in _family_fillings(families, rest):
                states.append(State(vp, filling))
    return LevelBasis(level, verma, oscillators, tuple(states))


def fock_level_basis(oscillators: OscillatorSpec, level: int) -> LevelBasis:
    """Pure Fock level subspace (no Virasoro factor)."""
    return tensor_level_basis(None, oscillators, level)


# -- state-level operator application ----------------------------------------

def _with_part_added(parts: tuple[int, ...], m: int) -> tuple[int, ...]:
    out = list(parts)
    for i, p in enumerate(out):
        if m >= p:
            out.insert(i, m)
            break
    else:
        out.append(m)
    return tuple(out)


def _with_one_removed(parts: tuple[int, ...], m: int) -> tuple[int, ...]:
    out = list(parts)
    out.remove(m)
    return tuple(out)


def apply_heisenberg(spec: OscillatorSpec, family: int, mode: int,
                     state: State) -> dict[State, complex]:
    """b^family_mode applied to an occupation state; returns state -> coeff.

    mode < 0 creates (appends the mode, coefficient 1); mode > 0 contracts
    against every family's matching creation modes with the configured
    pairing, once per occurrence.
    """
    if not 1 <= family <= spec.family_count:
        raise ValueError("family index out of range")
    if mode == 0:
        raise ValueError("zero modes are excluded from occupation spaces")
    if mode < 0:
        fam = state.heis[family - 1]
        new_heis = list(state.heis)
        new_heis[family - 1] = _with_part_added(fam, -mode)
        return {State(state.vir, tuple(new_heis)): 1.0 + 0.0j}
    out: dict[State, complex] = {}
    for j, fam in enumerate(state.heis, start=1):
        count = fam.count(mode)
        if not count:
            continue
        coeff = count * complex(spec.pairing(family, j, mode))
        if coeff == 0:
            continue
        new_heis = list(state.heis)
        new_heis[j - 1] = _with_one_removed(fam, mode)
        key = State(state.vir, tuple(new_heis))
        out[key] = out.get(key, 0.0j) + coeff
    return out


@lru_cache(maxsize=None)
def _order_creations(seq: tuple[int, ...]) -> tuple[tuple[tuple[int, ...], int], ...]:
    """Normal-order a product of creation operators L_{-seq[0]} L_{-seq[1]} ...

    Adjacent out-of-order pairs are swapped via
    L_{-a} L_{-b} = L_{-b} L_{-a} + (b - a) L_{-(a+b)}  (a < b),
    which either fixes an inversion or shortens the word, so the rewrite
    terminates.  Returns weakly decreasing monomials with integer weights.
    """
    for i in range(len(seq) - 1):
        if seq[i] < seq[i + 1]:
            a, b = seq[i], seq[i + 1]
            swapped = seq[:i] + (b, a) + seq[i + 2:]
            merged = seq[:i] + (a + b,) + seq[i + 2:]
            acc: dict[tuple[int, ...], int] = {}
            for mono, w in _order_creations(swapped):
                acc[mono] = acc.get(mono, 0) + w
            for mono, w in _order_creations(merged):
                acc[mono] = acc.get(mono, 0) + (b - a) * w
            return tuple((k, v) for k, v in acc.items() if v)
    return ((seq, 1),)


@lru_cache(maxsize=None)
def _act_virasoro(n: int, parts: tuple[int, ...], delta: complex,
                  c: complex) -> tuple[tuple[tuple[int, ...], complex], ...]:
    """L_n on the normal-ordered monomial L_{-parts} |delta>, as monomial -> coeff.

    Annihilators (n > 0) are commuted through the leftmost creation operator
    with [L_m, L_k] = (m - k) L_{m+k} + (c/12) m (m^2 - 1) delta_{m+k,0};
    creations (n < 0) reduce to reordering a pure-creation word.
    """
    if n == 0:
        return ((parts, delta + sum(parts)),)
    if n < 0:
        return tuple((mono, complex(w))
                     for mono, w in _order_creations((-n,) + parts))
    if not parts:
        return ()
    m, rest = parts[0], parts[1:]
    acc: dict[tuple[int, ...], complex] = {}
    # L_n L_{-m} = L_{-m} L_n + (n + m) L_{n-m} + central
    for mono, coeff in _act_virasoro(n, rest, delta, c):
        for mono2, w in _order_creations((m,) + mono):
            acc[mono2] = acc.get(mono2, 0.0j) + coeff * w
    for mono, coeff in _act_virasoro(n - m, rest, delta, c):
        acc[mono] = acc.get(mono, 0.0j) + (n + m) * coeff
    if n == m:
        central = (c / 12.0) * n * (n * n - 1)
        if central != 0:
            acc[rest] = acc.get(rest, 0.0j) + central
    return tuple((k, v) for k, v in acc.items() if v != 0)


def apply_virasoro(verma: VermaSpec, n: int, state: State) -> dict[State, complex]:
    """L_n applied to the Virasoro factor of a tensor state."""
    if state.vir is None:
        raise ValueError("state has no Virasoro factor")
    out: dict[State, complex] = {}
    for mono, coeff in _act_virasoro(n, state.vir,
                                     complex(verma.highest_weight),
                                     complex(verma.central_charge)):
        key = State(mono, state.heis)
        out[key] = out.get(key, 0.0j) + coeff
    return out


# -- matrix assembly -----------------------------------------------------------

def _assemble(source: LevelBasis, target: LevelBasis, apply_op) -> np.ndarray:
    mat = np.zeros((target.dimension, source.dimension), dtype=complex)
    for col, state in enumerate(source.states):
        for new_state, coeff in apply_op(state).items():
            mat[target.index_of(new_state), col] += coeff
    return mat


def heisenberg_action(spec: OscillatorSpec, family: int, mode: int,
                      source: LevelBasis, target: LevelBasis) -> np.ndarray:
    """Matrix of b^family_mode from the source level basis to the target one."""
    if target.level != source.level - mode:
        raise ValueError("level mismatch: %d -> %d under mode %d"
                         % (source.level, target.level, mode))
    return _assemble(source, target,
                     lambda s: apply_heisenberg(spec, family, mode, s))


def virasoro_action(verma: VermaSpec, n: int,
                    source: LevelBasis, target: LevelBasis) -> np.ndarray:
    """Matrix of L_n from the source level basis to the target one."""
    if target.level != source.level - n:
        raise ValueError("level mismatch: %d -> %d under L_%d"
                         % (source.level, target.level, n))
    return _assemble(source, target, lambda s: apply_virasoro(verma, n, s))
