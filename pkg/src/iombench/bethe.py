"""Bethe-ansatz equation systems and a deterministic multistart solver.

Five systems share one solver: the one- and two-color toroidal systems
(multiplicative equations, product of weight and root factors equal to -1),
the additive ILW system in shifted variables, the affine Gaudin system and
its one-parameter hybrid deformation.  Multiplicative equations are cleared
to numerator + denominator = 0 for Newton (polynomial, no poles); the
certified residual divides back by the larger of |num| and |den| per
equation.  The Gaudin-type sums of simple poles are likewise cleared to
polynomials for Newton (sum over terms of numerator times the product of
the other denominators); their certificate renormalizes each equation by
its dominant term, so neither roots escaping to infinity (all terms small)
nor two poles pinching a root (two terms huge and cancelling) can fake a
zero that the cleared form does not confirm.

Everything is deterministic: structured seeds come from partition data,
generic seeds from a fixed low-discrepancy annulus sequence, and solutions
found earlier deflate the residual so later seeds drain other basins.
Admissibility (residual bound, pairwise separation within each group,
distance from every pole locus) is certified after polishing on the
undeflated equations; rejected configurations are kept with reasons.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import root as _scipy_root

from . import numerics
from .partitions import Partition, enumerate_partitions, nodes

#: admissibility margins relative to the system scale.
SEPARATION_FACTOR = 1e-7
POLE_FACTOR = 1e-7

_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53)


class BethePoleError(ArithmeticError):
    """Residual evaluated on (or numerically at) a pole locus."""


def _frac(x: float) -> float:
    return x - math.floor(x)


def _annulus_seeds(dimension: int, count: int, center: complex, scale: float):
    """Deterministic low-discrepancy seeds on annuli around a center."""
    seeds = []
    for k in range(1, count + 1):
        coords = []
        for c in range(dimension):
            u = _frac(k * math.sqrt(_PRIMES[(2 * c) % len(_PRIMES)]) + 0.17 * c)
            w = _frac(k * math.sqrt(_PRIMES[(2 * c + 1) % len(_PRIMES)]) + 0.39 * c)
            radius = scale * (0.25 + 1.35 * u)
            angle = 2.0 * math.pi * w
            coords.append(center + radius * cmath.exp(1j * angle))
        seeds.append(np.asarray(coords, dtype=complex))
    return seeds


def _perturb(values, magnitude: float, salt: int):
    """Relative-plus-absolute deterministic jitter to avoid exact poles."""
    golden = (math.sqrt(5.0) - 1.0) / 2.0
    out = []
    for k, v in enumerate(values):
        angle = 2.0 * math.pi * _frac((k + 1) * golden + salt * 0.6180339887)
        out.append(v + magnitude * max(1.0, abs(v)) * cmath.exp(1j * angle))
    return np.asarray(out, dtype=complex)


def _cleared_rows(parts) -> np.ndarray:
    """Pole-free Newton form of sum_k num_k / den_k: clear all denominators.

    Each row becomes sum_k num_k * prod_{l != k} den_l, a polynomial in the
    roots.  Zeros of the original rational equation survive; new zeros can
    only sit on pole collisions, which the admissibility margins reject.
    """
    out = []
    for nums, dens in parts:
        m = len(dens)
        acc = 0.0 + 0.0j
        for k in range(m):
            prod = nums[k]
            for l in range(m):
                if l != k:
                    prod = prod * dens[l]
            acc += prod
        out.append(acc)
    return np.asarray(out, dtype=complex)


def _near_real(z: complex) -> bool:
    return abs(complex(z).imag) < 1e-12


def _ground_configuration(factory: Callable, n0: int, n1: int, beta: float):
    """Real interlaced root chain of the normalized (v = 1) system.

    Both groups of the admissible all-real solution sit interlaced below
    roughly 1.4 * beta; a quadratically spaced template lands close enough
    for a trust-region solve to finish.  Returns None when the solve does
    not certify (non-generic parameters, or chains this template misses).
    """
    if n0 + n1 == 0:
        return None
    system = factory(None, None)
    template = [beta * 1.25 * ((i + 1.0) / n0) ** 2 for i in range(n0)]
    template += [beta * 1.05 * ((2 * j + 1.0) / (2 * n1)) ** 2
                 for j in range(n1)]

    def fun(x):
        return system.residual_raw(x.astype(complex)).real

    try:
        sol = _scipy_root(fun, np.asarray(template), method="hybr",
                          options={"xtol": 1e-13, "maxfev": 8000})
    except Exception:
        return None
    x, norm, ok = _polish(system, sol.x.astype(complex), tol=1e-10)
    return x if ok else None


def _track_loop(factory: Callable, loop: Callable, x: np.ndarray,
                steps: int) -> np.ndarray | None:
    """Continue a solution along a closed parameter loop, step by step."""
    cur = np.asarray(x, dtype=complex)
    for i in range(1, steps + 1):
        r_i, ph_i = loop(2.0 * math.pi * i / steps)
        cur, _, ok = _polish(factory(r_i, ph_i), cur, tol=1e-8, max_iter=12)
        if not ok:
            return None
    return cur


def _monodromy_orbit(factory: Callable, n0: int, n1: int,
                     r0: float, ph0: float, beta: float) -> list:
    """All solutions reachable from the real ground chain by monodromy.

    Closed loops in the (r, pihat) plane around branch points of the root
    variety permute the solutions of the normalized system; tracking the
    ground configuration around a fixed family of loops and iterating on
    every new find enumerates the whole orbit.  For a connected variety
    that is the complete solution set, which is how the isolated basins
    that defeat any direct multistart get reached deterministically.
    """
    start = _ground_configuration(factory, n0, n1, beta)
    if start is None:
        return []
    group_sizes = (n0, n1)

    def canon(z):
        s = sorted(z[:n0], key=lambda w: (w.real, w.imag))
        t = sorted(z[n0:], key=lambda w: (w.real, w.imag))
        return np.asarray(s + t, dtype=complex)

    rr = 1.0 + abs(r0)
    rp = 1.0 + abs(ph0)
    loops = [
        lambda phi: (r0 + 0.26 * rr * (cmath.exp(1j * phi) - 1.0), ph0),
        lambda phi: (r0, ph0 + 0.35 * rp * (cmath.exp(1j * phi) - 1.0)),
        lambda phi: (r0 + 0.17 * rr * (cmath.exp(1j * phi) - 1.0),
                     ph0 + 0.22 * rp * (cmath.exp(1j * phi) - 1.0)),
        lambda phi: (r0 + 0.40 * rr * (cmath.exp(1j * phi) - 1.0), ph0),
        lambda phi: (r0, ph0 + 0.65 * rp * (cmath.exp(1j * phi) - 1.0)),
        lambda phi: (r0 - 0.23 * rr * (cmath.exp(1j * phi) - 1.0),
                     ph0 + 0.39 * rp * (cmath.exp(-1j * phi) - 1.0)),
    ]
    orbit = [canon(start)]
    frontier = list(orbit)
    for _ in range(4):
        fresh = []
        for x in frontier:
            for loop in loops:
                y = _track_loop(factory, loop, x, steps=24)
                if y is None:
                    y = _track_loop(factory, loop, x, steps=72)
                if y is None:
                    continue
                yc = canon(y)
                if any(_same_configuration(yc, k, group_sizes, 1e-6)
                       for k in orbit):
                    continue
                orbit.append(yc)
                fresh.append(yc)
                if len(orbit) >= 64:
                    return orbit
        if not fresh:
            break
        frontier = fresh
    return orbit


def _multi_partitions(total: int, slots: int):
    """All tuples of `slots` partitions with sizes summing to total."""
    if slots == 0:
        if total == 0:
            yield ()
        return
    for first in range(total + 1):
        for lam in enumerate_partitions(first):
            for rest in _multi_partitions(total - first, slots - 1):
                yield (lam,) + rest


# -- system definitions --------------------------------------------------------

class BetheSystem:
    """Shared interface; concrete systems define equations and seeds."""

    label: str = ""

    @property
    def group_sizes(self) -> tuple[int, ...]:
        raise NotImplementedError

    @property
    def dimension(self) -> int:
        return sum(self.group_sizes)

    @property
    def scale(self) -> float:
        raise NotImplementedError

    def residual_raw(self, x: np.ndarray) -> np.ndarray:
        """Holomorphic form driven to zero by Newton."""
        raise NotImplementedError

    def residual(self, x: np.ndarray) -> np.ndarray:
        """Certified residual (scaled for multiplicative systems)."""
        raise NotImplementedError

    def pole_distance(self, x: np.ndarray) -> float:
        raise NotImplementedError

    def structured_seeds(self) -> list:
        return []

    def seed_center(self) -> complex:
        return 0.0j

    def seed_scale(self) -> float:
        """Radius scale of the generic annulus sweep (admissibility margins
        stay tied to `scale`)."""
        return self.scale

    def groups(self, x: np.ndarray) -> tuple[tuple[complex, ...], ...]:
        out = []
        at = 0
        for size in self.group_sizes:
            out.append(tuple(complex(v) for v in x[at:at + size]))
            at += size
        return tuple(out)

    def canonicalize(self, x: np.ndarray) -> np.ndarray:
        parts = []
        at = 0
        for size in self.group_sizes:
            parts.append(numerics.sort_complex(x[at:at + size]))
            at += size
        return np.concatenate(parts) if parts else np.zeros(0, dtype=complex)

    def params_dict(self) -> dict:
        raise NotImplementedError


class _MultiplicativeSystem(BetheSystem):
    """Equations of the form (product) = -1, cleared to num + den = 0."""

    def _num_den(self, x: np.ndarray):
        raise NotImplementedError

    def residual_raw(self, x: np.ndarray) -> np.ndarray:
        num, den = self._num_den(np.asarray(x, dtype=complex))
        return num + den

    def residual(self, x: np.ndarray) -> np.ndarray:
        # |num + den| relative to max(|num|, |den|): the distance of the
        # multiplicative equation from -1.  No unit floor: configurations
        # where both sides are small must still satisfy the ratio equation,
        # otherwise clearing denominators certifies spurious attractors.
        num, den = self._num_den(np.asarray(x, dtype=complex))
        scale = np.maximum(np.maximum(np.abs(num), np.abs(den)), 1e-300)
        return (num + den) / scale


@dataclass(frozen=True)
class ToroidalGl1System(_MultiplicativeSystem):
    """One-color toroidal Bethe equations with weights (v_1..v_M).

    For each root: p * prod_j (t_i - v_j)/(t_i - v_j/q2) times the product
    over all roots of (q_s t_i - t_j)/(t_i/q_s - t_j) for s = 1, 2, 3
    equals -1, with p = pbar * q^(-M).
    """

    q1: complex
    q3: complex
    pbar: complex
    weights: tuple[complex, ...]
    n_roots: int

    label = "toroidal_gl1"

    @property
    def q2(self) -> complex:
        return 1.0 / (complex(self.q1) * complex(self.q3))

    @property
    def q(self) -> complex:
        return cmath.sqrt(self.q2)

    @property
    def p(self) -> complex:
        return complex(self.pbar) * self.q ** (-len(self.weights))

    @property
    def group_sizes(self) -> tuple[int, ...]:
        return (self.n_roots,)

    @property
    def scale(self) -> float:
        mags = [abs(complex(w)) for w in self.weights]
        mags += [abs(complex(self.q1)), abs(complex(self.q3)), 1.0]
        return max(mags)

    def _num_den(self, t: np.ndarray):
        q1, q3, q2, p = complex(self.q1), complex(self.q3), self.q2, self.p
        v = np.asarray(self.weights, dtype=complex)
        num = np.full(len(t), p, dtype=complex)
        den = np.ones(len(t), dtype=complex)
        for i, ti in enumerate(t):
            num[i] *= np.prod(ti - v)
            den[i] *= np.prod(ti - v / q2)
            for s in (q1, q2, q3):
                num[i] *= np.prod(s * ti - t)
                den[i] *= np.prod(ti / s - t)
        return num, den

    def pole_distance(self, x: np.ndarray) -> float:
        t = np.asarray(x, dtype=complex)
        v = np.asarray(self.weights, dtype=complex)
        q1, q3, q2 = complex(self.q1), complex(self.q3), self.q2
        dists = []
        for ti in t:
            if len(v):
                dists.append(np.min(np.abs(ti - v / q2)))
            for s in (q1, q2, q3):
                dists.append(np.min(np.abs(ti / s - t)))
        return float(min(dists)) if dists else float("inf")

    def seed_center(self) -> complex:
        if not self.weights:
            return 0j
        return complex(np.mean(np.asarray(self.weights, dtype=complex)) / self.q2)

    def seed_scale(self) -> float:
        if not self.weights:
            return self.scale
        base = max(abs(complex(w) / self.q2) for w in self.weights)
        growth = max(1.0, abs(complex(self.q1)), abs(complex(self.q3)))
        return base * growth ** self.n_roots

    def structured_seeds(self) -> list:
        return seed_strings_gl1(self.q1, self.q3, self.weights, self.n_roots)

    def params_dict(self) -> dict:
        return {"q1": self.q1, "q3": self.q3, "pbar": self.pbar,
                "weights": list(self.weights), "n_roots": self.n_roots}


def seed_strings_gl1(q1: complex, q3: complex, weights, n_roots: int) -> list:
    """String seeds: node positions q3^a q1^b v_j over partition tuples.

    At small twist the roots flow to the pole side of the weight factor,
    t = q2^{-1} v_j = q1 q3 v_j, and stack geometrically with ratios q3
    (rows) and q1 (columns); node (a, b) sits at v_j q3^a q1^b.  One seed
    per tuple of partitions (one per weight) of total size n_roots, each
    slightly perturbed (relative 1e-3, deterministic angles) so no seed
    starts exactly on a zero-pole collision.
    """
    seeds = []
    for salt, lams in enumerate(_multi_partitions(n_roots, len(weights))):
        coords = []
        for j, lam in enumerate(lams):
            for a, b in nodes(lam):
                coords.append(complex(q3) ** a * complex(q1) ** b
                              * complex(weights[j]))
        seeds.append(_perturb(coords, 1e-3, salt))
    return seeds


@dataclass(frozen=True)
class ToroidalGl2System(_MultiplicativeSystem):
    """Two-color toroidal Bethe equations; roots split into two groups."""

    q1: complex
    q3: complex
    pbar: complex
    pbar1: complex
    weights0: tuple[complex, ...]
    weights1: tuple[complex, ...]
    n0: int
    n1: int

    label = "toroidal_gl2"

    @property
    def q2(self) -> complex:
        return 1.0 / (complex(self.q1) * complex(self.q3))

    @property
    def q(self) -> complex:
        return cmath.sqrt(self.q2)

    @property
    def p0(self) -> complex:
        return complex(self.pbar) / complex(self.pbar1) * self.q ** (-len(self.weights0))

    @property
    def p1(self) -> complex:
        return complex(self.pbar1) * self.q ** (-len(self.weights1))

    @property
    def group_sizes(self) -> tuple[int, ...]:
        return (self.n0, self.n1)

    @property
    def scale(self) -> float:
        mags = [abs(complex(w)) for w in self.weights0 + self.weights1]
        mags += [abs(complex(self.q1)), abs(complex(self.q3)), 1.0]
        return max(mags)

    def _color_num_den(self, own: np.ndarray, other: np.ndarray,
                       own_weights, twist: complex):
        q1, q3, q2 = complex(self.q1), complex(self.q3), self.q2
        v = np.asarray(own_weights, dtype=complex)
        num = np.full(len(own), twist, dtype=complex)
        den = np.ones(len(own), dtype=complex)
        for i, xi in enumerate(own):
            num[i] *= np.prod(xi - v)
            den[i] *= np.prod(xi - v / q2)
            num[i] *= np.prod(q2 * xi - own)
            den[i] *= np.prod(xi / q2 - own)
            for s in (q1, q3):
                num[i] *= np.prod(s * xi - other)
                den[i] *= np.prod(xi / s - other)
        return num, den

    def _num_den(self, x: np.ndarray):
        s_roots = x[:self.n0]
        t_roots = x[self.n0:]
        num0, den0 = self._color_num_den(s_roots, t_roots, self.weights0, self.p0)
        num1, den1 = self._color_num_den(t_roots, s_roots, self.weights1, self.p1)
        return np.concatenate([num0, num1]), np.concatenate([den0, den1])

    def pole_distance(self, x: np.ndarray) -> float:
        q1, q3, q2 = complex(self.q1), complex(self.q3), self.q2
        s_roots = np.asarray(x[:self.n0], dtype=complex)
        t_roots = np.asarray(x[self.n0:], dtype=complex)
        dists = []
        for own, other, weights in ((s_roots, t_roots, self.weights0),
                                    (t_roots, s_roots, self.weights1)):
            v = np.asarray(weights, dtype=complex)
            for xi in own:
                if len(v):
                    dists.append(np.min(np.abs(xi - v / q2)))
                dists.append(np.min(np.abs(xi / q2 - own)))
                if len(other):
                    for s in (q1, q3):
                        dists.append(np.min(np.abs(xi / s - other)))
        return float(min(dists)) if dists else float("inf")

    def seed_center(self) -> complex:
        all_w = np.asarray(tuple(self.weights0) + tuple(self.weights1), dtype=complex)
        if not len(all_w):
            return 0j
        return complex(np.mean(all_w) / self.q2)

    def seed_scale(self) -> float:
        if not (self.weights0 or self.weights1):
            return self.scale
        base = max(abs(complex(w) / self.q2)
                   for w in self.weights0 + self.weights1)
        growth = max(1.0, abs(complex(self.q1)), abs(complex(self.q3)))
        return base * growth ** (self.n0 + self.n1)

    def structured_seeds(self) -> list:
        # node seeds per color, same string heuristic as the one-color system
        seeds0 = seed_strings_gl1(self.q1, self.q3, self.weights0, self.n0)
        seeds1 = seed_strings_gl1(self.q1, self.q3, self.weights1, self.n1)
        return [np.concatenate([a, b]) for a in seeds0 for b in seeds1]

    def params_dict(self) -> dict:
        return {"q1": self.q1, "q3": self.q3, "pbar": self.pbar,
                "pbar1": self.pbar1, "weights0": list(self.weights0),
                "weights1": list(self.weights1), "n0": self.n0, "n1": self.n1}


@dataclass(frozen=True)
class IlwSystem(_MultiplicativeSystem):
    """ILW Bethe equations in shifted variables.

    For each root: e^(2 tau) prod_s (t_i - v_s)/(t_i - v_s - 1) times the
    product over all roots of
    (t_i - t_j - 1)(t_i - t_j + r)(t_i - t_j - r + 1) /
    ((t_i - t_j + 1)(t_i - t_j - r)(t_i - t_j + r - 1)) equals -1.
    The self factor contributes the constant -1.
    """

    r: complex
    tau: complex
    shifts: tuple[complex, complex]
    n_roots: int

    label = "ilw"

    @property
    def group_sizes(self) -> tuple[int, ...]:
        return (self.n_roots,)

    @property
    def scale(self) -> float:
        return max(abs(complex(self.r)), max(abs(complex(s)) for s in self.shifts), 1.0)

    def _num_den(self, t: np.ndarray):
        r = complex(self.r)
        twist = cmath.exp(2.0 * complex(self.tau))
        v = np.asarray(self.shifts, dtype=complex)
        num = np.full(len(t), twist, dtype=complex)
        den = np.ones(len(t), dtype=complex)
        for i, ti in enumerate(t):
            d = ti - t
            num[i] *= np.prod(ti - v) * np.prod((d - 1.0) * (d + r) * (d - r + 1.0))
            den[i] *= np.prod(ti - v - 1.0) * np.prod((d + 1.0) * (d - r) * (d + r - 1.0))
        return num, den

    def pole_distance(self, x: np.ndarray) -> float:
        r = complex(self.r)
        t = np.asarray(x, dtype=complex)
        v = np.asarray(self.shifts, dtype=complex)
        dists = []
        for i, ti in enumerate(t):
            dists.append(np.min(np.abs(ti - v - 1.0)))
            others = np.delete(t, i)
            if len(others):
                d = ti - others
                dists.append(np.min(np.abs(d + 1.0)))
                dists.append(np.min(np.abs(d - r)))
                dists.append(np.min(np.abs(d + r - 1.0)))
        return float(min(dists))

    def seed_center(self) -> complex:
        return complex(np.mean(np.asarray(self.shifts, dtype=complex)))

    def structured_seeds(self) -> list:
        """String seeds anchored at both twist regimes.

        Family A sits at v_j + (a-1) r - (b-1)(r-1): the scaling limit of
        the toroidal string positions under t = 1 + eps*ttilde.  Families
        B+/B- mirror the layout around the pole shift v_j + 1 (the small
        twist side), where the ascending chains live.  Several jitter
        magnitudes per pattern; heuristic starts, validated by the counts.
        """
        r = complex(self.r)
        seeds = []
        patterns = list(_multi_partitions(self.n_roots, len(self.shifts)))
        for salt, lams in enumerate(patterns):
            layouts = ([], [], [])
            for j, lam in enumerate(lams):
                v = complex(self.shifts[j])
                for a, b in nodes(lam):
                    layouts[0].append(v + (a - 1) * r - (b - 1) * (r - 1.0))
                    layouts[1].append(v + 1.0 + (a - 1) * r + (b - 1) * (r - 1.0))
                    layouts[2].append(v + 1.0 + (a - 1) * r - (b - 1) * (r - 1.0))
            for fam, coords in enumerate(layouts):
                for k, mag in enumerate((1e-3, 0.08, 0.2)):
                    seeds.append(_perturb(coords, mag,
                                          salt + len(patterns) * (3 * fam + k)))
        return seeds

    def seed_scale(self) -> float:
        reach = max(abs(complex(s)) for s in self.shifts) + 1.0
        step = max(abs(complex(self.r)), abs(complex(self.r) - 1.0), 1.0)
        return max(self.scale, reach + (self.n_roots - 1) * step)

    def params_dict(self) -> dict:
        return {"r": self.r, "tau": self.tau,
                "shifts": list(self.shifts), "n_roots": self.n_roots}


@dataclass(frozen=True)
class AffineGaudinSystem(BetheSystem):
    """Additive Gaudin-type equations for two root groups s and t."""

    r: complex
    pihat: complex
    v: complex
    n0: int
    n1: int

    label = "affine_gaudin"

    @property
    def group_sizes(self) -> tuple[int, ...]:
        return (self.n0, self.n1)

    @property
    def scale(self) -> float:
        return max(abs(complex(self.v)), 1.0)

    def _equation_parts(self, x: np.ndarray):
        """Per equation: numerators and denominators of the simple poles."""
        x = np.asarray(x, dtype=complex)
        r, ph, v = complex(self.r), complex(self.pihat), complex(self.v)
        s_roots, t_roots = x[:self.n0], x[self.n0:]
        parts = []
        for i, si in enumerate(s_roots):
            others = np.delete(s_roots, i)
            nums = np.concatenate([[r - ph - 2.0, 1.0],
                                   np.full(len(others), -2.0),
                                   np.full(len(t_roots), 2.0)]).astype(complex)
            dens = np.concatenate([[si, si - v], si - others, si - t_roots])
            parts.append((nums, dens))
        for j, tj in enumerate(t_roots):
            others = np.delete(t_roots, j)
            nums = np.concatenate([[ph - 1.0],
                                   np.full(len(others), -2.0),
                                   np.full(len(s_roots), 2.0)]).astype(complex)
            dens = np.concatenate([[tj], tj - others, tj - s_roots])
            parts.append((nums, dens))
        return parts

    def _equation_terms(self, x: np.ndarray) -> list[np.ndarray]:
        with np.errstate(divide="ignore", invalid="ignore"):
            return [nums / dens for nums, dens in self._equation_parts(x)]

    def residual_raw(self, x: np.ndarray) -> np.ndarray:
        return _cleared_rows(self._equation_parts(x))

    def residual(self, x: np.ndarray) -> np.ndarray:
        # sums normalized by the dominant term: a bare |sum| tends to zero
        # as roots drift to infinity (every term decays like 1/x), which
        # would certify escape configurations instead of rejecting them
        if self.pole_distance(np.asarray(x, dtype=complex)) < 1e-300:
            raise BethePoleError("residual evaluated on a pole locus")
        rows = self._equation_terms(x)
        return np.asarray(
            [np.sum(row) / max(np.max(np.abs(row)), 1e-300) for row in rows],
            dtype=complex)

    def pole_distance(self, x: np.ndarray) -> float:
        x = np.asarray(x, dtype=complex)
        v = complex(self.v)
        s_roots, t_roots = x[:self.n0], x[self.n0:]
        dists = [float(np.min(np.abs(x)))] if len(x) else [np.inf]
        for grp in (s_roots, t_roots):
            for i, xi in enumerate(grp):
                others = np.delete(grp, i)
                if len(others):
                    dists.append(float(np.min(np.abs(xi - others))))
        if len(s_roots):
            dists.append(float(np.min(np.abs(s_roots - v))))
        for si in s_roots:
            if len(t_roots):
                dists.append(float(np.min(np.abs(si - t_roots))))
        return float(min(dists))

    def seed_center(self) -> complex:
        r = complex(self.r)
        return complex(self.v) * (r - 1.0) / r

    def _anchor_seed_base(self) -> complex:
        r, v = complex(self.r), complex(self.v)
        s0 = (r - 1.0) / r * v
        return s0 if abs(s0) > 1e-12 else complex(self.scale)

    def structured_seeds(self) -> list:
        """Closed-form anchors plus the monodromy orbit of the ground chain.

        The system is covariant under scaling all roots with v, so the
        orbit is computed on the normalized v = 1 system (where the real
        interlaced ground chain lives) and scaled back.  Monodromy needs
        real r and pihat; otherwise only the anchors remain and the
        generic annulus sweep takes over.
        """
        ph = complex(self.pihat)
        s0 = self._anchor_seed_base()
        t0 = s0 * (ph - 1.0) / (ph + 1.0) if abs(ph + 1.0) > 1e-9 else 0.5 * s0
        seeds = []
        for salt in range(3):
            coords = [s0 * (1.0 + 0.45 * k) for k in range(self.n0)]
            coords += [t0 * (1.0 + 0.45 * k) for k in range(self.n1)]
            seeds.append(_perturb(coords, 0.05 * (salt + 1), salt))
        if _near_real(self.r) and _near_real(self.pihat) and abs(complex(self.v)):
            r0, ph0 = complex(self.r).real, complex(self.pihat).real
            if abs(r0) > 1e-12:
                def factory(r_, ph_):
                    if r_ is None:
                        r_, ph_ = r0, ph0
                    return AffineGaudinSystem(r_, ph_, 1.0, self.n0, self.n1)

                beta = (r0 - 1.0) / r0
                orbit = _monodromy_orbit(factory, self.n0, self.n1,
                                         r0, ph0, beta)
                seeds += [complex(self.v) * x for x in orbit]
        return seeds

    def params_dict(self) -> dict:
        return {"r": self.r, "pihat": self.pihat, "v": self.v,
                "n0": self.n0, "n1": self.n1}


@dataclass(frozen=True)
class IlwGaudinHybridSystem(BetheSystem):
    """Gaudin-type equations whose cross terms split by e^(+-tau).

    At tau = 0 the split cross terms merge and the system coincides with
    the affine Gaudin one, which is what the continuation check uses.
    """

    r: complex
    pihat: complex
    v: complex
    tau: complex
    n0: int
    n1: int

    label = "ilw_gaudin_hybrid"

    @property
    def group_sizes(self) -> tuple[int, ...]:
        return (self.n0, self.n1)

    @property
    def scale(self) -> float:
        return max(abs(complex(self.v)), 1.0)

    def _equation_parts(self, x: np.ndarray):
        x = np.asarray(x, dtype=complex)
        r, ph, v = complex(self.r), complex(self.pihat), complex(self.v)
        ep = cmath.exp(complex(self.tau))
        em = cmath.exp(-complex(self.tau))
        s_roots, t_roots = x[:self.n0], x[self.n0:]
        parts = []
        for i, si in enumerate(s_roots):
            others = np.delete(s_roots, i)
            nums = np.concatenate([[r - ph - 2.0, 1.0],
                                   np.full(len(others), -2.0),
                                   np.full(2 * len(t_roots), 1.0)]).astype(complex)
            dens = np.concatenate([[si, si - v], si - others,
                                   si - ep * t_roots, si - em * t_roots])
            parts.append((nums, dens))
        for j, tj in enumerate(t_roots):
            others = np.delete(t_roots, j)
            nums = np.concatenate([[ph - 1.0],
                                   np.full(len(others), -2.0),
                                   np.full(2 * len(s_roots), 1.0)]).astype(complex)
            dens = np.concatenate([[tj], tj - others,
                                   tj - ep * s_roots, tj - em * s_roots])
            parts.append((nums, dens))
        return parts

    def _equation_terms(self, x: np.ndarray) -> list[np.ndarray]:
        with np.errstate(divide="ignore", invalid="ignore"):
            return [nums / dens for nums, dens in self._equation_parts(x)]

    def residual_raw(self, x: np.ndarray) -> np.ndarray:
        return _cleared_rows(self._equation_parts(x))

    def residual(self, x: np.ndarray) -> np.ndarray:
        # same dominant-term normalization as the affine Gaudin system
        if self.pole_distance(np.asarray(x, dtype=complex)) < 1e-300:
            raise BethePoleError("residual evaluated on a pole locus")
        rows = self._equation_terms(x)
        return np.asarray(
            [np.sum(row) / max(np.max(np.abs(row)), 1e-300) for row in rows],
            dtype=complex)

    def pole_distance(self, x: np.ndarray) -> float:
        x = np.asarray(x, dtype=complex)
        v = complex(self.v)
        ep = cmath.exp(complex(self.tau))
        em = cmath.exp(-complex(self.tau))
        s_roots, t_roots = x[:self.n0], x[self.n0:]
        dists = [float(np.min(np.abs(x)))] if len(x) else [np.inf]
        for grp in (s_roots, t_roots):
            for i, xi in enumerate(grp):
                others = np.delete(grp, i)
                if len(others):
                    dists.append(float(np.min(np.abs(xi - others))))
        if len(s_roots):
            dists.append(float(np.min(np.abs(s_roots - v))))
        for si in s_roots:
            if len(t_roots):
                dists.append(float(np.min(np.abs(si - ep * t_roots))))
                dists.append(float(np.min(np.abs(si - em * t_roots))))
        for tj in t_roots:
            if len(s_roots):
                dists.append(float(np.min(np.abs(tj - ep * s_roots))))
                dists.append(float(np.min(np.abs(tj - em * s_roots))))
        return float(min(dists))

    def seed_center(self) -> complex:
        r = complex(self.r)
        return complex(self.v) * (r - 1.0) / r

    def structured_seeds(self) -> list:
        # ground chain and monodromy carry over at fixed real tau; the
        # split cross poles keep the v-scaling covariance intact
        base = AffineGaudinSystem(self.r, self.pihat, self.v, self.n0, self.n1)
        s0 = base._anchor_seed_base()
        seeds = [_perturb(s0 * np.ones(self.dimension), 0.3, salt)
                 for salt in range(3)]
        if (_near_real(self.r) and _near_real(self.pihat)
                and _near_real(self.tau) and abs(complex(self.v))):
            r0, ph0 = complex(self.r).real, complex(self.pihat).real
            tau0 = complex(self.tau).real
            if abs(r0) > 1e-12:
                def factory(r_, ph_):
                    if r_ is None:
                        r_, ph_ = r0, ph0
                    return IlwGaudinHybridSystem(r_, ph_, 1.0, tau0,
                                                 self.n0, self.n1)

                beta = (r0 - 1.0) / r0
                orbit = _monodromy_orbit(factory, self.n0, self.n1,
                                         r0, ph0, beta)
                seeds += [complex(self.v) * x for x in orbit]
        return seeds

    def params_dict(self) -> dict:
        return {"r": self.r, "pihat": self.pihat, "v": self.v,
                "tau": self.tau, "n0": self.n0, "n1": self.n1}


def residual(system: BetheSystem, roots) -> np.ndarray:
    """Certified residual vector of a root configuration."""
    return system.residual(np.asarray(roots, dtype=complex))


# -- solving ---------------------------------------------------------------------

@dataclass(frozen=True)
class BetheSolution:
    """One root configuration with its certificate."""

    groups: tuple[tuple[complex, ...], ...]
    residual_norm: float
    admissible: bool
    reason: str = "admissible"

    @property
    def roots(self) -> tuple[complex, ...]:
        return tuple(v for grp in self.groups for v in grp)


@dataclass(frozen=True)
class SolveOptions:
    tol: float = 1e-10
    seeds_per_root: int = 200
    max_iter: int = 60
    dedup_factor: float = 10.0
    expected_count: int | None = None


@dataclass(frozen=True)
class BetheSolveResult:
    solutions: tuple[BetheSolution, ...]
    rejected: tuple[BetheSolution, ...]
    seeds_tried: int
    options: SolveOptions

    @property
    def count(self) -> int:
        return len(self.solutions)


def _same_configuration(a: np.ndarray, b: np.ndarray, group_sizes, tol: float) -> bool:
    """Greedy multiset match per group, robust against sort-order ties."""
    at = 0
    for size in group_sizes:
        used = [False] * size
        for va in a[at:at + size]:
            best, best_d = -1, tol
            for idx in range(size):
                if used[idx]:
                    continue
                d = abs(va - b[at + idx])
                if d <= best_d:
                    best, best_d = idx, d
            if best < 0:
                return False
            used[best] = True
        at += size
    return True


def _polish(system: BetheSystem, x: np.ndarray, tol: float, max_iter: int = 15):
    """Undeflated Newton until the certified residual meets tol."""
    x = np.asarray(x, dtype=complex).copy()
    norm = np.inf
    for _ in range(max_iter):
        try:
            norm = float(np.max(np.abs(system.residual(x))))
        except (BethePoleError, ArithmeticError):
            return x, np.inf, False
        if not np.isfinite(norm):
            return x, norm, False
        if norm <= tol:
            return x, norm, True
        jac = numerics.fd_jacobian(system.residual_raw, x)
        f = system.residual_raw(x)
        if not (np.all(np.isfinite(jac)) and np.all(np.isfinite(f))):
            return x, norm, False
        try:
            step = np.linalg.solve(jac, -f)
        except np.linalg.LinAlgError:
            return x, norm, False
        x = x + step
    try:
        norm = float(np.max(np.abs(system.residual(x))))
    except (BethePoleError, ArithmeticError):
        return x, np.inf, False
    return x, norm, norm <= tol


def _separation(system: BetheSystem, x: np.ndarray) -> float:
    at = 0
    best = np.inf
    for size in system.group_sizes:
        grp = x[at:at + size]
        for i in range(size):
            for j in range(i + 1, size):
                best = min(best, abs(grp[i] - grp[j]))
        at += size
    return float(best)


def solve_all(system: BetheSystem, options: SolveOptions = SolveOptions()) -> BetheSolveResult:
    """Deterministic multistart Newton with deflation and admissibility filter.

    Seeds: structured (partition strings, closed-form anchors) first, then a
    low-discrepancy annulus sweep of seeds_per_root * dimension points.
    Each convergent polish is deduplicated against previous finds (within
    dedup_factor * tol per coordinate, greedy multiset matching per group)
    and certified: residual <= tol, pairwise separation and pole distance
    above their margins.  Inadmissible configurations are reported, and all
    finds (admissible or not) deflate subsequent searches.
    """
    if system.dimension == 0:
        empty = BetheSolution((tuple(),) * len(system.group_sizes), 0.0, True)
        return BetheSolveResult((empty,), (), 0, options)
    seeds = list(system.structured_seeds())
    seeds += _annulus_seeds(system.dimension,
                            options.seeds_per_root * system.dimension,
                            system.seed_center(), system.seed_scale())
    delta_sep = SEPARATION_FACTOR * system.scale
    delta_pole = POLE_FACTOR * system.scale
    dedup_tol = options.dedup_factor * options.tol

    base = numerics.NewtonProblem(system.dimension, system.residual_raw)
    attractors: list[np.ndarray] = []
    solutions: list[BetheSolution] = []
    rejected: list[BetheSolution] = []
    seeds_tried = 0
    for seed in seeds:
        seeds_tried += 1
        if (options.expected_count is not None
                and len(solutions) >= options.expected_count):
            break
        problem = numerics.deflate(base, attractors) if attractors else base
        res = numerics.newton_solve(problem, seed, tol=1e-8,
                                    max_iter=options.max_iter)
        if not res.converged:
            continue
        x, norm, ok = _polish(system, res.x, options.tol)
        if not ok:
            continue
        x = system.canonicalize(x)
        if any(_same_configuration(x, known, system.group_sizes, dedup_tol)
               for known in attractors):
            continue
        attractors.append(x)
        sep = _separation(system, x)
        pole = system.pole_distance(x)
        if sep <= delta_sep:
            rejected.append(BetheSolution(system.groups(x), norm, False,
                                          "coincident roots (separation %.3g)" % sep))
        elif pole <= delta_pole:
            rejected.append(BetheSolution(system.groups(x), norm, False,
                                          "pole collision (distance %.3g)" % pole))
        else:
            solutions.append(BetheSolution(system.groups(x), norm, True))
    return BetheSolveResult(tuple(solutions), tuple(rejected), seeds_tried, options)


# -- continuation ------------------------------------------------------------------

@dataclass(frozen=True)
class ContinuationPath:
    start: tuple[complex, ...]
    end: tuple[complex, ...] | None
    success: bool
    steps_used: int
    reason: str = ""
    merged_with: int | None = None


def continuation(system_at: Callable[[float], BetheSystem], starts,
                 steps: int = 32, tol: float = 1e-10,
                 max_halvings: int = 12) -> list[ContinuationPath]:
    """Predictor-corrector tracking of root configurations along sigma in [0, 1].

    Euler predictor from the finite-difference sigma-derivative, Newton
    corrector at fixed sigma, step halving on corrector failure (growing
    back after successes).  Endpoints closer than the separation margin of
    the final system are flagged as merged.
    """
    results = []
    final_system = system_at(1.0)
    for start in starts:
        x = np.asarray(start, dtype=complex).copy()
        sys0 = system_at(0.0)
        x, norm, ok = _polish(sys0, x, tol)
        if not ok:
            results.append(ContinuationPath(tuple(start), None, False, 0,
                                            "start does not solve the initial system"))
            continue
        sigma = 0.0
        h = 1.0 / steps
        h_min = 1.0 / (steps * 2 ** max_halvings)
        used = 0
        failed = None
        while sigma < 1.0 - 1e-14:
            trial = min(sigma + h, 1.0)
            sys_now = system_at(sigma)
            sys_next = system_at(trial)
            # Euler predictor: dx = -J^{-1} (F_next - F_now) at fixed x
            x_pred = x
            try:
                jac = numerics.fd_jacobian(sys_now.residual_raw, x)
                df = sys_next.residual_raw(x) - sys_now.residual_raw(x)
                if np.all(np.isfinite(jac)) and np.all(np.isfinite(df)):
                    x_pred = x + np.linalg.solve(jac, -df)
            except np.linalg.LinAlgError:
                pass
            x_new, norm, ok = _polish(sys_next, x_pred, tol)
            used += 1
            if ok:
                sigma = trial
                x = x_new
                h = min(h * 1.5, 1.0 / steps * 4.0)
            else:
                h *= 0.5
                if h < h_min:
                    failed = "step underflow at sigma=%.6f" % sigma
                    break
        if failed:
            results.append(ContinuationPath(tuple(start), None, False, used, failed))
        else:
            x = final_system.canonicalize(x)
            results.append(ContinuationPath(tuple(start), tuple(x), True, used, "reached sigma=1"))
    # flag merged endpoints
    margin = SEPARATION_FACTOR * final_system.scale
    flagged = list(results)
    for i in range(len(flagged)):
        if not flagged[i].success:
            continue
        for j in range(i):
            if not flagged[j].success:
                continue
            a = np.asarray(flagged[i].end, dtype=complex)
            b = np.asarray(flagged[j].end, dtype=complex)
            if len(a) == len(b) and float(np.max(np.abs(a - b))) < margin:
                flagged[i] = ContinuationPath(flagged[i].start, flagged[i].end,
                                              True, flagged[i].steps_used,
                                              "merged with path %d" % j, j)
    return flagged
