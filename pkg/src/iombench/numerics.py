"""Dense complex linear algebra and root-finding primitives.

Everything downstream (operator spectra, Bethe solvers, continuation) sits
on the small toolkit in this module: an eigensolver with a hard dimension
cap, damped Newton iteration with finite-difference Jacobians, norm
deflation against known roots, least-squares affine calibration, and the
project-wide multiset comparison convention (minimum-cost pairing of the
two value lists, absolute-plus-relative tolerance on the worst pair).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

#: hard cap on eigenproblem dimension; level spaces here stay far below it.
MAX_EIGEN_DIM = 512

#: default tolerances of the multiset comparison convention.
DEFAULT_ATOL = 1e-8
DEFAULT_RTOL = 1e-8


class EigenSolveError(RuntimeError):
    pass


class DegenerateFitError(ValueError):
    pass


def eigenvalues(matrix: np.ndarray) -> np.ndarray:
    """All eigenvalues of a square complex matrix, multiplicities included.

    LAPACK's Hessenberg-plus-shifted-QR path does the work; the dimension is
    capped at MAX_EIGEN_DIM and non-convergence is signalled, never silently
    truncated.
    """
    m = np.asarray(matrix, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise EigenSolveError("matrix must be square, got shape %r" % (m.shape,))
    if m.shape[0] > MAX_EIGEN_DIM:
        raise EigenSolveError("dimension %d exceeds cap %d" % (m.shape[0], MAX_EIGEN_DIM))
    if m.shape[0] == 0:
        return np.zeros(0, dtype=complex)
    try:
        return np.linalg.eigvals(m)
    except np.linalg.LinAlgError as exc:
        raise EigenSolveError("eigenvalue iteration failed: %s" % exc) from exc


def sort_complex(values: Sequence[complex]) -> np.ndarray:
    """Canonical multiset order: ascending real part, then imaginary part."""
    arr = np.asarray(values, dtype=complex)
    order = np.lexsort((arr.imag, arr.real))
    return arr[order]


def assignment_pairs(a: Sequence[complex], b: Sequence[complex]):
    """Minimum-total-distance pairing of two equal-length complex lists.

    Canonical sorting alone is unstable when real parts tie to rounding
    (conjugate pairs swap partners), so the pairing is a small assignment
    problem on the distance matrix.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    cost = np.abs(a[:, None] - b[None, :])
    rows, cols = linear_sum_assignment(cost)
    return a[rows], b[cols]


def multiset_max_deviation(a: Sequence[complex], b: Sequence[complex]) -> float:
    """Largest paired distance under the minimum-cost pairing (lengths must match)."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if len(a) != len(b):
        raise ValueError("multisets differ in size: %d vs %d" % (len(a), len(b)))
    if len(a) == 0:
        return 0.0
    ap, bp = assignment_pairs(a, b)
    return float(np.max(np.abs(ap - bp)))


def multiset_close(a, b, atol: float = DEFAULT_ATOL, rtol: float = DEFAULT_RTOL) -> bool:
    """Paired |a_i - b_i| <= atol + rtol*max(1, |b_i|) under minimum-cost pairing."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if len(a) != len(b):
        return False
    if len(a) == 0:
        return True
    ap, bp = assignment_pairs(a, b)
    bound = atol + rtol * np.maximum(1.0, np.abs(bp))
    return bool(np.all(np.abs(ap - bp) <= bound))


# -- Newton iteration ---------------------------------------------------------

@dataclass
class NewtonProblem:
    """A square nonlinear system F(x) = 0 over complex vectors.

    jacobian may be None, in which case central finite differences with a
    relative step of 1e-7 per coordinate are used.
    """

    dimension: int
    residual: Callable[[np.ndarray], np.ndarray]
    jacobian: Callable[[np.ndarray], np.ndarray] | None = None


@dataclass
class NewtonResult:
    x: np.ndarray
    converged: bool
    residual_norm: float
    iterations: int
    reason: str = ""
    history: list = field(default_factory=list)


FD_RELATIVE_STEP = 1e-7


def fd_jacobian(residual: Callable, x: np.ndarray) -> np.ndarray:
    """Central-difference Jacobian, one real step per coordinate."""
    n = len(x)
    jac = np.zeros((n, n), dtype=complex)
    for i in range(n):
        h = FD_RELATIVE_STEP * max(1.0, abs(x[i]))
        xp = x.copy()
        xm = x.copy()
        xp[i] += h
        xm[i] -= h
        jac[:, i] = (residual(xp) - residual(xm)) / (2.0 * h)
    return jac


MAX_HALVINGS = 20
JACOBIAN_COND_LIMIT = 1e14


def newton_solve(problem: NewtonProblem, seed: Sequence[complex],
                 tol: float = 1e-10, max_iter: int = 50) -> NewtonResult:
    """Damped Newton iteration from a single seed.

    Full steps are halved (at most MAX_HALVINGS times) whenever the residual
    max-norm fails to decrease.  Failure modes: ill-conditioned Jacobian,
    stalled line search, iteration budget, or a residual evaluation raising.
    """
    x = np.asarray(seed, dtype=complex).copy()
    if x.shape != (problem.dimension,):
        raise ValueError("seed has dimension %d, expected %d"
                         % (len(x), problem.dimension))
    history = []
    try:
        f = np.asarray(problem.residual(x), dtype=complex)
    except (ArithmeticError, ValueError) as exc:
        return NewtonResult(x, False, np.inf, 0, "residual raised: %s" % exc, history)
    norm = float(np.max(np.abs(f))) if len(f) else 0.0
    history.append(norm)
    for it in range(1, max_iter + 1):
        if norm <= tol:
            return NewtonResult(x, True, norm, it - 1, "converged", history)
        if not np.isfinite(norm):
            return NewtonResult(x, False, norm, it - 1, "residual not finite", history)
        if problem.jacobian is not None:
            jac = np.asarray(problem.jacobian(x), dtype=complex)
        else:
            jac = fd_jacobian(problem.residual, x)
        if not np.all(np.isfinite(jac)):
            return NewtonResult(x, False, norm, it - 1, "jacobian not finite", history)
        if np.linalg.cond(jac) > JACOBIAN_COND_LIMIT:
            return NewtonResult(x, False, norm, it - 1, "jacobian ill-conditioned", history)
        step = np.linalg.solve(jac, -f)
        t = 1.0
        accepted = False
        for _ in range(MAX_HALVINGS + 1):
            try:
                f_new = np.asarray(problem.residual(x + t * step), dtype=complex)
                norm_new = float(np.max(np.abs(f_new)))
            except (ArithmeticError, ValueError):
                norm_new = np.inf
            if np.isfinite(norm_new) and norm_new < norm:
                x = x + t * step
                f, norm = f_new, norm_new
                accepted = True
                break
            t *= 0.5
        history.append(norm)
        if not accepted:
            return NewtonResult(x, norm <= tol, norm, it, "line search stalled", history)
    converged = norm <= tol
    return NewtonResult(x, converged, norm, max_iter,
                        "converged" if converged else "iteration budget exhausted",
                        history)


DEFLATION_FLOOR = 1e-8


def deflate(problem: NewtonProblem, known_roots: Sequence[Sequence[complex]],
            floor: float = DEFLATION_FLOOR) -> NewtonProblem:
    """Divide the residual by distances to known roots so Newton avoids them.

    Each factor is clip(||x - x_k||_inf, floor, 1): capping at 1 keeps the
    deflation a purely local repulsion, so far from every known root the
    deflated residual is never smaller than the raw one (a growing product
    of distances would otherwise fake convergence at arbitrary points).
    The factor is real, so the deflated map is only approximately
    holomorphic; its finite-difference Jacobian still repels the iteration
    from solved basins.
    """
    roots = [np.asarray(r, dtype=complex) for r in known_roots]

    def deflated(x):
        f = np.asarray(problem.residual(x), dtype=complex)
        scale = 1.0
        for r in roots:
            scale *= min(max(float(np.max(np.abs(x - r))), floor), 1.0)
        return f / scale

    return NewtonProblem(problem.dimension, deflated, None)


# -- affine calibration -------------------------------------------------------

def affine_fit(a: Sequence[complex], b: Sequence[complex]):
    """Least-squares complex (scale, offset) with scale*a + offset ~ b.

    Both lists are canonically sorted first (the pairing convention for all
    spectrum comparisons).  Returns (scale, offset, rms_residual).  A
    constant a-list cannot determine a scale and is rejected.
    """
    a = sort_complex(a)
    b = sort_complex(b)
    if len(a) != len(b):
        raise DegenerateFitError("length mismatch: %d vs %d" % (len(a), len(b)))
    if len(a) < 2:
        raise DegenerateFitError("need at least two points for an affine fit")
    if float(np.max(np.abs(a - np.mean(a)))) < 1e-300:
        raise DegenerateFitError("constant abscissa cannot determine a scale")
    design = np.column_stack([a, np.ones(len(a), dtype=complex)])
    coef, *_ = np.linalg.lstsq(design, b, rcond=None)
    scale, offset = coef
    resid = design @ coef - b
    rms = float(np.sqrt(np.mean(np.abs(resid) ** 2)))
    return complex(scale), complex(offset), rms
