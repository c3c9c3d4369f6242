"""Dense linear algebra for the solver cores.

The stacked node/loop systems mix O(1) continuity rows with loop rows whose
derivative entries reach 1e9, so every solve equilibrates rows before the
factorization.  Systems here are tiny (one row per pipe), dense storage is
deliberate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# A pivot below this fraction of its (equilibrated) row scale counts as zero.
PIVOT_TOL = 1e-12


class SingularSystemError(ValueError):
    """Raised when elimination meets a pivot indistinguishable from zero."""


@dataclass
class DenseSystem:
    matrix: np.ndarray
    rhs: np.ndarray

    def __init__(self, matrix, rhs):
        self.matrix = np.asarray(matrix, dtype=float)
        self.rhs = np.asarray(rhs, dtype=float)


def solve_linear(system: DenseSystem) -> np.ndarray:
    """Solve A·x = b by row-equilibrated LU with partial pivoting.

    The solution satisfies a small-residual bound (inf-norm residual below
    1e-8·(1 + |b|_inf) for the well-conditioned systems in scope); no
    explicit inverse is ever formed.
    """
    a = np.array(system.matrix, dtype=float)
    b = np.array(system.rhs, dtype=float)
    n = _check_square(a, b)

    scale = np.max(np.abs(a), axis=1)
    if np.any(scale == 0.0):
        row = int(np.argmin(scale))
        raise SingularSystemError(f"row {row} of the system matrix is zero")
    a /= scale[:, None]
    b /= scale

    for k in range(n):
        pivot_row = k + int(np.argmax(np.abs(a[k:, k])))
        if abs(a[pivot_row, k]) < PIVOT_TOL:
            raise SingularSystemError(
                f"singular system: pivot {a[pivot_row, k]:.3e} in column {k}")
        if pivot_row != k:
            a[[k, pivot_row]] = a[[pivot_row, k]]
            b[[k, pivot_row]] = b[[pivot_row, k]]
        factors = a[k + 1:, k] / a[k, k]
        a[k + 1:, k:] -= np.outer(factors, a[k, k:])
        b[k + 1:] -= factors * b[k]

    x = np.empty(n)
    for k in range(n - 1, -1, -1):
        x[k] = (b[k] - a[k, k + 1:] @ x[k + 1:]) / a[k, k]
    return x


def condition_estimate(system: DenseSystem) -> float:
    """1-norm condition number of the matrix; diagnostic only."""
    a = np.asarray(system.matrix, dtype=float)
    _check_square(a, np.zeros(a.shape[0]))
    try:
        return float(np.linalg.cond(a, 1))
    except np.linalg.LinAlgError:
        return float("inf")


def _check_square(a: np.ndarray, b: np.ndarray) -> int:
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"matrix must be square, got shape {a.shape}")
    if b.shape != (a.shape[0],):
        raise ValueError(
            f"rhs length {b.shape} does not match matrix size {a.shape[0]}")
    if not (np.isfinite(a).all() and np.isfinite(b).all()):
        raise ValueError("system contains non-finite entries")
    return a.shape[0]
