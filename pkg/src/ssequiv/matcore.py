"""Dense real-matrix helpers.

Matrices are plain 2-D ``float64`` numpy arrays. Vectorization is
column-stacking, the convention under which

    vec(X @ Y) == kron(Y.T, I) @ vec(X) == kron(I, X) @ vec(Y)

holds; everything downstream relies on it.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import (
    DimensionMismatch,
    NonFiniteEntries,
    NumericalBreakdown,
    SingularMatrix,
    SizeCapExceeded,
)

__all__ = [
    "Tolerances",
    "DEFAULT_TOLERANCES",
    "MAX_DENSE_DIM",
    "as_matrix",
    "kron",
    "vec",
    "unvec",
    "matmul",
    "transpose",
    "identity",
    "singular_values",
    "rank_cutoff",
    "numerical_rank",
    "nullspace_basis",
    "solve_linear",
    "invert",
]

# n_x <= 64 means the n_x^2 x n_x^2 displacement matrix stays at most 4096 square.
MAX_DENSE_DIM = 4096


@dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds.

    Attributes:
        rank_tol: Absolute singular-value cutoff. ``None`` selects the
            scaled default ``max(rows, cols) * eps * s_max``.
        residual_tol: Relative Frobenius-norm acceptance threshold.
    """

    rank_tol: Optional[float] = None
    residual_tol: float = 1e-8

    def __post_init__(self):
        for name in ("rank_tol", "residual_tol"):
            value = getattr(self, name)
            if value is None and name == "rank_tol":
                continue
            if not np.isfinite(value) or value < 0:
                raise ValueError(f"{name} must be finite and >= 0, got {value!r}")


DEFAULT_TOLERANCES = Tolerances()


def as_matrix(m, name="matrix"):
    """Coerce ``m`` to a finite 2-D float64 array.

    Scalars become 1x1 and 1-D input becomes a column vector.
    """
    arr = np.array(m, dtype=np.float64)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    elif arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    elif arr.ndim != 2:
        raise DimensionMismatch(f"{name} must be 2-D, got {arr.ndim} dimensions")
    if arr.size == 0:
        raise DimensionMismatch(f"{name} must be nonempty, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NonFiniteEntries(f"{name} contains NaN or Inf entries")
    return arr


def _check_cap(rows, cols, cap):
    if rows > cap or cols > cap:
        raise SizeCapExceeded(rows, cols, cap)


def kron(a, b, cap=MAX_DENSE_DIM):
    """Kronecker product; block ``(i, j)`` of the result is ``a[i, j] * b``."""
    a = as_matrix(a, "a")
    b = as_matrix(b, "b")
    _check_cap(a.shape[0] * b.shape[0], a.shape[1] * b.shape[1], cap)
    return np.kron(a, b)


def vec(m):
    """Column-stacking vectorization, returned as an ``(rows*cols, 1)`` array."""
    m = as_matrix(m)
    return m.reshape(-1, 1, order="F").copy()


def unvec(v, rows, cols):
    """Inverse of :func:`vec`."""
    v = np.asarray(v, dtype=np.float64)
    if v.size != rows * cols:
        raise DimensionMismatch(f"cannot reshape {v.size} entries into {rows}x{cols}")
    return v.reshape(rows, cols, order="F").copy()


def matmul(a, b):
    a = as_matrix(a, "a")
    b = as_matrix(b, "b")
    if a.shape[1] != b.shape[0]:
        raise DimensionMismatch(f"inner dimensions differ: {a.shape} @ {b.shape}")
    return a @ b


def transpose(a):
    return as_matrix(a).T.copy()


def identity(n):
    if n < 1:
        raise DimensionMismatch(f"identity size must be positive, got {n}")
    return np.eye(n)


def singular_values(m):
    try:
        return np.linalg.svd(m, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalBreakdown(f"SVD did not converge: {exc}") from exc


def rank_cutoff(s, shape, tol=DEFAULT_TOLERANCES, scale=None):
    """Singular values strictly above the returned value count toward the rank.

    ``scale`` raises the reference magnitude above the largest singular value,
    for matrices formed as differences whose own norm may be pure roundoff.
    """
    if tol.rank_tol is not None:
        return tol.rank_tol
    smax = s[0] if len(s) else 0.0
    if scale is not None:
        smax = max(smax, scale)
    return max(shape) * np.finfo(np.float64).eps * smax


def numerical_rank(m, tol=DEFAULT_TOLERANCES, scale=None):
    m = as_matrix(m)
    s = singular_values(m)
    return int(np.count_nonzero(s > rank_cutoff(s, m.shape, tol, scale)))


def nullspace_basis(m, tol=DEFAULT_TOLERANCES, scale=None):
    """Orthonormal basis of the right null space of ``m``.

    Returns a list of ``(cols, 1)`` column vectors; its length is
    ``cols - numerical_rank(m, tol)``. Each vector ``v`` satisfies
    ``norm(m @ v) <= rank_cutoff``.
    """
    m = as_matrix(m)
    try:
        _, s, vh = np.linalg.svd(m, full_matrices=True)
    except np.linalg.LinAlgError as exc:
        raise NumericalBreakdown(f"SVD did not converge: {exc}") from exc
    rank = int(np.count_nonzero(s > rank_cutoff(s, m.shape, tol, scale)))
    return [vh[i].reshape(-1, 1).copy() for i in range(rank, m.shape[1])]


def _condition(a):
    s = singular_values(a)
    return float(s[0] / s[-1]) if s[-1] > 0 else float("inf")


def _require_nonsingular(a, tol):
    if a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"matrix must be square, got {a.shape}")
    if numerical_rank(a, tol) < a.shape[0]:
        raise SingularMatrix(
            f"{a.shape[0]}x{a.shape[1]} matrix is singular to tolerance",
            condition=_condition(a),
        )


def solve_linear(a, rhs, tol=DEFAULT_TOLERANCES):
    """Solve ``a @ x = rhs`` for square nonsingular ``a``."""
    a = as_matrix(a, "a")
    rhs = as_matrix(rhs, "rhs")
    _require_nonsingular(a, tol)
    if rhs.shape[0] != a.shape[0]:
        raise DimensionMismatch(f"rhs has {rhs.shape[0]} rows, expected {a.shape[0]}")
    x = np.linalg.solve(a, rhs)
    residual = np.linalg.norm(a @ x - rhs)
    if residual > tol.residual_tol * max(np.linalg.norm(rhs), 1e-300):
        raise SingularMatrix("solve residual exceeds tolerance", condition=_condition(a))
    return x


def invert(a, tol=DEFAULT_TOLERANCES):
    a = as_matrix(a, "a")
    _require_nonsingular(a, tol)
    n = a.shape[0]
    inv = np.linalg.inv(a)
    if np.linalg.norm(a @ inv - np.eye(n)) > tol.residual_tol * n:
        raise SingularMatrix("inverse fails the identity check", condition=_condition(a))
    return inv
