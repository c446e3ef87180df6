"""State-space realizations, the observability test, and Markov parameters."""

from dataclasses import dataclass
from typing import List, NamedTuple

import numpy as np

from .errors import DimensionMismatch
from .matcore import DEFAULT_TOLERANCES, as_matrix, numerical_rank


@dataclass(frozen=True, eq=False)
class Realization:
    """A quadruple ``(A, B, C, D)`` with ``A`` n_x x n_x, ``B`` n_x x n_u,
    ``C`` n_y x n_x and ``D`` n_y x n_u."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray

    def __post_init__(self):
        for name in "ABCD":
            object.__setattr__(self, name, as_matrix(getattr(self, name), name))
        n_x, n_u, n_y = self.n_x, self.n_u, self.n_y
        expected = {"A": (n_x, n_x), "B": (n_x, n_u), "C": (n_y, n_x), "D": (n_y, n_u)}
        for name, shape in expected.items():
            if getattr(self, name).shape != shape:
                raise DimensionMismatch(
                    f"{name} has shape {getattr(self, name).shape}, expected {shape}"
                )

    @property
    def n_x(self):
        return self.A.shape[0]

    @property
    def n_u(self):
        return self.B.shape[1]

    @property
    def n_y(self):
        return self.C.shape[0]


class ObservabilityReport(NamedTuple):
    observability_matrix: np.ndarray
    rank: int
    observable: bool


def _check_pair(A, C):
    A = as_matrix(A, "A")
    C = as_matrix(C, "C")
    if A.shape[0] != A.shape[1]:
        raise DimensionMismatch(f"A must be square, got {A.shape}")
    if C.shape[1] != A.shape[0]:
        raise DimensionMismatch(f"C has {C.shape[1]} columns, A is {A.shape[0]}x{A.shape[0]}")
    return A, C


def observability_matrix(A, C):
    """Stack ``[C; CA; ...; CA^(n_x-1)]``."""
    A, C = _check_pair(A, C)
    blocks = [C]
    for _ in range(A.shape[0] - 1):
        blocks.append(blocks[-1] @ A)
    return np.vstack(blocks)


def is_observable(A, C, tol=DEFAULT_TOLERANCES):
    obs = observability_matrix(A, C)
    rank = numerical_rank(obs, tol)
    return ObservabilityReport(obs, rank, rank == obs.shape[1])


def markov_parameters(r: Realization, count: int) -> List[np.ndarray]:
    """Return ``[D, CB, CAB, ..., C A^(count-2) B]``."""
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    params = [r.D.copy()]
    AkB = r.B
    for _ in range(count - 1):
        params.append(r.C @ AkB)
        AkB = r.A @ AkB
    return params


def markov_equivalent(r1, r2, k=None, tol=DEFAULT_TOLERANCES):
    """Compare the first ``k`` Markov parameters of two realizations.

    Differences are measured against the largest parameter norm; when every
    parameter is below ``residual_tol`` the comparison is absolute.
    """
    deltas, scale = markov_deltas(r1, r2, k)
    bound = tol.residual_tol * (scale if scale > tol.residual_tol else 1.0)
    return all(d <= bound for d in deltas)


def markov_deltas(r1, r2, k=None):
    """Frobenius norms of the parameter differences, plus the comparison scale."""
    if (r1.n_u, r1.n_y) != (r2.n_u, r2.n_y):
        raise DimensionMismatch(
            f"input/output sizes differ: (n_u, n_y) = {(r1.n_u, r1.n_y)} vs {(r2.n_u, r2.n_y)}"
        )
    if k is None:
        k = 2 * max(r1.n_x, r2.n_x)
    p1 = markov_parameters(r1, k)
    p2 = markov_parameters(r2, k)
    scale = max(np.linalg.norm(p) for p in p1 + p2)
    return [float(np.linalg.norm(a - b)) for a, b in zip(p1, p2)], float(scale)
