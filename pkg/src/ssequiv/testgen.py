"""Seeded random instances and a brute-force oracle for testing.

The oracle solves ``T A0 = A T`` and ``C T = C0`` as one stacked
least-squares problem, without going through a kernel basis, so agreement
with :func:`ssequiv.simtransform.find_similarity` is an independent check.
"""

from dataclasses import dataclass

import numpy as np

from .errors import GenerationFailure, NotSimilarOrAmbiguous
from .matcore import DEFAULT_TOLERANCES, as_matrix, kron, numerical_rank, unvec, vec
from .realization import Realization, is_observable
from .simtransform import build_displacement_matrix, transform_realization

# Stream ids keep draws for different purposes independent under one seed.
_REALIZATION_STREAM = 0
_TRANSFORM_STREAM = 1


@dataclass(frozen=True)
class GeneratorConfig:
    seed: int
    n_x: int
    n_u: int = 1
    n_y: int = 1
    max_condition: float = 1e3
    entry_scale: float = 1.0
    max_retries: int = 1000

    def __post_init__(self):
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if min(self.n_x, self.n_u, self.n_y) < 1:
            raise ValueError("n_x, n_u, n_y must all be positive")
        if not self.max_condition > 0 or not self.entry_scale > 0:
            raise ValueError("max_condition and entry_scale must be positive")

    def rng(self, stream):
        return np.random.default_rng([self.seed, stream])


def random_observable_realization(cfg: GeneratorConfig, tol=DEFAULT_TOLERANCES) -> Realization:
    """Gaussian realization, redrawn until ``(A, C)`` passes the rank test."""
    rng = cfg.rng(_REALIZATION_STREAM)
    n_x, n_u, n_y, s = cfg.n_x, cfg.n_u, cfg.n_y, cfg.entry_scale
    for _ in range(cfg.max_retries):
        # Scaling A by 1/sqrt(n_x) keeps its spectral radius O(entry_scale).
        A = s * rng.standard_normal((n_x, n_x)) / np.sqrt(n_x)
        B = s * rng.standard_normal((n_x, n_u))
        C = s * rng.standard_normal((n_y, n_x))
        D = s * rng.standard_normal((n_y, n_u))
        if is_observable(A, C, tol).observable:
            return Realization(A, B, C, D)
    raise GenerationFailure(f"no observable realization after {cfg.max_retries} draws")


def random_transform(cfg: GeneratorConfig, rng=None):
    """Uniform[-1, 1] entries, rejection-sampled on the 2-norm condition number."""
    rng = cfg.rng(_TRANSFORM_STREAM) if rng is None else rng
    for _ in range(cfg.max_retries):
        T = rng.uniform(-1.0, 1.0, (cfg.n_x, cfg.n_x))
        if np.linalg.cond(T) <= cfg.max_condition:
            return T
    raise GenerationFailure(
        f"no {cfg.n_x}x{cfg.n_x} transform with condition <= {cfg.max_condition}"
    )


def make_similar_pair(r: Realization, cfg: GeneratorConfig):
    """Return ``(transform_realization(r, T_true), T_true)``."""
    T_true = random_transform(cfg)
    return transform_realization(r, T_true), T_true


def random_nonderogatory_pair(rng, n, min_gap=0.5):
    """``(M1, M2)`` with ``M2 = S^-1 M1 S`` and ``M1`` having distinct real eigenvalues."""
    gaps = rng.uniform(min_gap, 2 * min_gap, n)
    eigs = np.cumsum(gaps) - gaps.sum() / 2
    V = _well_conditioned(rng, n)
    M1 = V @ np.diag(rng.permutation(eigs)) @ np.linalg.inv(V)
    S = _well_conditioned(rng, n)
    M2 = np.linalg.solve(S, M1 @ S)
    return M1, M2


def disjoint_spectrum_pair(rng, n, n_y=1):
    """Observable pairs ``(A0, C0), (A, C)`` whose spectra lie in [1, 2] and [-2, -1]."""
    def make(lo, hi):
        V = _well_conditioned(rng, n)
        A = V @ np.diag(rng.uniform(lo, hi, n)) @ np.linalg.inv(V)
        C = rng.standard_normal((n_y, n))
        return A, C

    A0, C0 = make(1.0, 2.0)
    A, C = make(-2.0, -1.0)
    return A0, C0, A, C


def _well_conditioned(rng, n, max_condition=1e2):
    while True:
        V = rng.standard_normal((n, n))
        if np.linalg.cond(V) <= max_condition:
            return V


def brute_force_transform(A0, C0, A, C, tol=DEFAULT_TOLERANCES):
    """Solve ``[M; kron(I, C)] vec(T) = [0; vec(C0)]`` in one least-squares step.

    Raises:
        NotSimilarOrAmbiguous: the stacked system is rank deficient or
            inconsistent.
    """
    A0, A = as_matrix(A0, "A0"), as_matrix(A, "A")
    C0, C = as_matrix(C0, "C0"), as_matrix(C, "C")
    n = A.shape[0]
    stacked = np.vstack([build_displacement_matrix(A0, A), kron(np.eye(n), C)])
    rhs = np.vstack([np.zeros((n * n, 1)), vec(C0)])
    rank = numerical_rank(stacked, tol)
    if rank < n * n:
        raise NotSimilarOrAmbiguous(f"stacked system has rank {rank} < {n * n}")
    x, *_ = np.linalg.lstsq(stacked, rhs, rcond=None)
    residual = np.linalg.norm(stacked @ x - rhs) / max(np.linalg.norm(rhs), 1e-300)
    if residual > tol.residual_tol:
        raise NotSimilarOrAmbiguous(f"stacked system residual {residual:.3e} exceeds tolerance")
    return unvec(x, n, n)
