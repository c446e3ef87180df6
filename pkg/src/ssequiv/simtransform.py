"""Recovery of the similarity transformation between two observable realizations.

Given ``(A0, C0)`` and ``(A, C)`` with ``A0 = T^-1 A T`` and ``C0 = C T``,
``T`` is found in three steps:

1. every solution of ``T A0 = A T`` has ``vec(T)`` in the kernel of the
   displacement matrix ``kron(A0.T, I) - kron(I, A)``;
2. for observable single-output pairs that kernel has dimension ``n_x``, so
   ``T = sum(alpha_i * U_i)`` over a kernel basis ``U_1..U_n``;
3. ``C0 = C T`` is linear in ``alpha`` and pins down the coefficients.
"""

import logging
from dataclasses import dataclass
from typing import List, NamedTuple

import numpy as np

from .errors import (
    DimensionMismatch,
    KernelDimensionMismatch,
    NotObservable,
    RankDeficientCoefficientSystem,
    ResidualTooLarge,
    SingularMatrix,
    SingularTransform,
)
from .matcore import (
    DEFAULT_TOLERANCES,
    MAX_DENSE_DIM,
    as_matrix,
    identity,
    invert,
    kron,
    nullspace_basis,
    numerical_rank,
    singular_values,
    unvec,
    vec,
)
from .realization import Realization, is_observable

logger = logging.getLogger(__name__)

# Floor for relative-residual denominators.
_EPS_FLOOR = 1e-300


@dataclass(frozen=True, eq=False)
class KernelBasis:
    candidates: List[np.ndarray]

    @property
    def dim(self):
        return len(self.candidates)


@dataclass(frozen=True, eq=False)
class SimilarityTransform:
    T: np.ndarray
    T_inv: np.ndarray
    alpha: np.ndarray
    residual_state: float
    residual_output: float
    condition_estimate: float

    @property
    def n_x(self):
        return self.T.shape[0]

    @classmethod
    def from_matrix(cls, T, tol=DEFAULT_TOLERANCES):
        """Wrap a known ``T`` (no pair to check residuals against)."""
        T = as_matrix(T, "T")
        try:
            T_inv = invert(T, tol)
        except SingularMatrix as exc:
            raise SingularTransform(str(exc), exc.condition) from exc
        return cls(T, T_inv, np.array([]), 0.0, 0.0, _cond(T))


class LemmaRankResult(NamedTuple):
    rank: int
    satisfies_lemma: bool


def _cond(T):
    s = singular_values(T)
    return float(s[0] / s[-1]) if s[-1] > 0 else float("inf")


def _square(m, name):
    m = as_matrix(m, name)
    if m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got {m.shape}")
    return m


def _rel(num, den):
    return float(np.linalg.norm(num) / max(np.linalg.norm(den), _EPS_FLOOR))


def build_displacement_matrix(A0, A, cap=MAX_DENSE_DIM):
    """``kron(A0.T, I) - kron(I, A)``: maps ``vec(T)`` to ``vec(T A0 - A T)``."""
    A0 = _square(A0, "A0")
    A = _square(A, "A")
    if A0.shape != A.shape:
        raise DimensionMismatch(f"A0 is {A0.shape}, A is {A.shape}")
    eye = identity(A.shape[0])
    return kron(A0.T, eye, cap) - kron(eye, A, cap)


def displacement_scale(A0, A):
    """Upper bound on the 2-norm of the displacement matrix of ``A0`` and ``A``."""
    return float(np.linalg.norm(A0, 2) + np.linalg.norm(A, 2))


def kernel_candidates(M, n_x, tol=DEFAULT_TOLERANCES, scale=None):
    """Devectorized kernel basis of the displacement matrix ``M``.

    Pass ``scale=displacement_scale(A0, A)`` so that a displacement matrix
    consisting only of roundoff (e.g. ``n_x == 1`` with ``A0 == A``) is
    treated as zero.

    Raises:
        KernelDimensionMismatch: the kernel dimension is not ``n_x``.
    """
    M = as_matrix(M, "M")
    if M.shape != (n_x * n_x, n_x * n_x):
        raise DimensionMismatch(f"M is {M.shape}, expected {(n_x * n_x,) * 2}")
    basis = nullspace_basis(M, tol, scale)
    if len(basis) != n_x:
        raise KernelDimensionMismatch(len(basis), n_x)
    return KernelBasis([unvec(v, n_x, n_x) for v in basis])


def coefficient_matrix(C, basis):
    """Columns are ``vec(C @ U_i)``, so that ``G @ alpha == vec(C @ T)``."""
    return np.hstack([vec(C @ U) for U in basis.candidates])


def solve_alpha(C, C0, basis, tol=DEFAULT_TOLERANCES):
    """Coefficients ``alpha`` with ``C @ sum(alpha_i U_i) == C0``.

    With a single output row the system is square and this is exactly
    ``C0 @ inv([C U_1; ...; C U_n])``; more rows give a least-squares solve
    with a full-column-rank requirement.
    """
    C = as_matrix(C, "C")
    C0 = as_matrix(C0, "C0")
    if C.shape != C0.shape:
        raise DimensionMismatch(f"C is {C.shape}, C0 is {C0.shape}")
    n_x = C.shape[1]
    if basis.dim != n_x:
        raise KernelDimensionMismatch(basis.dim, n_x)
    G = coefficient_matrix(C, basis)
    rank = numerical_rank(G, tol)
    if rank < n_x:
        raise RankDeficientCoefficientSystem(rank, n_x)
    target = vec(C0)
    alpha, *_ = np.linalg.lstsq(G, target, rcond=None)
    residual = _rel(G @ alpha - target, target)
    if residual > tol.residual_tol:
        raise ResidualTooLarge("coefficient", residual, tol.residual_tol)
    return alpha.ravel()


def assemble_transform(alpha, basis, A0, A, C0, C, tol=DEFAULT_TOLERANCES):
    """Form ``T = sum(alpha_i U_i)`` and check it against both conditions."""
    alpha = np.asarray(alpha, dtype=np.float64).ravel()
    if alpha.size != basis.dim:
        raise DimensionMismatch(f"{alpha.size} coefficients for {basis.dim} candidates")
    A0, A = as_matrix(A0, "A0"), as_matrix(A, "A")
    C0, C = as_matrix(C0, "C0"), as_matrix(C, "C")
    T = sum(a * U for a, U in zip(alpha, basis.candidates))
    try:
        T_inv = invert(T, tol)
    except SingularMatrix as exc:
        raise SingularTransform(f"assembled T is singular: {exc}", exc.condition) from exc

    TA0 = T @ A0
    residual_state = _rel(TA0 - A @ T, TA0)
    residual_output = _rel(C0 - C @ T, C0)
    logger.debug("residuals: state=%.3e output=%.3e", residual_state, residual_output)
    if residual_state > tol.residual_tol:
        raise ResidualTooLarge("state", residual_state, tol.residual_tol)
    if residual_output > tol.residual_tol:
        raise ResidualTooLarge("output", residual_output, tol.residual_tol)
    return SimilarityTransform(T, T_inv, alpha, residual_state, residual_output, _cond(T))


def find_similarity(A0, C0, A, C, tol=DEFAULT_TOLERANCES):
    """Find the unique ``T`` with ``A0 = T^-1 A T`` and ``C0 = C T``.

    Args:
        A0, C0: Target pair.
        A, C: Source pair, with the same dimensions.
        tol: Rank and residual thresholds.

    Returns:
        SimilarityTransform with residual diagnostics.

    Raises:
        NotObservable: either pair fails the rank test.
        KernelDimensionMismatch: ``A0`` and ``A`` are not similar (too small a
            kernel) or are derogatory (too large a kernel).
        RankDeficientCoefficientSystem, ResidualTooLarge: ``C0`` cannot be
            matched uniquely.
        SingularTransform: the recovered ``T`` is singular.
    """
    A0, A = _square(A0, "A0"), _square(A, "A")
    C0, C = as_matrix(C0, "C0"), as_matrix(C, "C")
    if A0.shape != A.shape or C0.shape != C.shape or C.shape[1] != A.shape[0]:
        raise DimensionMismatch(
            f"incompatible shapes: A0 {A0.shape}, C0 {C0.shape}, A {A.shape}, C {C.shape}"
        )
    for which, (a, c) in (("system0", (A0, C0)), ("system", (A, C))):
        report = is_observable(a, c, tol)
        if not report.observable:
            raise NotObservable(which, report.rank, a.shape[0])

    n_x = A.shape[0]
    M = build_displacement_matrix(A0, A)
    basis = kernel_candidates(M, n_x, tol, displacement_scale(A0, A))
    alpha = solve_alpha(C, C0, basis, tol)
    return assemble_transform(alpha, basis, A0, A, C0, C, tol)


def transform_realization(r: Realization, t) -> Realization:
    """Return ``(T^-1 A T, T^-1 B, C T, D)``.

    ``t`` is a :class:`SimilarityTransform` or a bare nonsingular matrix.
    """
    if not isinstance(t, SimilarityTransform):
        t = SimilarityTransform.from_matrix(t)
    if t.n_x != r.n_x:
        raise DimensionMismatch(f"T is {t.T.shape}, realization has n_x = {r.n_x}")
    return Realization(t.T_inv @ r.A @ t.T, t.T_inv @ r.B, r.C @ t.T, r.D.copy())


def validate_lemma_rank(M1, M2, tol=DEFAULT_TOLERANCES):
    """Rank of ``kron(I, M2) - kron(M1.T, I)`` and whether it equals ``n^2 - n``."""
    M1, M2 = _square(M1, "M1"), _square(M2, "M2")
    if M1.shape != M2.shape:
        raise DimensionMismatch(f"M1 is {M1.shape}, M2 is {M2.shape}")
    n = M1.shape[0]
    eye = identity(n)
    scale = displacement_scale(M1, M2)
    rank = numerical_rank(kron(eye, M2) - kron(M1.T, eye), tol, scale)
    return LemmaRankResult(rank, rank == n * n - n)
