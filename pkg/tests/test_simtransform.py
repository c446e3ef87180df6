import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ssequiv.errors import (
    DimensionMismatch,
    KernelDimensionMismatch,
    NotObservable,
    RankDeficientCoefficientSystem,
    ResidualTooLarge,
    SingularTransform,
    SizeCapExceeded,
)
from ssequiv.matcore import Tolerances, unvec, vec
from ssequiv.realization import Realization, markov_equivalent
from ssequiv.simtransform import (
    KernelBasis,
    SimilarityTransform,
    assemble_transform,
    build_displacement_matrix,
    displacement_scale,
    find_similarity,
    kernel_candidates,
    solve_alpha,
    transform_realization,
    validate_lemma_rank,
)
from ssequiv.testgen import (
    GeneratorConfig,
    make_similar_pair,
    random_nonderogatory_pair,
    random_observable_realization,
)

N = np.array([[0.0, 1.0], [0.0, 0.0]])

# A0 = T^-1 A T and C0 = C T for T = [[1, 1], [0, 1]]
WORKED = dict(
    A0=np.array([[2.0, 6.0], [-2.0, -5.0]]),
    C0=np.array([[1.0, 1.0]]),
    A=np.array([[0.0, 1.0], [-2.0, -3.0]]),
    C=np.array([[1.0, 0.0]]),
)
WORKED_T = np.array([[1.0, 1.0], [0.0, 1.0]])


def displacement_by_columns(A0, A):
    """Column j is vec(E A0 - A E) for the j-th unit matrix E."""
    n = A.shape[0]
    cols = []
    for j in range(n * n):
        E = unvec(np.eye(n * n)[:, j], n, n)
        cols.append(vec(E @ A0 - A @ E))
    return np.hstack(cols)


def test_worked_fixture_is_consistent():
    T = WORKED_T
    np.testing.assert_array_equal(np.linalg.inv(T) @ WORKED["A"] @ T, WORKED["A0"])
    np.testing.assert_array_equal(WORKED["C"] @ T, WORKED["C0"])
    assert np.trace(WORKED["A0"]) == np.trace(WORKED["A"]) == -3


def test_displacement_examples():
    np.testing.assert_array_equal(build_displacement_matrix([[1.5]], [[1.5]]), [[0.0]])
    np.testing.assert_array_equal(
        build_displacement_matrix(N, N),
        [[0, -1, 0, 0], [0, 0, 0, 0], [1, 0, 0, -1], [0, 1, 0, 0]],
    )
    np.testing.assert_array_equal(
        build_displacement_matrix(np.diag([1.0, 2.0]), np.diag([3.0, 4.0])),
        np.diag([-2.0, -3.0, -1.0, -2.0]),
    )


@settings(max_examples=30)
@given(st.integers(0, 2**32 - 1), st.integers(1, 5))
def test_displacement_matches_column_definition(seed, n):
    rng = np.random.default_rng(seed)
    A0, A = rng.standard_normal((2, n, n))
    np.testing.assert_allclose(
        build_displacement_matrix(A0, A), displacement_by_columns(A0, A), atol=1e-14
    )


def test_displacement_errors():
    with pytest.raises(DimensionMismatch):
        build_displacement_matrix(np.eye(2), np.eye(3))
    with pytest.raises(SizeCapExceeded):
        build_displacement_matrix(np.eye(65), np.eye(65))


def test_kernel_of_jordan_block():
    basis = kernel_candidates(build_displacement_matrix(N, N), 2)
    assert basis.dim == 2
    # project I and N onto span(U1, U2) and check they are reproduced
    U = np.hstack([vec(u) for u in basis.candidates])
    for target in (np.eye(2), N):
        coef, *_ = np.linalg.lstsq(U, vec(target), rcond=None)
        np.testing.assert_allclose(U @ coef, vec(target), atol=1e-14)


def test_roundoff_displacement_counts_as_zero():
    M = np.array([[-2.2e-19]])
    with pytest.raises(KernelDimensionMismatch):
        kernel_candidates(M, 1)
    assert kernel_candidates(M, 1, scale=1.0).dim == 1


def test_kernel_dimension_errors():
    with pytest.raises(KernelDimensionMismatch) as info:
        kernel_candidates(build_displacement_matrix(np.diag([1.0, 2.0]), np.diag([3.0, 4.0])), 2)
    assert info.value.dim == 0 and info.value.diagnosis == "not-similar"
    with pytest.raises(KernelDimensionMismatch) as info:
        kernel_candidates(build_displacement_matrix(np.eye(2), np.eye(2)), 2)
    assert info.value.dim == 4 and info.value.diagnosis == "derogatory-ambiguous"


def test_solve_alpha_examples():
    basis = KernelBasis([np.eye(2), N.copy()])
    alpha = solve_alpha([[1, 0]], [[1, 0]], basis)
    np.testing.assert_allclose(alpha, [1, 0], atol=1e-15)
    np.testing.assert_allclose(solve_alpha([[2.0]], [[3.0]], KernelBasis([np.eye(1)])), [1.5])


def test_zero_output_map_gives_singular_transform():
    basis = KernelBasis([np.eye(2), N.copy()])
    alpha = solve_alpha([[1, 0]], [[0, 0]], basis)
    np.testing.assert_array_equal(alpha, [0, 0])
    with pytest.raises(SingularTransform):
        assemble_transform(alpha, basis, N, N, [[0, 0]], [[1, 0]])


def test_solve_alpha_failures():
    basis = KernelBasis([np.eye(2), N.copy()])
    # C = [0, 1] annihilates N, so both columns of G coincide up to zero
    with pytest.raises(RankDeficientCoefficientSystem):
        solve_alpha([[0, 1]], [[0, 1]], basis)
    # two outputs: C0 outside the range of G
    with pytest.raises(ResidualTooLarge):
        solve_alpha([[1, 0], [0, 1]], [[1, 0], [5, 7]], basis)


def test_assemble_examples():
    t = assemble_transform([1, 0], KernelBasis([np.eye(2), N.copy()]), N, N, [[1, 0]], [[1, 0]])
    np.testing.assert_array_equal(t.T, np.eye(2))
    assert t.residual_state == 0 and t.residual_output == 0
    t = assemble_transform([1.5], KernelBasis([np.eye(1)]), [[0.3]], [[0.3]], [[3.0]], [[2.0]])
    np.testing.assert_allclose(t.T, [[1.5]])
    np.testing.assert_allclose(t.T_inv, [[2 / 3]])


def test_assemble_rejects_wrong_state_residual():
    basis = KernelBasis([np.eye(2), N.copy()])
    with pytest.raises(ResidualTooLarge) as info:
        assemble_transform([1, 0], basis, np.diag([1.0, 2.0]), N, [[1, 0]], [[1, 0]])
    assert info.value.what == "state"


def test_find_similarity_identity():
    r = random_observable_realization(GeneratorConfig(11, 5, 1, 2))
    t = find_similarity(r.A, r.C, r.A, r.C)
    np.testing.assert_allclose(t.T, np.eye(5), atol=1e-10)


def test_find_similarity_worked_example():
    t = find_similarity(**WORKED)
    np.testing.assert_allclose(t.T, WORKED_T, atol=1e-12)
    np.testing.assert_allclose(t.T @ t.T_inv, np.eye(2), atol=1e-12)
    assert t.residual_state <= 1e-12 and t.residual_output <= 1e-12


def test_find_similarity_disjoint_spectra():
    with pytest.raises(KernelDimensionMismatch) as info:
        find_similarity(np.diag([1.0, 2.0]), [[1, 1]], np.diag([3.0, 4.0]), [[1, 1]])
    assert info.value.dim == 0


def test_find_similarity_not_observable():
    with pytest.raises(NotObservable) as info:
        find_similarity(N, [[1, 0]], np.eye(2), [[1, 0]])
    assert info.value.which == "system"
    with pytest.raises(NotObservable) as info:
        find_similarity(np.eye(2), [[1, 0]], N, [[1, 0]])
    assert info.value.which == "system0"


def test_find_similarity_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        find_similarity(N, [[1, 0]], np.eye(3), [[1, 0, 0]])


def test_transform_realization_examples():
    r = random_observable_realization(GeneratorConfig(5, 3, 2, 1))
    same = transform_realization(r, np.eye(3))
    for name in "ABCD":
        np.testing.assert_array_equal(getattr(same, name), getattr(r, name))
    s = transform_realization(Realization([[0.7]], [[3.0]], [[5.0]], [[-1.0]]), [[2.0]])
    assert (s.A.item(), s.B.item(), s.C.item(), s.D.item()) == (0.7, 1.5, 10.0, -1.0)
    r0, T = make_similar_pair(r, GeneratorConfig(5, 3, 2, 1))
    assert markov_equivalent(r, r0)
    with pytest.raises(DimensionMismatch):
        transform_realization(r, np.eye(2))
    with pytest.raises(SingularTransform):
        transform_realization(r, np.zeros((3, 3)))


def test_lemma_rank_examples():
    assert validate_lemma_rank(N, N) == (2, True)
    assert validate_lemma_rank(np.eye(2), np.eye(2)) == (0, False)
    assert validate_lemma_rank([[4.2]], [[4.2]]) == (0, True)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 8), st.integers(1, 3), st.integers(1, 3))
def test_round_trip_recovery(seed, n_x, n_u, n_y):
    cfg = GeneratorConfig(seed, n_x, n_u, n_y)
    r = random_observable_realization(cfg)
    r0, T_true = make_similar_pair(r, cfg)
    t = find_similarity(r0.A, r0.C, r.A, r.C)
    assert np.linalg.norm(t.T - T_true) <= 1e-8 * np.linalg.norm(T_true)
    assert np.linalg.norm(t.T @ t.T_inv - np.eye(n_x)) <= 1e-8 * n_x
    scale = max(1.0, abs(np.trace(r.A)))
    assert abs(np.trace(r0.A) - np.trace(r.A)) <= 1e-9 * scale
    assert abs(np.linalg.det(r0.A) - np.linalg.det(r.A)) <= 1e-9 * max(1.0, abs(np.linalg.det(r.A)))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 6))
def test_kernel_candidates_satisfy_commutation(seed, n_x):
    cfg = GeneratorConfig(seed, n_x)
    r = random_observable_realization(cfg)
    r0, _ = make_similar_pair(r, cfg)
    M = build_displacement_matrix(r0.A, r.A)
    basis = kernel_candidates(M, n_x, scale=displacement_scale(r0.A, r.A))
    V = np.hstack([vec(U) for U in basis.candidates])
    np.testing.assert_allclose(V.T @ V, np.eye(n_x), atol=1e-12)
    cutoff = n_x * n_x * np.finfo(float).eps * displacement_scale(r0.A, r.A)
    for U in basis.candidates:
        assert np.linalg.norm(U @ r0.A - r.A @ U) <= 10 * cutoff


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 6), st.integers(1, 3))
def test_basis_rotation_leaves_T_unchanged(seed, n_x, n_y):
    cfg = GeneratorConfig(seed, n_x, 1, n_y)
    r = random_observable_realization(cfg)
    r0, _ = make_similar_pair(r, cfg)
    tol = Tolerances()
    M = build_displacement_matrix(r0.A, r.A)
    basis = kernel_candidates(M, n_x, tol, displacement_scale(r0.A, r.A))
    Q, _ = np.linalg.qr(np.random.default_rng(seed).standard_normal((n_x, n_x)))
    rotated = KernelBasis(
        [sum(Q[i, j] * basis.candidates[i] for i in range(n_x)) for j in range(n_x)]
    )
    ts = [
        assemble_transform(solve_alpha(r.C, r0.C, b, tol), b, r0.A, r.A, r0.C, r.C, tol).T
        for b in (basis, rotated)
    ]
    assert np.linalg.norm(ts[0] - ts[1]) <= tol.residual_tol * np.linalg.norm(ts[0])


def test_lemma_rank_law_on_nonderogatory_pairs():
    rng = np.random.default_rng(2024)
    for n in range(1, 9):
        M1, M2 = random_nonderogatory_pair(rng, n)
        assert validate_lemma_rank(M1, M2) == (n * n - n, True)


def test_from_matrix_singular():
    with pytest.raises(SingularTransform):
        SimilarityTransform.from_matrix([[1.0, 2.0], [2.0, 4.0]])
