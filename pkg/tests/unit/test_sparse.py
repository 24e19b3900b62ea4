"""
Tests for symmetric storage, ordering, static-pivoting LDL^T and refinement
"""

import numpy as np
import pytest
import scipy.sparse as sp

from nclsolver.core.exceptions import DimensionError, FactorizationError
from nclsolver.sparse import (
    SparseSymMatrix,
    analyze,
    dump_matrix,
    factorize,
    inertia_of,
    load_matrix,
    minimum_degree_ordering,
    solve_refined,
)
from tests.oracles import (
    eig_inertia,
    random_diag_dominant,
    random_spd,
    random_sqd,
    random_symmetric,
)

pytestmark = pytest.mark.unit


def _factor(A: np.ndarray, pivot_eps: float = 1e-10):
    S = SparseSymMatrix.from_dense(A)
    return S, factorize(analyze(S), S, pivot_eps)


class TestStorage:
    def test_triplets_mirror_and_sum_duplicates(self):
        S = SparseSymMatrix.from_triplets(3, [0, 1, 0, 2], [1, 0, 0, 2], [1.0, 2.0, 4.0, 5.0])
        S.validate()
        expected = np.array([[4.0, 3.0, 0.0], [3.0, 0.0, 0.0], [0.0, 0.0, 5.0]])
        np.testing.assert_array_equal(S.to_dense(), expected)

    def test_out_of_range_triplet_rejected(self):
        with pytest.raises(DimensionError):
            SparseSymMatrix.from_triplets(2, [0, 2], [0, 0], [1.0, 1.0])

    def test_matvec_matches_dense(self, rng):
        A = random_symmetric(rng, 12)
        S = SparseSymMatrix.from_dense(A)
        x = rng.standard_normal(12)
        np.testing.assert_allclose(S.matvec(x), A @ x, rtol=1e-12, atol=1e-12)

    def test_from_scipy_accepts_full_or_lower(self, rng):
        A = random_spd(rng, 6)
        full = SparseSymMatrix.from_scipy(sp.csr_matrix(A))
        lower = SparseSymMatrix.from_scipy(sp.tril(sp.csr_matrix(A)))
        np.testing.assert_allclose(full.to_dense(), lower.to_dense())
        assert full.same_pattern(lower)

    def test_with_values_keeps_pattern(self):
        S = SparseSymMatrix.from_dense(np.array([[2.0, 1.0], [1.0, 3.0]]))
        T = S.with_values(2 * S.data)
        assert S.same_pattern(T)
        np.testing.assert_array_equal(T.diagonal(), [4.0, 6.0])

    def test_matrix_market_dump_and_load(self, rng, tmp_path):
        A = random_sqd(rng, 4, 3)
        S = SparseSymMatrix.from_dense(A)
        path = dump_matrix(S, tmp_path / "k.mtx")
        np.testing.assert_allclose(load_matrix(path).to_dense(), A, rtol=1e-15, atol=1e-15)


class TestOrdering:
    def test_ordering_is_a_permutation(self, rng):
        A = random_diag_dominant(rng, 30, density=0.1)
        perm = minimum_degree_ordering(SparseSymMatrix.from_dense(A))
        assert sorted(perm.tolist()) == list(range(30))

    def test_first_nodes_are_eliminated_first(self, rng):
        A = random_diag_dominant(rng, 10, density=0.4)
        perm = minimum_degree_ordering(SparseSymMatrix.from_dense(A), first=[7, 3])
        assert perm[:2].tolist() == [7, 3]

    def test_arrow_matrix_has_no_fill(self):
        n = 8
        A = np.eye(n) * 10.0
        A[0, 1:] = A[1:, 0] = 1.0
        sym = analyze(SparseSymMatrix.from_dense(A))
        assert 0 in sym.perm[-2:].tolist()
        assert sym.lnz == n - 1

    def test_symbolic_rejects_other_pattern(self):
        S = SparseSymMatrix.from_dense(np.eye(3))
        T = SparseSymMatrix.from_dense(np.array([[1.0, 1.0, 0.0], [1.0, 1.0, 0.0], [0.0, 0.0, 1.0]]))
        sym = analyze(S)
        assert sym.matches(S) and not sym.matches(T)
        with pytest.raises(DimensionError):
            factorize(sym, T)


class TestFactorization:
    @pytest.mark.parametrize("seed", range(200))
    def test_inertia_matches_eigenvalues(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(1, 61))
        A = random_symmetric(rng, n)
        _, factors = _factor(A, pivot_eps=0.0)
        assert factors.inertia == eig_inertia(A)

    @pytest.mark.parametrize(
        "family",
        [
            lambda rng: random_spd(rng, 25),
            lambda rng: random_sqd(rng, 15, 10),
            lambda rng: random_diag_dominant(rng, 30),
        ],
        ids=["spd", "sqd", "diag-dominant"],
    )
    def test_reconstruction(self, rng, family):
        A = family(rng)
        S, factors = _factor(A)
        assert factors.n_perturbed == 0
        P = factors.perm
        err = np.max(np.abs(factors.reconstruct() - A[np.ix_(P, P)]))
        assert err <= 1e-11 * max(1.0, np.max(np.abs(A)))

    def test_solve_matches_dense(self, rng):
        A = random_sqd(rng, 10, 6)
        S, factors = _factor(A)
        b = rng.standard_normal(16)
        np.testing.assert_allclose(factors.solve(b), np.linalg.solve(A, b), rtol=1e-9, atol=1e-10)

    def test_zero_pivot_is_perturbed(self):
        A = np.array([[0.0, 1.0], [1.0, 0.0]])
        _, factors = _factor(A, pivot_eps=1e-10)
        assert factors.n_perturbed == 1
        assert factors.inertia == (1, 1, 0)

    def test_zero_pivot_without_eps_raises(self):
        A = np.array([[0.0, 1.0], [1.0, 0.0]])
        with pytest.raises(FactorizationError):
            _factor(A, pivot_eps=0.0)

    def test_singular_matrix_needs_perturbation(self):
        A = np.zeros((2, 2))
        A[0, 0] = 1.0
        S = SparseSymMatrix.from_dense(A)
        with pytest.raises(FactorizationError):
            factorize(analyze(S), S, pivot_eps=0.0)
        factors = factorize(analyze(S), S, pivot_eps=1e-10)
        assert factors.n_perturbed == 1

    def test_inertia_of_counts_signs(self):
        assert inertia_of(np.array([1.0, -2.0, 0.0, 3.0])) == (2, 1, 1)

    def test_negative_eps_rejected(self):
        S = SparseSymMatrix.from_dense(np.eye(2))
        with pytest.raises(ValueError):
            factorize(analyze(S), S, pivot_eps=-1.0)


class TestRefinement:
    def test_recovers_ordering_induced_zero_pivot(self):
        A = np.array([[0.0, 1.0], [1.0, 0.0]])
        S, factors = _factor(A)
        result = solve_refined(factors, S, np.array([1.0, 2.0]))
        np.testing.assert_allclose(result.x, [2.0, 1.0], rtol=1e-10)
        assert result.converged
        assert result.residual <= 1e-12

    def test_tiny_pivot_refinement_is_monotone_and_honest(self):
        A = np.diag([1.0, 1e-14])
        S, factors = _factor(A)
        assert factors.n_perturbed == 1
        b = np.array([1.0, 1.0])
        result = solve_refined(factors, S, b, max_ref=10)
        first = factors.solve(b)
        first_res = np.max(np.abs(b - A @ first))
        assert result.abs_residual <= first_res
        assert result.abs_residual == pytest.approx(np.max(np.abs(b - A @ result.x)))
        assert result.steps < 10
        assert not result.converged

    def test_exact_factors_need_no_refinement(self, rng):
        A = random_spd(rng, 8)
        S, factors = _factor(A)
        result = solve_refined(factors, S, rng.standard_normal(8))
        assert result.converged
        assert result.steps <= 1

    def test_zero_rhs(self):
        S, factors = _factor(np.eye(3))
        result = solve_refined(factors, S, np.zeros(3))
        np.testing.assert_array_equal(result.x, np.zeros(3))
        assert result.converged
