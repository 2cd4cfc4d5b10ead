# tests/test_linsolve.py
import numpy as np
import pytest
import scipy.sparse as sp

from src.domain.exceptions.linalg_exceptions import DimensionMismatch, StructurallySingular
from src.domain.linalg import (
    SparseSym,
    SymmetricSolver,
    amd_order,
    dense_sym_factor,
    inverse_permutation,
    ldlt_factor,
    read_matrix_market,
    write_matrix_market,
)


def eigen_inertia(a: np.ndarray, tol: float = 1e-10):
    eig = np.linalg.eigvalsh(a)
    return int((eig > tol).sum()), int((eig < -tol).sum()), int((np.abs(eig) <= tol).sum())


def random_kkt(n: int, m: int, seed: int = 0, density: float = 0.3) -> np.ndarray:
    """[[H, Jᵀ], [J, 0]]，H 正定、J 行满秩"""
    rng = np.random.default_rng(seed)
    h = sp.random(n, n, density=density, random_state=rng).toarray()
    h = h @ h.T + np.eye(n)
    j = sp.random(m, n, density=density, random_state=rng).toarray()
    j[:, :m] += np.eye(m)
    k = np.zeros((n + m, n + m))
    k[:n, :n] = h
    k[n:, :n] = j
    k[:n, n:] = j.T
    return k


class TestSparseSym:
    """测试下三角存储"""

    def test_from_matrix_keeps_lower_triangle(self):
        a = np.array([[4.0, 1.0], [1.0, 3.0]])
        m = SparseSym.from_matrix(a)
        assert m.nnz == 3
        np.testing.assert_allclose(m.to_dense(), a)

    def test_triplets_are_summed(self):
        m = SparseSym.from_triplets(2, [0, 1, 1], [0, 0, 0], [1.0, 2.0, 3.0])
        np.testing.assert_allclose(m.to_dense(), [[1.0, 5.0], [5.0, 0.0]])

    def test_upper_entries_rejected(self):
        with pytest.raises(ValueError):
            SparseSym(2, np.array([0, 1, 2]), np.array([0, 0]), np.array([1.0, 1.0]))

    def test_matrix_market_round_trip(self, tmp_path):
        a = random_kkt(5, 2, seed=3)
        path = write_matrix_market(tmp_path / "k.mtx", SparseSym.from_matrix(a))
        np.testing.assert_allclose(read_matrix_market(path).to_dense(), a)


class TestOrdering:
    """测试最小度排序"""

    def test_is_permutation(self):
        m = SparseSym.from_matrix(random_kkt(12, 5, seed=1))
        perm = amd_order(m)
        assert sorted(perm.tolist()) == list(range(17))
        np.testing.assert_array_equal(perm[inverse_permutation(perm)], np.arange(17))

    def test_arrow_matrix_eliminates_hub_late(self):
        n = 6
        a = np.eye(n) * 4
        a[0, 1:] = a[1:, 0] = 1.0
        perm = amd_order(SparseSym.from_matrix(a))
        assert list(perm).index(0) >= n - 2


class TestLDLT:
    """测试稀疏 LDLᵀ 与惯性"""

    @pytest.mark.parametrize("n,m,seed", [(5, 2, 0), (20, 8, 1), (40, 15, 2)])
    def test_kkt_solve_and_inertia(self, n, m, seed):
        a = random_kkt(n, m, seed)
        f = ldlt_factor(SparseSym.from_matrix(a))
        assert f.inertia == (n, m, 0)
        b = np.arange(n + m, dtype=float)
        np.testing.assert_allclose(a @ f.solve(b), b, atol=1e-8)

    def test_zero_diagonal_needs_two_by_two(self):
        a = np.array([[0.0, 1.0], [1.0, 0.0]])
        f = ldlt_factor(SparseSym.from_matrix(a))
        assert f.inertia == (1, 1, 0)
        assert f.num_two_by_two == 1
        np.testing.assert_allclose(f.solve(np.array([2.0, 3.0])), [3.0, 2.0])

    def test_indefinite_matches_eigenvalues(self):
        rng = np.random.default_rng(7)
        b = rng.standard_normal((15, 15))
        a = b + b.T
        f = ldlt_factor(SparseSym.from_matrix(a))
        assert f.inertia == eigen_inertia(a)

    def test_multiple_right_hand_sides(self):
        a = random_kkt(8, 3, seed=4)
        f = ldlt_factor(SparseSym.from_matrix(a))
        rhs = np.eye(11)[:, :4]
        np.testing.assert_allclose(a @ f.solve(rhs), rhs, atol=1e-8)

    def test_singular_reports_inertia(self):
        a = np.array([[1.0, 1.0, 0.0], [1.0, 1.0, 0.0], [0.0, 0.0, 2.0]])
        with pytest.raises(StructurallySingular) as exc:
            ldlt_factor(SparseSym.from_matrix(a))
        assert exc.value.inertia[2] >= 1

    def test_rhs_dimension_checked(self):
        f = ldlt_factor(SparseSym.from_matrix(np.eye(3)))
        with pytest.raises(DimensionMismatch):
            f.solve(np.ones(4))


class TestSymmetricSolver:
    """测试稠密 / 稀疏切换与排序缓存"""

    def test_dense_and_sparse_agree(self):
        a = random_kkt(10, 4, seed=5)
        m = SparseSym.from_matrix(a)
        b = np.linspace(-1.0, 1.0, 14)
        dense = SymmetricSolver(dense_threshold=100)
        sparse = SymmetricSolver(dense_threshold=0)
        x_dense = dense.solve(m, dense.factor(m), b)
        x_sparse = sparse.solve(m, sparse.factor(m), b)
        np.testing.assert_allclose(x_dense, x_sparse, atol=1e-9)
        assert dense.stats["dense"] == 1
        assert sparse.stats["sparse"] == 1

    def test_dense_inertia(self):
        a = random_kkt(6, 2, seed=6)
        assert dense_sym_factor(a).inertia == (6, 2, 0)

    def test_ordering_cached_by_pattern(self):
        solver = SymmetricSolver(dense_threshold=0)
        a = random_kkt(10, 4, seed=8)
        solver.factor(SparseSym.from_matrix(a))
        solver.factor(SparseSym.from_matrix(2.0 * a))
        assert solver.stats["ordering_hits"] == 1


class TestDenseFactor:
    """LAPACK 稠密路径"""

    def test_two_by_two_pivot(self):
        f = dense_sym_factor(np.array([[0.0, 1.0], [1.0, 0.0]]))
        assert f.inertia == (1, 1, 0)
        assert np.any(f.ipiv < 0)
        np.testing.assert_allclose(f.solve(np.array([2.0, 3.0])), [3.0, 2.0])

    def test_reads_lower_triangle_only(self):
        a = random_kkt(6, 3, seed=9)
        junk = np.tril(a) + np.triu(np.full_like(a, 7.0), 1)
        b = np.linspace(0.0, 1.0, 9)
        np.testing.assert_allclose(dense_sym_factor(junk).solve(b), np.linalg.solve(a, b), atol=1e-9)

    def test_multiple_right_hand_sides(self):
        a = random_kkt(12, 5, seed=10)
        rhs = np.eye(17)[:, :6]
        x = dense_sym_factor(a).solve(rhs)
        assert x.shape == rhs.shape
        np.testing.assert_allclose(a @ x, rhs, atol=1e-9)

    def test_singular_raises(self):
        a = np.array([[1.0, 1.0, 0.0], [1.0, 1.0, 0.0], [0.0, 0.0, 2.0]])
        with pytest.raises(StructurallySingular) as exc:
            dense_sym_factor(a)
        assert exc.value.inertia[2] >= 1

    def test_empty_matrix(self):
        f = dense_sym_factor(np.zeros((0, 0)))
        assert f.inertia == (0, 0, 0)
        assert f.solve(np.zeros(0)).shape == (0,)


def inertia_corpus(count: int = 200):
    """随机对称矩阵：一半稠密高斯，一半 KKT 形"""
    rng = np.random.default_rng(2024)
    for k in range(count):
        if k % 2:
            n, m = int(rng.integers(2, 25)), int(rng.integers(1, 10))
            yield random_kkt(n, min(m, n), seed=k)
        else:
            size = int(rng.integers(2, 40))
            b = rng.standard_normal((size, size))
            yield b + b.T


class TestInertiaCorpus:
    """200 个随机对称矩阵上的惯性与特征值符号一致"""

    @pytest.mark.parametrize("kind", ["dense", "sparse"])
    def test_matches_eigenvalues(self, kind):
        solver = SymmetricSolver(dense_threshold=512 if kind == "dense" else 0)
        checked = 0
        for a in inertia_corpus():
            eig = np.abs(np.linalg.eigvalsh(a))
            if eig.min() < 1e-6 * max(eig.max(), 1.0):
                continue
            m = SparseSym.from_matrix(a)
            f = solver.factor(m)
            assert f.inertia == eigen_inertia(a)
            b = np.ones(a.shape[0])
            np.testing.assert_allclose(a @ solver.solve(m, f, b), b, atol=1e-6)
            checked += 1
        assert checked >= 190
