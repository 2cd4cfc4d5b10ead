# tests/test_kkt_backends.py
import os
import time

import numpy as np
import pytest
import scipy.sparse as sp

from src.domain.exceptions.solver_exceptions import NonAffineLink, NotTwoStage, SingularKKT
from src.domain.graph import ConstraintBounds, flatten
from src.domain.ipm.evaluator import NLPEvaluator
from src.domain.kkt import (
    BlockPartition,
    KKTSystem,
    MonolithicBackend,
    Regularization,
    SchurComplementFactor,
    SchurDualBackend,
    SchurTreeBackend,
    assemble_block_kkt,
    schur_solve,
    schur_tree_solve,
    solve_regularized,
)
from src.domain.linalg import SymmetricSolver
from src.infrastructure.tasks.worker_pool import BlockWorkerPool
from tests.builders import build_chain, build_two_stage


def system_at(flat, x=None, lam=None, sigma=0.5) -> KKTSystem:
    ev = NLPEvaluator(flat)
    x = flat.x0 if x is None else x
    lam = np.full(flat.n_cons, 0.3) if lam is None else lam
    return KKTSystem(flat.n_vars, flat.n_cons, ev.hessian(x, 1.0, lam), np.full(flat.n_vars, sigma),
                     ev.jacobian(x))


def negative_system(n: int = 2) -> KKTSystem:
    return KKTSystem(n, 0, sp.coo_matrix(-np.eye(n)), np.zeros(n), sp.csr_matrix((0, n)))


def arrowhead_system(blocks: int, size: int, border: int, seed: int = 0):
    """块对角正定 Hessian 加 border 条稠密链接行"""
    rng = np.random.default_rng(seed)
    n = blocks * size
    hess = []
    for _ in range(blocks):
        g = rng.standard_normal((size, size))
        hess.append(g @ g.T / size + np.eye(size))
    jac = sp.random(border, n, density=0.02, random_state=rng, format="csr")
    jac = jac + sp.csr_matrix((np.ones(border), (np.arange(border), np.arange(border) * (n // border))),
                              shape=(border, n))
    system = KKTSystem(n, border, sp.tril(sp.block_diag(hess)).tocoo(), np.zeros(n), jac.tocsr())
    partition = BlockPartition(
        kind="dual",
        names=tuple(f"b{i}" for i in range(blocks)),
        blocks=tuple(np.arange(i * size, (i + 1) * size, dtype=np.int64) for i in range(blocks)),
        border=np.arange(n, n + border, dtype=np.int64),
        dimension=n + border,
    )
    rhs = np.linspace(-1.0, 1.0, n + border)
    return system, assemble_block_kkt(system, partition, rhs, 0.0, 1e-8)


def timed_schur(bk, threads: int, repeats: int = 3) -> float:
    best = float("inf")
    with BlockWorkerPool(threads, name="arrowhead") as pool:
        for _ in range(repeats):
            start = time.perf_counter()
            factor = SchurComplementFactor(bk, SymmetricSolver(), pool)
            factor.solve_blocks(bk.rhs_blocks, bk.rhs_border)
            best = min(best, time.perf_counter() - start)
    return best


class TestBackendsAgree:
    """三个后端在同一系统上给出相同的步长与惯性"""

    def setup_method(self):
        self.flat = flatten(build_two_stage((1.0, 3.0, -2.0, 0.5)))
        self.system = system_at(self.flat)
        self.rhs = np.linspace(-1.0, 2.0, self.system.dimension)
        self.reg = Regularization()

    def solve_with(self, backend):
        backend.prepare(self.flat)
        try:
            return solve_regularized(backend, self.system, self.rhs, 0.1, self.reg)
        finally:
            backend.close()

    @pytest.mark.parametrize("make", [
        lambda: SchurDualBackend(threads=1),
        lambda: SchurDualBackend(threads=3),
        lambda: SchurTreeBackend(threads=1),
        lambda: SchurTreeBackend(threads=2),
    ])
    def test_direction_matches_monolithic(self, make):
        reference = self.solve_with(MonolithicBackend())
        result = self.solve_with(make())
        np.testing.assert_allclose(result.direction, reference.direction, rtol=1e-9, atol=1e-10)
        assert result.inertia == reference.inertia == (self.flat.n_vars, self.flat.n_cons, 0)

    def test_residual_small(self):
        result = self.solve_with(MonolithicBackend())
        assert result.residual < 1e-10

    def test_thread_count_does_not_change_result(self):
        one = self.solve_with(SchurDualBackend(threads=1))
        four = self.solve_with(SchurDualBackend(threads=4))
        np.testing.assert_array_equal(one.direction, four.direction)

    def test_schur_dimensions(self):
        dual = SchurDualBackend()
        tree = SchurTreeBackend()
        dual.prepare(self.flat)
        tree.prepare(self.flat)
        # 对偶：每个场景一条链接行；树形：主节点一个变量
        assert dual.schur_dimension == 4
        assert tree.schur_dimension == 1
        dual.close()
        tree.close()


class TestBlockSolves:
    """直接调用块求解"""

    def setup_method(self):
        self.flat = flatten(build_two_stage())
        self.system = system_at(self.flat)
        self.rhs = np.array([1.0, -2.0, 0.5, 0.25, -0.75])
        self.expected = np.linalg.solve(self.system.full().toarray(), self.rhs)

    def test_dual_schur(self):
        bk = assemble_block_kkt(self.system, BlockPartition.dual(self.flat), self.rhs)
        step = schur_solve(bk, threads=2)
        np.testing.assert_allclose(bk.scatter(step.d_blocks, step.d_border), self.expected, atol=1e-10)

    def test_tree_schur(self):
        part = BlockPartition.tree(self.flat)
        assert part.border_name == "m"
        bk = assemble_block_kkt(self.system, part, self.rhs)
        step = schur_tree_solve(bk, "m")
        np.testing.assert_allclose(bk.scatter(step.d_blocks, step.d_border), self.expected, atol=1e-10)

    def test_tree_requires_matching_master(self):
        bk = assemble_block_kkt(self.system, BlockPartition.dual(self.flat), self.rhs)
        with pytest.raises(NotTwoStage):
            schur_tree_solve(bk, "m")

    def test_assembled_matches_permuted_system(self):
        part = BlockPartition.dual(self.flat)
        bk = assemble_block_kkt(self.system, part, self.rhs)
        p = part.permutation
        full = self.system.full().toarray()
        np.testing.assert_allclose(bk.assembled().toarray(), full[np.ix_(p, p)])


class TestPreparation:
    """测试后端对问题结构的检查"""

    def test_nonlinear_link_rejected(self):
        graph = build_two_stage()
        m, s1 = graph.node("m"), graph.node("s1")
        graph.link_constraint(s1["x"] * m["y"], ConstraintBounds.inequality(hi=4.0))
        flat = flatten(graph)
        for backend in (SchurDualBackend(), SchurTreeBackend()):
            with pytest.raises(NonAffineLink):
                backend.prepare(flat)
            backend.close()
        MonolithicBackend().prepare(flat)

    def test_tree_needs_master(self):
        with pytest.raises(NotTwoStage):
            SchurTreeBackend().prepare(flatten(build_chain()))

    def test_tree_needs_border(self):
        graph = build_two_stage()
        graph.links = []
        with pytest.raises(NotTwoStage):
            SchurTreeBackend().prepare(flatten(graph))


class TestInertiaCorrection:
    """测试惯性修正循环"""

    def test_no_correction_when_inertia_correct(self):
        flat = flatten(build_two_stage())
        result = solve_regularized(MonolithicBackend(), system_at(flat), np.ones(5), 0.1, Regularization())
        assert result.corrections == 0
        assert result.delta_w == 0.0

    def test_negative_curvature_grows_delta_w(self):
        result = solve_regularized(MonolithicBackend(), negative_system(), np.ones(2), 0.1, Regularization())
        assert result.delta_w == pytest.approx(1e-4 * 8 ** 5)
        assert result.inertia == (2, 0, 0)
        assert result.corrections == 6

    def test_singular_hessian_gets_regularized(self):
        system = KKTSystem(2, 0, sp.coo_matrix((2, 2)), np.zeros(2), sp.csr_matrix((0, 2)))
        result = solve_regularized(MonolithicBackend(), system, np.ones(2), 0.1, Regularization())
        assert result.delta_w == pytest.approx(1e-4)
        np.testing.assert_allclose(result.direction, np.full(2, 1e4))

    def test_dependent_constraints_get_delta_c(self):
        # 两行相同的雅可比
        jac = sp.csr_matrix(np.array([[1.0, 1.0], [1.0, 1.0]]))
        system = KKTSystem(2, 2, sp.coo_matrix(np.eye(2)), np.zeros(2), jac)
        result = solve_regularized(MonolithicBackend(), system, np.ones(4), 1e-2, Regularization())
        assert result.delta_c == pytest.approx(1e-8 * (1e-2) ** 0.25)
        assert result.inertia == (2, 2, 0)

    def test_gives_up_beyond_limit(self):
        reg = Regularization(delta_w_max=1e-3)
        with pytest.raises(SingularKKT):
            solve_regularized(MonolithicBackend(SymmetricSolver()), negative_system(), np.ones(2), 0.1, reg)


class TestArrowheadParallel:
    """块加边界系统的多线程分解"""

    def test_threads_bitwise_identical(self):
        system, bk = arrowhead_system(blocks=4, size=30, border=5, seed=1)
        steps = []
        for threads in (1, 4):
            with BlockWorkerPool(threads) as pool:
                factor = SchurComplementFactor(bk, SymmetricSolver(), pool)
                step = factor.solve_blocks(bk.rhs_blocks, bk.rhs_border)
                steps.append(bk.scatter(step.d_blocks, step.d_border))
                assert factor.inertia == (system.n, system.m, 0)
        np.testing.assert_array_equal(steps[0], steps[1])
        expected = np.linalg.solve(system.full(0.0, 1e-8).toarray(), np.linspace(-1.0, 1.0, system.dimension))
        np.testing.assert_allclose(steps[0], expected, rtol=1e-7, atol=1e-9)

    def test_blocks_take_dense_path(self):
        _, bk = arrowhead_system(blocks=3, size=40, border=4)
        solver = SymmetricSolver()
        with BlockWorkerPool(2) as pool:
            SchurComplementFactor(bk, solver, pool)
        assert solver.stats["dense"] == 3
        assert solver.stats["sparse"] == 0

    @pytest.mark.slow
    @pytest.mark.skipif((os.cpu_count() or 1) < 4, reason="needs at least 4 cores")
    def test_four_threads_at_least_twice_as_fast(self):
        _, bk = arrowhead_system(blocks=16, size=200, border=20)
        serial = timed_schur(bk, threads=1)
        parallel = timed_schur(bk, threads=4)
        assert serial / parallel >= 2.0, f"speedup {serial / parallel:.2f}"
