# tests/test_ipm.py
import io

import numpy as np
import pytest
import scipy.sparse as sp

from src.domain.exceptions.solver_exceptions import LineSearchFailure, MaxIterations, NonAffineLink
from src.domain.graph import ConstraintBounds, OptiGraph, flatten
from src.domain.ipm import (
    BoundMasks,
    FilterLineSearch,
    InteriorPointSolver,
    IterationLogger,
    IterationState,
    compute_step,
    constraint_violation,
    fraction_to_boundary,
    kkt_error,
    make_backend,
    update_barrier,
)
from src.domain.ipm.solver import initial_point, relaxed_bounds
from src.domain.kkt import MonolithicBackend, SchurDualBackend
from src.schemas.dtos.request.solver_options import SolverOptions
from src.schemas.enums.solver_enums import SolveStatusEnum
from tests.builders import ANALYTIC_SUITE, build_chain, build_hs071, build_two_stage

BACKENDS = ["monolithic", "schur_dual", "schur_tree"]


class TestBarrierHelpers:
    """测试障碍参数与步长规则"""

    def test_update_barrier_linear_then_superlinear(self):
        assert update_barrier(0.1, 1e-8) == pytest.approx(0.02)
        assert update_barrier(1e-4, 1e-8) == pytest.approx(1e-6)

    def test_update_barrier_floor(self):
        assert update_barrier(1e-8, 1e-8) == pytest.approx(1e-8 / 11)
        assert update_barrier(1e-9, 1e-8) <= 1e-9

    def test_fraction_to_boundary(self):
        v = np.array([1.0, 2.0])
        assert fraction_to_boundary(v, np.array([-2.0, 1.0]), 0.99) == pytest.approx(0.495)
        assert fraction_to_boundary(v, np.array([1.0, 1.0]), 0.99) == 1.0
        mask = np.array([False, True])
        assert fraction_to_boundary(v, np.array([-2.0, 1.0]), 0.99, mask) == 1.0

    def test_constraint_violation_is_l1(self):
        assert constraint_violation(np.array([1.0, -2.0, 0.5])) == pytest.approx(3.5)
        assert constraint_violation(np.zeros(0)) == 0.0

    def test_relaxed_fixed_bounds(self):
        graph = OptiGraph("fixed")
        node = graph.add_node("n")
        x = node.add_variable("x", 2.0, 2.0)
        node.set_objective(x * x)
        lower, upper = relaxed_bounds(flatten(graph))
        assert lower[0] < 2.0 < upper[0]
        assert upper[0] - lower[0] == pytest.approx(4e-8)

    def test_initial_point_pushed_inside(self):
        lower, upper = np.array([0.0, -np.inf]), np.array([1.0, 0.0])
        masks = BoundMasks.from_bounds(lower, upper)
        x = initial_point(np.array([0.0, 5.0]), lower, upper, masks, 1e-2)
        assert x[0] == pytest.approx(1e-2)
        assert x[1] == pytest.approx(-1e-2)

    def test_kkt_error_zero_at_unconstrained_optimum(self):
        state = IterationState(np.zeros(2), np.zeros(0), np.zeros(2), np.zeros(2), 0.1)
        masks = BoundMasks.from_bounds(np.full(2, -np.inf), np.full(2, np.inf))
        err = kkt_error(state, np.zeros(2), sp.csr_matrix((0, 2)), np.zeros(0),
                        np.full(2, -np.inf), np.full(2, np.inf), masks)
        assert err == 0.0


class TestFilter:
    """测试过滤器"""

    def setup_method(self):
        self.search = FilterLineSearch()
        self.search.initialize(1.0)

    def test_empty_filter_accepts_finite_points(self):
        assert self.search.acceptable(0.5, 10.0)
        assert not self.search.acceptable(float("nan"), 1.0)
        assert not self.search.acceptable(1e5, 1.0)

    def test_dominated_point_rejected(self):
        self.search.augment(1.0, 1.0)
        assert not self.search.acceptable(1.0, 1.0)
        assert self.search.acceptable(0.5, 5.0)
        assert self.search.acceptable(2.0, 0.5)

    def test_entry_stored_with_margin(self):
        self.search.augment(1.0, 1.0)
        t_j, p_j = self.search.entries[0]
        assert t_j == pytest.approx(1.0 - 1e-5)
        assert p_j == pytest.approx(1.0 - 1e-5)

    def test_point_on_stored_envelope_accepted(self):
        self.search.augment(1.0, 1.0)
        t_j, p_j = self.search.entries[0]
        assert self.search.acceptable(t_j, p_j)
        assert self.search.acceptable(t_j, 100.0)
        assert self.search.acceptable(100.0, p_j)
        assert not self.search.acceptable(t_j + 1e-9, p_j + 1e-9)

    def test_reset_clears_entries(self):
        self.search.augment(1.0, 1.0)
        self.search.reset()
        assert self.search.entries == []

    def test_backtracking_halves_alpha(self):
        x, dx = np.zeros(1), np.ones(1)

        def trial(xt):
            # α > 0.25 时目标变差
            return 0.0, float((xt[0] - 0.2) ** 2)

        result = self.search.search(x, dx, 1.0, 0.0, 0.04, -0.4, trial)
        assert result.alpha == pytest.approx(0.25)
        assert result.trials == 3
        assert result.f_type

    def test_failure_below_min_step(self):
        search = FilterLineSearch(min_step=0.1)
        search.initialize(0.0)
        with pytest.raises(LineSearchFailure):
            search.search(np.zeros(1), np.ones(1), 1.0, 0.0, 0.0, -1.0, lambda xt: (0.0, 1.0), 7)


class TestInteriorPointSolver:
    """测试完整求解"""

    @pytest.mark.parametrize("backend", BACKENDS)
    def test_two_stage_all_backends(self, backend):
        flat = flatten(build_two_stage())
        report = InteriorPointSolver(SolverOptions(backend=backend)).solve(flat)
        assert report.status == SolveStatusEnum.OPTIMAL.value
        assert report.objective == pytest.approx(14.0 / 3.0, rel=1e-6)
        np.testing.assert_allclose(report.x, [4.0 / 3.0] * 3, atol=1e-6)
        assert report.backend == backend

    def test_optimal_requires_small_barrier(self):
        opts = SolverOptions(tol=1e-6)
        report = InteriorPointSolver(opts).solve(flatten(build_two_stage()))
        assert report.is_optimal
        assert report.kkt_error <= opts.tol
        assert report.mu <= opts.tol

    def test_backends_take_same_path(self):
        flat = flatten(build_two_stage((1.0, 2.0, 4.0)))
        reports = [InteriorPointSolver(SolverOptions(backend=b)).solve(flat) for b in BACKENDS]
        assert max(r.iterations for r in reports) - min(r.iterations for r in reports) <= 1
        for r in reports[1:]:
            assert r.objective == pytest.approx(reports[0].objective, rel=1e-8)

    def test_threads_do_not_change_answer(self):
        flat = flatten(build_two_stage((1.0, 2.0, 4.0, -1.0)))
        one = InteriorPointSolver(SolverOptions(backend="schur_dual", threads=1)).solve(flat)
        many = InteriorPointSolver(SolverOptions(backend="schur_dual", threads=4)).solve(flat)
        assert one.iterations == many.iterations
        assert one.x == many.x

    def test_hs071(self):
        report = InteriorPointSolver(SolverOptions()).solve(flatten(build_hs071()))
        assert report.is_optimal
        assert report.objective == pytest.approx(17.0140173, rel=1e-6)
        np.testing.assert_allclose(report.x[:4], [1.0, 4.7429994, 3.8211503, 1.3794082], atol=1e-5)

    def test_inequality_links(self):
        report = InteriorPointSolver(SolverOptions(backend="schur_dual")).solve(flatten(build_chain()))
        assert report.is_optimal
        assert report.objective == pytest.approx(0.0, abs=1e-6)

    def test_max_iterations_status(self):
        report = InteriorPointSolver(SolverOptions(max_iter=1)).solve(flatten(build_hs071()))
        assert report.status == SolveStatusEnum.MAX_ITER.value
        assert report.iterations == 1
        assert report.error_code is not None

    def test_raise_on_failure(self):
        with pytest.raises(MaxIterations):
            InteriorPointSolver(SolverOptions(max_iter=0)).solve(flatten(build_hs071()), raise_on_failure=True)

    def test_preparation_errors_propagate(self):
        graph = build_two_stage()
        graph.link_constraint(graph.node("s1")["x"] * graph.node("m")["y"], ConstraintBounds.inequality(hi=4.0))
        with pytest.raises(NonAffineLink):
            InteriorPointSolver(SolverOptions(backend="schur_dual")).solve(flatten(graph))

    def test_iteration_log(self):
        stream = io.StringIO()
        InteriorPointSolver(SolverOptions(), IterationLogger(stream)).solve(flatten(build_two_stage()))
        lines = stream.getvalue().splitlines()
        assert lines[0].split()[:3] == ["iter", "objective", "inf_pr"]
        assert lines[1].split()[0] == "0"

    def test_iteration_log_csv(self):
        stream = io.StringIO()
        report = InteriorPointSolver(SolverOptions(), IterationLogger(stream, csv_format=True)).solve(
            flatten(build_two_stage()))
        lines = stream.getvalue().splitlines()
        assert lines[0].startswith("k,objective,inf_pr,inf_du,mu")
        assert len(lines) == report.iterations + 2

    def test_dump_kkt(self, tmp_path):
        InteriorPointSolver(SolverOptions(backend="schur_tree"), dump_kkt=tmp_path / "dump").solve(
            flatten(build_two_stage()))
        assert (tmp_path / "dump" / "kkt.mtx").exists()
        assert (tmp_path / "dump" / "schur.mtx").exists()

    def test_report_metadata(self):
        report = InteriorPointSolver(SolverOptions(backend="schur_tree")).solve(flatten(build_two_stage()))
        assert report.schur_dimension == 1
        assert report.metadata["n_vars"] == 3
        assert report.metadata["backend_info"]["backend"] == "schur_tree"
        assert report.timings.total >= report.timings.linear_solve


class TestComputeStep:
    """单独计算搜索方向"""

    def test_same_direction_for_all_backends(self):
        flat = flatten(build_two_stage((1.0, 3.0, 5.0)))
        n, m = flat.n_vars, flat.n_cons
        state = IterationState(np.full(n, 0.5), np.zeros(m), np.full(n, 0.1), np.full(n, 0.1), 0.1)
        mono = compute_step(state, flat, MonolithicBackend())
        dual = compute_step(state, flat, SchurDualBackend())
        np.testing.assert_allclose(dual.d_x, mono.d_x, atol=1e-10)
        np.testing.assert_allclose(dual.d_lambda, mono.d_lambda, atol=1e-10)
        np.testing.assert_allclose(dual.d_zl, mono.d_zl, atol=1e-10)

    def test_make_backend(self):
        assert make_backend(SolverOptions(backend="schur-tree")).name == "schur_tree"
        assert make_backend(SolverOptions()).name == "monolithic"


class TestAnalyticSuite:
    """已知最优值的小型解析问题"""

    @pytest.mark.parametrize("name", sorted(ANALYTIC_SUITE))
    def test_reaches_known_optimum(self, name):
        build, optimum = ANALYTIC_SUITE[name]
        report = InteriorPointSolver(SolverOptions(max_iter=100)).solve(flatten(build()))
        assert report.is_optimal, report.message
        assert report.iterations <= 100
        assert abs(report.objective - optimum) <= 1e-6

    def test_suite_has_ten_problems(self):
        assert len(ANALYTIC_SUITE) == 10


class TestStepCallback:
    """on_step 回调"""

    def test_called_once_per_iteration(self):
        seen = []
        report = InteriorPointSolver(SolverOptions(), on_step=lambda s, d: seen.append((s.k, d.d_x.copy()))).solve(
            flatten(build_two_stage()))
        assert [k for k, _ in seen] == list(range(report.iterations))

    def test_recorded_steps_reproducible_by_compute_step(self):
        flat = flatten(build_two_stage((1.0, 2.0, 4.0)))
        seen = []
        InteriorPointSolver(SolverOptions(), on_step=lambda s, d: seen.append((s, d))).solve(flat)
        state, direction = seen[1]
        again = compute_step(state, flat, MonolithicBackend())
        np.testing.assert_allclose(again.d_x, direction.d_x, rtol=1e-10, atol=1e-12)
