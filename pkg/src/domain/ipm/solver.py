# src/domain/ipm/solver.py
"""
原始-对偶内点法

    min f(x)  s.t.  c(x) = 0,  l ≤ x ≤ u

双侧对数障碍，单调 μ 更新，惯性修正，过滤线搜索。
每次迭代解增广系统 K d = −(∇φ + Jᵀλ, c)，界乘子步长由
d_z_l = μ/(x−l) − z_l − Σ_l d_x，d_z_u = μ/(u−x) − z_u + Σ_u d_x 恢复。
"""
from __future__ import annotations

import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional, Tuple

import numpy as np

from src.domain.exceptions.base_exception import DomainException
from src.domain.exceptions.solver_exceptions import BackendError, LineSearchFailure, MaxIterations
from src.domain.graph.flatten import FlatNLP
from src.domain.ipm.barrier import (
    barrier_gradient,
    barrier_objective,
    constraint_violation,
    kkt_error,
    slacks,
    update_barrier,
)
from src.domain.ipm.evaluator import NLPEvaluator
from src.domain.ipm.iteration_log import IterationLogger, IterationRecord
from src.domain.ipm.line_search import FilterLineSearch, fraction_to_boundary
from src.domain.ipm.state import BoundMasks, IterationState, SearchDirection
from src.domain.kkt.backend_interface import KKTBackend, KKTSolution, Regularization, solve_regularized
from src.domain.kkt.monolithic import MonolithicBackend
from src.domain.kkt.schur import SchurDualBackend, SchurTreeBackend
from src.domain.kkt.system import KKTSystem, kkt_rhs
from src.domain.linalg.matrix_market import write_matrix_market
from src.domain.linalg.sparse_sym import SparseSym
from src.domain.linalg.symmetric_solver import SymmetricSolver
from src.infrastructure.logging.logger import LoggerMixin
from src.infrastructure.tasks.worker_pool import BlockWorkerPool
from src.schemas.dtos.request.solver_options import SolverOptions
from src.schemas.dtos.response.solve_report import SolveReport, SolveTimings
from src.schemas.enums.solver_enums import BackendEnum, SolveStatusEnum

# 界乘子安全保护 κ_Σ
KAPPA_SIGMA = 1e10

StepCallback = Callable[[IterationState, SearchDirection], None]


def make_backend(opts: SolverOptions, solver: Optional[SymmetricSolver] = None) -> KKTBackend:
    solver = solver or SymmetricSolver(opts.pivot_tol, opts.dense_threshold, opts.zero_pivot_tol, 0)
    backend = opts.backend_enum
    if backend == BackendEnum.MONOLITHIC:
        return MonolithicBackend(solver)
    if backend == BackendEnum.SCHUR_DUAL:
        return SchurDualBackend(solver, opts.threads, opts.schur_batch)
    return SchurTreeBackend(solver, opts.threads, opts.schur_batch)


def relaxed_bounds(flat: FlatNLP) -> Tuple[np.ndarray, np.ndarray]:
    """上下界相等的变量两侧各放宽一点，使内部非空"""
    lower = flat.lower.astype(float).copy()
    upper = flat.upper.astype(float).copy()
    fixed = np.isfinite(lower) & np.isfinite(upper) & (upper - lower <= 1e-12 * np.maximum(1.0, np.abs(lower)))
    if np.any(fixed):
        eps = 1e-8 * np.maximum(1.0, np.abs(lower[fixed]))
        lower[fixed] -= eps
        upper[fixed] += eps
    return lower, upper


def initial_point(x0: np.ndarray, lower: np.ndarray, upper: np.ndarray, masks: BoundMasks, push: float) -> np.ndarray:
    """把初始点推入界内：p = min(κ₁·max(1, |界|), κ₁·(u − l))"""
    x = np.asarray(x0, dtype=float).copy()
    width = np.where(masks.lower & masks.upper, upper - lower, np.inf)
    p_l = np.minimum(push * np.maximum(1.0, np.abs(np.where(masks.lower, lower, 0.0))), push * width)
    p_u = np.minimum(push * np.maximum(1.0, np.abs(np.where(masks.upper, upper, 0.0))), push * width)
    x = np.where(masks.lower, np.maximum(x, lower + p_l), x)
    x = np.where(masks.upper, np.minimum(x, upper - p_u), x)
    return x


@dataclass(frozen=True)
class StepResult:
    direction: SearchDirection
    kkt: KKTSolution
    system: KKTSystem
    grad_phi: np.ndarray


def newton_step(
    state: IterationState,
    evaluator: NLPEvaluator,
    backend: KKTBackend,
    lower: np.ndarray,
    upper: np.ndarray,
    masks: BoundMasks,
    reg: Regularization,
    refinement_steps: int,
    grad: Optional[np.ndarray] = None,
    jac=None,
    c: Optional[np.ndarray] = None,
) -> StepResult:
    """在当前点组装并求解增广系统，恢复界乘子方向"""
    x, mu = state.x, state.mu
    grad = evaluator.gradient(x) if grad is None else grad
    jac = evaluator.jacobian(x) if jac is None else jac
    c = evaluator.constraints(x) if c is None else c
    n = x.size

    s_l, s_u = slacks(x, lower, upper, masks)
    sigma_l = np.where(masks.lower, state.z_l / s_l, 0.0)
    sigma_u = np.where(masks.upper, state.z_u / s_u, 0.0)
    system = KKTSystem(n, c.size, evaluator.hessian(x, 1.0, state.lam), sigma_l + sigma_u, jac)
    grad_phi = barrier_gradient(grad, x, lower, upper, masks, mu)
    rhs = kkt_rhs(grad_phi, jac, state.lam, c)
    try:
        sol = solve_regularized(backend, system, rhs, mu, reg, refinement_steps)
    except DomainException:
        raise
    except Exception as e:
        raise BackendError(backend.name, e) from e

    dx = sol.direction[:n]
    dz_l = np.where(masks.lower, mu / s_l - state.z_l - sigma_l * dx, 0.0)
    dz_u = np.where(masks.upper, mu / s_u - state.z_u + sigma_u * dx, 0.0)
    direction = SearchDirection(dx, sol.direction[n:], dz_l, dz_u)
    return StepResult(direction, sol, system, grad_phi)


def compute_step(
    state: IterationState,
    flat: FlatNLP,
    backend: KKTBackend,
    opts: Optional[SolverOptions] = None,
) -> SearchDirection:
    """单独计算一个搜索方向（后端会先针对 flat 做准备）"""
    opts = opts or SolverOptions()
    backend.prepare(flat)
    lower, upper = relaxed_bounds(flat)
    masks = BoundMasks.from_bounds(lower, upper)
    reg = Regularization(opts.delta_w0, opts.delta_w_growth, opts.delta_w_max, opts.delta_c, opts.delta_c_exponent)
    return newton_step(state, NLPEvaluator(flat), backend, lower, upper, masks, reg, opts.refinement_steps).direction


class InteriorPointSolver(LoggerMixin):
    """过滤线搜索原始-对偶内点法"""

    def __init__(
        self,
        options: Optional[SolverOptions] = None,
        iteration_logger: Optional[IterationLogger] = None,
        dump_kkt: Optional[Path] = None,
        on_step: Optional[StepCallback] = None,
    ):
        self.options = options or SolverOptions()
        self.iteration_logger = iteration_logger or IterationLogger(enabled=False)
        self.dump_kkt = Path(dump_kkt) if dump_kkt else None
        # 每次求得搜索方向后以 (当前迭代点, 方向) 调用
        self.on_step = on_step
        self.backend: Optional[KKTBackend] = None

    def _regularization(self) -> Regularization:
        o = self.options
        return Regularization(o.delta_w0, o.delta_w_growth, o.delta_w_max, o.delta_c, o.delta_c_exponent)

    def solve(self, flat: FlatNLP, raise_on_failure: bool = False) -> SolveReport:
        opts = self.options
        start = time.perf_counter()
        backend = make_backend(opts)
        self.backend = backend
        pool = BlockWorkerPool(opts.threads, name="eval")
        run = _Run(flat, opts, backend, pool, self._regularization(), self.iteration_logger, self.dump_kkt,
                   self.on_step)
        try:
            backend.prepare(flat)
            status, message, code = SolveStatusEnum.OPTIMAL, "", None
            try:
                run.iterate()
            except MaxIterations as e:
                status, message, code = SolveStatusEnum.MAX_ITER, str(e), e.error_code
                if raise_on_failure:
                    raise
            except LineSearchFailure as e:
                status, message, code = SolveStatusEnum.INFEASIBLE_STEP, str(e), e.error_code
                if raise_on_failure:
                    raise
            except DomainException as e:
                status, message, code = SolveStatusEnum.ERROR, str(e), e.error_code
                if raise_on_failure:
                    raise
            if status != SolveStatusEnum.OPTIMAL:
                self.logger.warning(f"求解未收敛: {message}", extra={"status": status.value})
        finally:
            backend.close()
            pool.shutdown()

        ev = run.evaluator
        report = SolveReport(
            status=status,
            objective=run.f,
            iterations=run.k,
            kkt_error=run.error,
            mu=run.state.mu if run.state else opts.mu0,
            backend=backend.name,
            threads=opts.threads,
            timings=SolveTimings(
                function_eval=ev.timings["function_eval"] if ev else 0.0,
                derivative_eval=ev.timings["derivative_eval"] if ev else 0.0,
                linear_solve=run.linear_time,
                total=time.perf_counter() - start,
            ),
            schur_dimension=getattr(backend, "schur_dimension", None),
            inertia_corrections=run.corrections_total,
            message=message,
            error_code=code,
            x=run.state.x.tolist() if run.state else [],
            lam=run.state.lam.tolist() if run.state else [],
            metadata={"model": flat.name, "n_vars": flat.n_vars, "n_cons": flat.n_cons, "n_links": flat.n_links,
                      "jacobian_nnz": ev.jacobian_nnz if ev else 0, "hessian_nnz": ev.hessian_nnz if ev else 0,
                      "backend_info": backend.get_backend_info()},
        )
        self.logger.info(
            f"求解结束: {report.status}, 目标 {report.objective:.10g}, 迭代 {report.iterations}",
            extra={"status": report.status, "iterations": report.iterations, "backend": backend.name},
        )
        return report


class _Run:
    """一次求解的可变状态"""

    def __init__(self, flat, opts, backend, pool, reg, iteration_logger, dump_kkt, on_step=None):
        self.flat = flat
        self.opts = opts
        self.backend = backend
        self.reg = reg
        self.log = iteration_logger
        self.dump_kkt = dump_kkt
        self.on_step = on_step
        self.lower, self.upper = relaxed_bounds(flat)
        self.masks = BoundMasks.from_bounds(self.lower, self.upper)
        self.evaluator: Optional[NLPEvaluator] = NLPEvaluator(flat, pool)
        self.search = FilterLineSearch.from_options(opts)
        self.state: Optional[IterationState] = None
        self.f = float("nan")
        self.k = 0
        self.error = float("inf")
        self.linear_time = 0.0
        self.corrections_total = 0

    def _clip_duals(self, x: np.ndarray, z_l: np.ndarray, z_u: np.ndarray, mu: float):
        s_l, s_u = slacks(x, self.lower, self.upper, self.masks)
        z_l = np.where(self.masks.lower, np.clip(z_l, mu / (KAPPA_SIGMA * s_l), KAPPA_SIGMA * mu / s_l), 0.0)
        z_u = np.where(self.masks.upper, np.clip(z_u, mu / (KAPPA_SIGMA * s_u), KAPPA_SIGMA * mu / s_u), 0.0)
        return z_l, z_u

    def iterate(self) -> None:
        opts, ev, masks = self.opts, self.evaluator, self.masks
        lower, upper = self.lower, self.upper
        n, m = self.flat.n_vars, self.flat.n_cons

        mu = opts.mu0
        x = initial_point(self.flat.x0, lower, upper, masks, opts.bound_push)
        s_l, s_u = slacks(x, lower, upper, masks)
        state = IterationState(
            x=x,
            lam=np.zeros(m),
            z_l=np.where(masks.lower, mu / s_l, 0.0),
            z_u=np.where(masks.upper, mu / s_u, 0.0),
            mu=mu,
        )
        self.state = state
        f = ev.objective(x)
        c = ev.constraints(x)
        self.f = f
        self.search.initialize(constraint_violation(c))

        alpha, delta_w, corrections, trials = 0.0, 0.0, 0, 0
        while True:
            grad = ev.gradient(state.x)
            jac = ev.jacobian(state.x)
            self.error = kkt_error(state, grad, jac, c, lower, upper, masks, 0.0, opts.s_max)
            inf_du = _inf_norm(grad + (jac.T @ state.lam if m else 0.0) - state.z_l + state.z_u)
            self.log.log(IterationRecord(state.k, f, _inf_norm(c), inf_du, state.mu, alpha, delta_w,
                                         corrections, trials))
            if self.error <= opts.tol and state.mu <= opts.tol:
                return
            if state.k >= opts.max_iter:
                raise MaxIterations(opts.max_iter, self.error)

            # 障碍子问题收敛后降低 μ，必要时连续降低
            mu = state.mu
            while True:
                err_mu = kkt_error(state.with_updates(mu=mu), grad, jac, c, lower, upper, masks, mu, opts.s_max)
                if err_mu > opts.kappa_epsilon * mu:
                    break
                new_mu = update_barrier(mu, opts.tol, opts.mu_linear_factor, opts.mu_superlinear_power)
                if new_mu >= mu:
                    break
                mu = new_mu
                self.search.reset()
            state = state.with_updates(mu=mu)

            t0 = time.perf_counter()
            step = newton_step(state, ev, self.backend, lower, upper, masks, self.reg, opts.refinement_steps,
                               grad, jac, c)
            self.linear_time += time.perf_counter() - t0
            d = step.direction
            delta_w, corrections = step.kkt.delta_w, step.kkt.corrections
            self.corrections_total += corrections
            if self.dump_kkt is not None and state.k == 0:
                self._dump(step)
            if self.on_step is not None:
                self.on_step(state, d)

            tau = opts.fraction_to_boundary
            s_l, s_u = slacks(state.x, lower, upper, masks)
            alpha_max = min(fraction_to_boundary(s_l, d.d_x, tau, masks.lower),
                            fraction_to_boundary(s_u, -d.d_x, tau, masks.upper))
            alpha_z = min(fraction_to_boundary(state.z_l, d.d_zl, tau, masks.lower),
                          fraction_to_boundary(state.z_u, d.d_zu, tau, masks.upper))

            theta = constraint_violation(c)
            phi = barrier_objective(f, state.x, lower, upper, masks, mu)
            cache = {}

            def trial(xt: np.ndarray) -> Tuple[float, float]:
                ft = ev.objective(xt)
                ct = ev.constraints(xt)
                cache["f"], cache["c"] = ft, ct
                return constraint_violation(ct), barrier_objective(ft, xt, lower, upper, masks, mu)

            result = self.search.search(state.x, d.d_x, alpha_max, theta, phi,
                                        float(step.grad_phi @ d.d_x), trial, state.k)
            alpha, trials = result.alpha, result.trials
            x_new = state.x + alpha * d.d_x
            z_l, z_u = self._clip_duals(x_new, state.z_l + alpha_z * d.d_zl, state.z_u + alpha_z * d.d_zu, mu)
            state = IterationState(x_new, state.lam + alpha * d.d_lambda, z_l, z_u, mu, state.k + 1)
            s_l, s_u = slacks(state.x, lower, upper, masks)
            if np.any(s_l[masks.lower] <= 0.0) or np.any(s_u[masks.upper] <= 0.0):
                raise LineSearchFailure(alpha, state.k)
            f, c = cache["f"], cache["c"]
            self.state, self.f, self.k = state, f, state.k

    def _dump(self, step: StepResult) -> None:
        directory = self.dump_kkt
        directory.mkdir(parents=True, exist_ok=True)
        kkt = step.kkt
        write_matrix_market(directory / "kkt.mtx", step.system.matrix(kkt.delta_w, kkt.delta_c),
                            comment=f"delta_w={kkt.delta_w} delta_c={kkt.delta_c}")
        schur = getattr(self.backend, "last_schur", None)
        if schur is not None:
            write_matrix_market(directory / "schur.mtx", SparseSym.from_matrix(schur))


def _inf_norm(v) -> float:
    v = np.asarray(v)
    return float(np.max(np.abs(v))) if v.size else 0.0
