# src/domain/kkt/schur.py
"""
Schur 补分解

    S   = K_0 − Σ C_iᵀ K_i⁻¹ C_i
    S d_0 = b_0 − Σ C_iᵀ K_i⁻¹ b_i
    K_i d_i = b_i − C_i d_0

块分解、块回代和边界乘积在线程池中并行，归约按块编号的固定顺序进行。
整体惯性 = Σ inertia(K_i) + inertia(S)。
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Dict, Optional, Tuple

import numpy as np

from src.domain.exceptions.linalg_exceptions import StructurallySingular
from src.domain.exceptions.solver_exceptions import NotTwoStage, SingularBlock, SingularSchur
from src.domain.graph.flatten import FlatNLP
from src.domain.kkt.backend_interface import KKTBackend
from src.domain.kkt.block_kkt import BlockKKT, BlockPartition, assemble_block_kkt, check_affine_links
from src.domain.kkt.system import KKTSystem
from src.domain.linalg.dense import dense_sym_factor
from src.domain.linalg.symmetric_solver import SymmetricSolver
from src.infrastructure.tasks.worker_pool import BlockWorkerPool


@dataclass(frozen=True)
class BlockStep:
    """各块的步长与边界步长"""
    d_blocks: Tuple[np.ndarray, ...]
    d_border: np.ndarray


@dataclass(frozen=True)
class _BlockWork:
    factor: Any
    columns: np.ndarray
    contribution: np.ndarray


class SchurComplementFactor:
    """块 KKT 的 Schur 补分解；构造后不可变，solve 可重复调用"""

    def __init__(
        self,
        bk: BlockKKT,
        solver: SymmetricSolver,
        pool: BlockWorkerPool,
        batch: int = 32,
    ):
        self.bk = bk
        self.pool = pool
        self.batch = max(1, batch)
        work = pool.map(lambda b: self._factor_block(b, solver), range(len(bk.blocks)))
        self.block_factors = [w.factor for w in work]

        dim = bk.schur_dimension
        schur = np.array(bk.border_block, dtype=float, copy=True)
        for w in work:
            if w.columns.size:
                schur[np.ix_(w.columns, w.columns)] -= w.contribution
        self.schur = 0.5 * (schur + schur.T)
        if dim:
            try:
                self.schur_factor = dense_sym_factor(self.schur, solver.zero_tol)
            except StructurallySingular as e:
                err = SingularSchur(dim)
                err.inertia = _add(sum_inertia(self.block_factors), e.inertia)
                raise err from e
            schur_inertia = self.schur_factor.inertia
        else:
            self.schur_factor = None
            schur_inertia = (0, 0, 0)
        self.inertia = _add(sum_inertia(self.block_factors), schur_inertia)

    def _factor_block(self, b: int, solver: SymmetricSolver) -> _BlockWork:
        bk = self.bk
        try:
            factor = solver.factor(bk.blocks[b])
        except StructurallySingular as e:
            err = SingularBlock(b, bk.partition.names[b])
            err.inertia = None
            raise err from e
        coupling = bk.couplings[b]
        columns = np.unique(coupling.indices).astype(np.int64)
        if not columns.size:
            return _BlockWork(factor, columns, np.zeros((0, 0)))
        c_cols = coupling[:, columns]
        contribution = np.zeros((columns.size, columns.size))
        # 以 batch 列为一批做多右端项求解
        for start in range(0, columns.size, self.batch):
            stop = min(start + self.batch, columns.size)
            solved = factor.solve(c_cols[:, start:stop].toarray())
            contribution[:, start:stop] = c_cols.T @ solved
        return _BlockWork(factor, columns, contribution)

    def solve_blocks(self, rhs_blocks, rhs_border) -> BlockStep:
        bk = self.bk
        k = len(bk.blocks)
        y = self.pool.map(lambda b: self.block_factors[b].solve(rhs_blocks[b]), range(k))
        t = np.array(rhs_border, dtype=float, copy=True)
        for b in range(k):
            t -= bk.couplings[b].T @ y[b]
        d_border = self.schur_factor.solve(t) if self.schur_factor is not None else t
        d_blocks = self.pool.map(
            lambda b: self.block_factors[b].solve(rhs_blocks[b] - bk.couplings[b] @ d_border), range(k)
        )
        return BlockStep(tuple(d_blocks), d_border)

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        """在原始 KKT 坐标下求解"""
        part = self.bk.partition
        rhs = np.asarray(rhs, dtype=float)
        step = self.solve_blocks([rhs[idx] for idx in part.blocks], rhs[part.border])
        return self.bk.scatter(step.d_blocks, step.d_border)


def sum_inertia(factors) -> Tuple[int, int, int]:
    total = (0, 0, 0)
    for f in factors:
        total = _add(total, f.inertia)
    return total


def _add(a, b) -> Tuple[int, int, int]:
    return a[0] + b[0], a[1] + b[1], a[2] + b[2]


def schur_solve(
    bk: BlockKKT,
    threads: int = 1,
    solver: Optional[SymmetricSolver] = None,
    batch: int = 32,
) -> BlockStep:
    """对偶 Schur：边界为链接行"""
    with BlockWorkerPool(threads, name="schur") as pool:
        factor = SchurComplementFactor(bk, solver or SymmetricSolver(), pool, batch)
        return factor.solve_blocks(bk.rhs_blocks, bk.rhs_border)


def schur_tree_solve(
    bk: BlockKKT,
    master: str,
    threads: int = 1,
    solver: Optional[SymmetricSolver] = None,
    batch: int = 32,
) -> BlockStep:
    """树形 Schur：边界为主节点块，Schur 维数等于主节点规模"""
    if bk.partition.kind != "tree" or bk.partition.border_name != str(master):
        raise NotTwoStage(f"block system is not bordered by master '{master}'")
    return schur_solve(bk, threads, solver, batch)


class _SchurBackend(KKTBackend):
    kind = "dual"

    def __init__(self, solver: Optional[SymmetricSolver] = None, threads: int = 1, batch: int = 32):
        self.solver = solver or SymmetricSolver()
        self.threads = threads
        self.batch = batch
        self.pool = BlockWorkerPool(threads, name=self.name)
        self.partition: Optional[BlockPartition] = None
        self.last_schur: Optional[np.ndarray] = None

    def _partition(self, flat: FlatNLP) -> BlockPartition:
        raise NotImplementedError

    def prepare(self, flat: FlatNLP) -> None:
        check_affine_links(flat)
        self.partition = self._partition(flat)
        self.logger.info(
            f"{self.name}: {self.partition.num_blocks} 个块, Schur 维数 {self.partition.schur_dimension}",
            extra={"blocks": self.partition.num_blocks, "schur_dimension": self.partition.schur_dimension},
        )

    def factor(self, system: KKTSystem, delta_w: float, delta_c: float) -> SchurComplementFactor:
        if self.partition is None:
            raise RuntimeError("prepare() must be called before factor()")
        bk = assemble_block_kkt(system, self.partition, None, delta_w, delta_c)
        factor = SchurComplementFactor(bk, self.solver, self.pool, self.batch)
        self.last_schur = factor.schur
        return factor

    @property
    def schur_dimension(self) -> int:
        return self.partition.schur_dimension if self.partition else 0

    def get_backend_info(self) -> Dict[str, Any]:
        return {
            "backend": self.name,
            "threads": self.threads,
            "blocks": self.partition.num_blocks if self.partition else 0,
            "schur_dimension": self.schur_dimension,
            "pool": self.pool.get_statistics()["performance"],
        }

    def close(self) -> None:
        self.pool.shutdown()


class SchurDualBackend(_SchurBackend):
    """边界为顶层链接行"""

    name = "schur_dual"

    def _partition(self, flat: FlatNLP) -> BlockPartition:
        return BlockPartition.dual(flat)


class SchurTreeBackend(_SchurBackend):
    """边界为主节点的变量与行"""

    name = "schur_tree"

    def _partition(self, flat: FlatNLP) -> BlockPartition:
        return BlockPartition.tree(flat)
