# src/domain/kkt/block_kkt.py
"""
块加边界（箭头形）KKT 系统

KKT 坐标按块重排为 [块 1 | 块 2 | … | 边界]：

    [ K_1             C_1 ]
    [      K_2        C_2 ]
    [           …      …  ]
    [ C_1ᵀ C_2ᵀ  …    K_0 ]

- 对偶 Schur：块 = 顶层节点/子图（变量 + 内部行），边界 = 顶层链接行，K_0 = −δ_c I
- 树形 Schur：边界 = 主节点块（变量 + 行），每个子块吸收连接它与主节点的链接行
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
import scipy.sparse as sp

from src.domain.exceptions.solver_exceptions import BackendError, NonAffineLink, NotTwoStage
from src.domain.graph.flatten import FlatNLP
from src.domain.kkt.system import KKTSystem
from src.domain.linalg.sparse_sym import SparseSym


@dataclass(frozen=True)
class BlockPartition:
    """KKT 坐标到块与边界的划分"""
    kind: str
    names: Tuple[str, ...]
    blocks: Tuple[np.ndarray, ...]
    border: np.ndarray
    dimension: int
    border_name: Optional[str] = None

    @property
    def num_blocks(self) -> int:
        return len(self.blocks)

    @property
    def schur_dimension(self) -> int:
        return int(self.border.size)

    @property
    def permutation(self) -> np.ndarray:
        return np.concatenate([*self.blocks, self.border]).astype(np.int64)

    @classmethod
    def dual(cls, flat: FlatNLP) -> "BlockPartition":
        n = flat.n_vars
        structure = flat.structure
        blocks = tuple(
            np.concatenate([b.var_index, n + b.row_index]).astype(np.int64) for b in structure.blocks
        )
        return cls(
            kind="dual",
            names=tuple(b.name for b in structure.blocks),
            blocks=blocks,
            border=(n + structure.border_rows).astype(np.int64),
            dimension=n + flat.n_cons,
        )

    @classmethod
    def tree(cls, flat: FlatNLP) -> "BlockPartition":
        n = flat.n_vars
        structure = flat.structure
        if structure.border_rows.size == 0:
            raise NotTwoStage("no top-level linking constraints")
        master = structure.master
        if master is None:
            raise NotTwoStage("no top-level node is touched by every top-level link")
        owner = structure.block_of_node()
        absorbed: List[List[int]] = [[] for _ in structure.blocks]
        for row in structure.border_rows.tolist():
            touched = {owner[nid] for nid in flat.constraints[row].support} - {master}
            if len(touched) != 1:
                raise NotTwoStage(f"link row {row} touches {len(touched)} non-master blocks", link_index=row)
            absorbed[touched.pop()].append(row)

        names: List[str] = []
        blocks: List[np.ndarray] = []
        for b, block in enumerate(structure.blocks):
            if b == master:
                continue
            rows = np.concatenate([block.row_index, np.asarray(absorbed[b], dtype=np.int64)])
            blocks.append(np.concatenate([block.var_index, n + rows]).astype(np.int64))
            names.append(block.name)
        mb = structure.blocks[master]
        border = np.concatenate([mb.var_index, n + mb.row_index]).astype(np.int64)
        return cls("tree", tuple(names), tuple(blocks), border, n + flat.n_cons, mb.name)


def check_affine_links(flat: FlatNLP, rows: Optional[np.ndarray] = None) -> None:
    """边界链接必须是仿射的，否则 W 出现跨块项"""
    rows = flat.structure.border_rows if rows is None else rows
    for row in np.asarray(rows).tolist():
        con = flat.constraints[row]
        if not con.expr.compile().is_affine:
            raise NonAffineLink(row, con.support)


@dataclass(frozen=True)
class BlockKKT:
    """重排后的块 KKT：K_n、边界耦合 C_n、K_0 以及对应的右端项"""
    partition: BlockPartition
    blocks: Tuple[SparseSym, ...]
    couplings: Tuple[sp.csr_matrix, ...]
    border_block: np.ndarray
    rhs_blocks: Tuple[np.ndarray, ...]
    rhs_border: np.ndarray

    @property
    def schur_dimension(self) -> int:
        return self.partition.schur_dimension

    def assembled(self) -> sp.csr_matrix:
        """按块顺序重新拼成完整矩阵"""
        k = len(self.blocks)
        grid: List[List[Optional[sp.spmatrix]]] = [[None] * (k + 1) for _ in range(k + 1)]
        for i, (blk, cpl) in enumerate(zip(self.blocks, self.couplings)):
            grid[i][i] = blk.to_full()
            grid[i][k] = cpl
            grid[k][i] = cpl.T
        grid[k][k] = sp.csr_matrix(self.border_block)
        if k == 0:
            return sp.csr_matrix(self.border_block)
        return sp.bmat(grid, format="csr")

    def rhs(self) -> np.ndarray:
        return np.concatenate([*self.rhs_blocks, self.rhs_border])

    def scatter(self, d_blocks, d_border) -> np.ndarray:
        """把块解写回原始 KKT 坐标"""
        out = np.empty(self.partition.dimension)
        for idx, d in zip(self.partition.blocks, d_blocks):
            out[idx] = d
        out[self.partition.border] = d_border
        return out


def assemble_block_kkt(
    system: KKTSystem,
    partition: BlockPartition,
    rhs: Optional[np.ndarray] = None,
    delta_w: float = 0.0,
    delta_c: float = 0.0,
) -> BlockKKT:
    """从正则化后的增广系统切出各块；块之间出现边界以外的耦合时报错"""
    full = system.full(delta_w, delta_c).tocsr()
    rhs = np.zeros(system.dimension) if rhs is None else np.asarray(rhs, dtype=float)
    border = partition.border

    blocks: List[SparseSym] = []
    couplings: List[sp.csr_matrix] = []
    rhs_blocks: List[np.ndarray] = []
    counted = 0
    for idx in partition.blocks:
        rows = full[idx]
        k_i = rows[:, idx]
        c_i = rows[:, border].tocsr()
        blocks.append(SparseSym.from_matrix(k_i))
        couplings.append(c_i)
        rhs_blocks.append(rhs[idx])
        counted += k_i.count_nonzero() + 2 * c_i.count_nonzero()
    k0 = full[border][:, border].toarray()
    counted += int(np.count_nonzero(k0))
    if counted != full.count_nonzero():
        raise BackendError(
            f"schur_{partition.kind}",
            ValueError(f"{full.count_nonzero() - counted} nonzeros couple blocks outside the border"),
        )
    return BlockKKT(partition, tuple(blocks), tuple(couplings), k0, tuple(rhs_blocks), rhs[border])
