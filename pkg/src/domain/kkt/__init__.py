# src/domain/kkt/__init__.py
from src.domain.kkt.backend_interface import (
    KKTBackend,
    KKTSolution,
    Regularization,
    solve_regularized,
)
from src.domain.kkt.block_kkt import BlockKKT, BlockPartition, assemble_block_kkt, check_affine_links
from src.domain.kkt.monolithic import MonolithicBackend
from src.domain.kkt.schur import (
    BlockStep,
    SchurComplementFactor,
    SchurDualBackend,
    SchurTreeBackend,
    schur_solve,
    schur_tree_solve,
)
from src.domain.kkt.system import KKTSystem, kkt_rhs

__all__ = [
    "BlockKKT",
    "BlockPartition",
    "BlockStep",
    "KKTBackend",
    "KKTSolution",
    "KKTSystem",
    "MonolithicBackend",
    "Regularization",
    "SchurComplementFactor",
    "SchurDualBackend",
    "SchurTreeBackend",
    "assemble_block_kkt",
    "check_affine_links",
    "kkt_rhs",
    "schur_solve",
    "schur_tree_solve",
    "solve_regularized",
]
