# src/domain/linalg/__init__.py
from src.domain.linalg.dense import DenseFactorization, dense_solve, dense_sym_factor
from src.domain.linalg.ldlt import Factorization, inertia_of_blocks, ldlt_factor, refine
from src.domain.linalg.matrix_market import read_matrix_market, write_matrix_market
from src.domain.linalg.ordering import amd_order, inverse_permutation
from src.domain.linalg.sparse_sym import SparseSym
from src.domain.linalg.symmetric_solver import SymmetricSolver

__all__ = [
    "DenseFactorization",
    "Factorization",
    "SparseSym",
    "SymmetricSolver",
    "amd_order",
    "dense_solve",
    "dense_sym_factor",
    "inertia_of_blocks",
    "inverse_permutation",
    "ldlt_factor",
    "read_matrix_market",
    "refine",
    "write_matrix_market",
]
