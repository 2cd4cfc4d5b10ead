# src/domain/linalg/matrix_market.py
"""Matrix Market 读写（用于导出 KKT 矩阵或读入测试矩阵）"""
from __future__ import annotations

from pathlib import Path
from typing import Union

import scipy.io
import scipy.sparse as sp

from src.domain.linalg.sparse_sym import SparseSym


def write_matrix_market(path: Union[str, Path], matrix: SparseSym, comment: str = "") -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    scipy.io.mmwrite(str(path), sp.coo_matrix(matrix.to_full()), comment=comment, symmetry="symmetric")
    return path


def read_matrix_market(path: Union[str, Path]) -> SparseSym:
    return SparseSym.from_matrix(sp.csc_matrix(scipy.io.mmread(str(path))))
