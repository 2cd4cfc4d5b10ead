# src/domain/kkt/monolithic.py
from __future__ import annotations

from typing import Any, Dict, Optional

from src.domain.kkt.backend_interface import KKTBackend, KKTFactor
from src.domain.kkt.system import KKTSystem
from src.domain.linalg.symmetric_solver import SymmetricSolver


class MonolithicBackend(KKTBackend):
    """整体分解完整的稀疏增广矩阵"""

    name = "monolithic"

    def __init__(self, solver: Optional[SymmetricSolver] = None):
        self.solver = solver or SymmetricSolver()
        self.last_dimension = 0

    def factor(self, system: KKTSystem, delta_w: float, delta_c: float) -> KKTFactor:
        matrix = system.matrix(delta_w, delta_c)
        self.last_dimension = matrix.n
        return self.solver.factor(matrix)

    def get_backend_info(self) -> Dict[str, Any]:
        return {"backend": self.name, "dimension": self.last_dimension, "solver": dict(self.solver.stats)}
