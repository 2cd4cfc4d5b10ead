# src/application/services/bench_service.py
from pathlib import Path
from statistics import mean
from typing import Any, List, Optional, Sequence, Union

from src.application.config.settings import Settings
from src.application.services.service_interface import BaseService
from src.application.services.solver_service import SolverService
from src.domain.graph.flatten import FlatNLP
from src.domain.graph.optigraph import OptiGraph
from src.infrastructure.utils.file_utils import FileUtils
from src.schemas.dtos.response.solve_report import RunReport
from src.schemas.enums.solver_enums import BackendEnum


class BenchService(BaseService):
    """
    基准测试：每个 (后端, 线程数) 组合运行 repeats + 1 次，第一次作为预热丢弃，
    其余取平均；输出与 RunReport.COLUMNS 对应的表格
    """

    def __init__(self, settings: Optional[Settings] = None, solver_service: Optional[SolverService] = None):
        super().__init__(settings)
        self.solver_service = solver_service or SolverService(self.settings)

    def run(
        self,
        model: str,
        graph: Union[OptiGraph, FlatNLP],
        backends: Sequence[Union[str, BackendEnum]],
        threads: Sequence[int],
        repeats: int = 3,
        **option_overrides: Any,
    ) -> List[RunReport]:
        flat = graph if isinstance(graph, FlatNLP) else self.solver_service.flatten(graph)
        rows: List[RunReport] = []
        for backend in backends:
            for n_threads in threads:
                options = self.solver_service.options(backend=backend, threads=n_threads, **option_overrides)
                self.logger.info(f"基准: {options.backend} × {n_threads} 线程", extra={"repeats": repeats})
                runs = [self.solver_service.solve(flat, options) for _ in range(repeats + 1)][1:]
                rows.append(self._average(model, runs, repeats))
        return rows

    @staticmethod
    def _average(model: str, runs, repeats: int) -> RunReport:
        timed = [RunReport.from_report(model, r, repeats) for r in runs]
        last = timed[-1]
        return last.model_copy(update={
            "total_time": mean(r.total_time for r in timed),
            "linear_time": mean(r.linear_time for r in timed),
            "function_time": mean(r.function_time for r in timed),
            "total_per_iter": mean(r.total_per_iter for r in timed),
            "linear_per_iter": mean(r.linear_per_iter for r in timed),
        })

    def write(self, rows: Sequence[RunReport], path: Union[str, Path]) -> Path:
        return FileUtils.write_csv(path, RunReport.COLUMNS, [r.row() for r in rows])
