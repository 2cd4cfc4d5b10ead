# src/application/services/solver_service.py
from pathlib import Path
from typing import Any, Optional, Union

from src.application.config.settings import Settings
from src.application.services.service_interface import BaseService
from src.domain.graph.flatten import FlatNLP, flatten
from src.domain.graph.optigraph import OptiGraph
from src.domain.ipm.iteration_log import IterationLogger
from src.domain.ipm.solver import InteriorPointSolver
from src.infrastructure.utils.file_utils import FileUtils
from src.schemas.dtos.request.solver_options import SolverOptions
from src.schemas.dtos.response.solve_report import RunReport, SolveReport


class SolverService(BaseService):
    """展开图模型并用内点法求解"""

    def __init__(self, settings: Optional[Settings] = None):
        super().__init__(settings)

    def options(self, **overrides: Any) -> SolverOptions:
        """Settings 默认值 + 调用方覆盖（None 表示未给出）"""
        return SolverOptions.from_settings(self.settings, overrides)

    def flatten(self, graph: OptiGraph) -> FlatNLP:
        flat = flatten(graph)
        self.logger.info(
            f"模型 '{graph.name}' 展开完成: {flat.n_vars} 个变量, {flat.n_cons} 个约束",
            extra={"blocks": flat.structure.num_blocks, "border_rows": int(flat.structure.border_rows.size)},
        )
        return flat

    def solve(
        self,
        graph: Union[OptiGraph, FlatNLP],
        options: Optional[SolverOptions] = None,
        iteration_logger: Optional[IterationLogger] = None,
        dump_kkt: Optional[Union[str, Path]] = None,
    ) -> SolveReport:
        """求解失败不抛异常，而是体现在 report.status 中"""
        options = options or self.options()
        flat = graph if isinstance(graph, FlatNLP) else self.flatten(graph)
        solver = InteriorPointSolver(options, iteration_logger, Path(dump_kkt) if dump_kkt else None)
        report = solver.solve(flat)
        self.logger.info(
            f"求解完成: {report.status}",
            extra={"backend": report.backend, "threads": report.threads, "iterations": report.iterations,
                   "total_time": report.timings.total},
        )
        return report

    def append_report(self, path: Union[str, Path], model: str, report: SolveReport) -> Path:
        row = RunReport.from_report(model, report)
        return FileUtils.append_csv_rows(path, RunReport.COLUMNS, [row.row()])
