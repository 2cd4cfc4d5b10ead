# src/application/services/model_service.py
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import numpy as np

from src.application.config.models.model_settings import ModelSettings, get_model_settings
from src.application.config.settings import Settings
from src.application.services.service_interface import BaseService
from src.domain.exceptions.validation_exception import ConfigError
from src.domain.graph.aggregate import aggregate, aggregate_all
from src.domain.graph.optigraph import OptiGraph
from src.domain.graph.partition import Partition, heuristic_partition, partition
from src.domain.graph.structure import adjacency_export, to_dot, write_adjacency_csv
from src.domain.models.demand import demand_matrix, write_demand_csv
from src.domain.models.gas import build_gas, gas_statistics
from src.domain.models.pid import build_pid, pid_time_partition
from src.infrastructure.serialization.model_file_codec import read_model_file, write_model_file
from src.infrastructure.utils.file_utils import FileUtils
from src.schemas.dtos.request.gas_config import GasConfig
from src.schemas.dtos.request.pid_config import PidConfig
from src.schemas.enums.solver_enums import ExportFormatEnum, ModelKindEnum


class ModelService(BaseService):
    """模型生成、读写、分区、聚合与结构导出"""

    def __init__(self, settings: Optional[Settings] = None, model_settings: Optional[ModelSettings] = None):
        super().__init__(settings)
        self.model_settings = model_settings or get_model_settings()

    # ---- 配置 ----
    def pid_config(self, **overrides: Any) -> PidConfig:
        return PidConfig.from_defaults(self.model_settings.get_model_defaults("pid"), **overrides)

    def gas_config(self, **overrides: Any) -> GasConfig:
        return GasConfig.from_defaults(self.model_settings.get_model_defaults("gas"), **overrides)

    # ---- 生成 ----
    def generate(self, kind: Union[str, ModelKindEnum], **overrides: Any) -> OptiGraph:
        if not ModelKindEnum.has_value(str(kind)):
            raise ConfigError("model", f"unknown model '{kind}', expected one of {ModelKindEnum.list_values()}")
        kind = ModelKindEnum(str(kind))
        if kind == ModelKindEnum.PID:
            graph = build_pid(self.pid_config(**overrides))
        else:
            graph = build_gas(self.gas_config(**overrides))
        self.logger.info(f"已生成模型 {kind.value}",
                         extra={"nodes": graph.num_nodes, "variables": graph.num_variables})
        return graph

    # ---- 文件 ----
    def load(self, path: Union[str, Path]) -> OptiGraph:
        return read_model_file(path)

    def save(self, graph: OptiGraph, path: Union[str, Path]) -> Path:
        return write_model_file(graph, path)

    # ---- 结构 ----
    def partition(
        self,
        graph: OptiGraph,
        parts: Optional[int] = None,
        membership: Optional[List[int]] = None,
        by_time: Optional[int] = None,
    ) -> OptiGraph:
        """三选一：启发式 P 部分、给定成员向量、按时间窗口（PID）"""
        chosen = [v is not None for v in (parts, membership, by_time)]
        if sum(chosen) != 1:
            raise ConfigError("partition", "give exactly one of parts, membership or by_time")
        if parts is not None:
            p = heuristic_partition(graph, parts)
        elif membership is not None:
            p = Partition.from_membership(membership)
        else:
            p = pid_time_partition(graph, by_time)
        partition(graph, p)
        return graph

    def aggregate(self, graph: OptiGraph, whole: bool = False) -> OptiGraph:
        result = aggregate_all(graph) if whole else aggregate(graph)
        self.logger.info("图已聚合", extra={"nodes_before": graph.num_nodes, "nodes_after": result.num_nodes})
        return result

    def export(self, graph: OptiGraph, fmt: Union[str, ExportFormatEnum], path: Union[str, Path]) -> Path:
        if not ExportFormatEnum.has_value(str(fmt)):
            raise ConfigError("format", f"unknown export format '{fmt}', expected one of "
                                        f"{ExportFormatEnum.list_values()}")
        path = Path(path)
        FileUtils.ensure_dir(path.parent)
        export = adjacency_export(graph)
        if ExportFormatEnum(str(fmt)) == ExportFormatEnum.DOT:
            path.write_text(to_dot(export, graph.name), encoding="utf-8")
        else:
            write_adjacency_csv(export, path)
        self.logger.info(f"结构已导出到 {path}", extra={"format": str(fmt), "edges": len(export.edges)})
        return path

    def export_demand(self, path: Union[str, Path], graph: Optional[OptiGraph] = None, **overrides: Any) -> Path:
        """从模型元数据或配置导出需求曲线 CSV（时间 × 场景）"""
        if graph is not None and "demand" in graph.metadata:
            demand = np.asarray(graph.metadata["demand"], dtype=float)
        else:
            demand = demand_matrix(self.gas_config(**overrides))
        return write_demand_csv(demand, path)

    def statistics(self, graph: OptiGraph) -> Dict[str, Any]:
        stats: Dict[str, Any] = {
            "name": graph.name,
            "nodes": graph.num_nodes,
            "variables": graph.num_variables,
            "constraints": graph.num_constraints,
            "link_constraints": graph.num_link_constraints,
            "subgraphs": len(graph.subgraphs),
        }
        if graph.metadata.get("generator") == ModelKindEnum.GAS.value:
            stats.update(gas_statistics(graph).to_dict())
        return stats
