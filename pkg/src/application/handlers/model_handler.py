# src/application/handlers/model_handler.py
import argparse
import json
from pathlib import Path
from typing import Any, Dict, Optional

from src.application.handlers.handler_interface import EXIT_OK, BaseHandler
from src.application.services.model_service import ModelService
from src.infrastructure.utils.file_utils import FileUtils
from src.schemas.enums.solver_enums import ExportFormatEnum

# 命令行参数名 → 配置字段
PID_FLAGS = {"ns": "NS", "n": "N", "tf": "Tf", "ordering": "ordering"}
GAS_FLAGS = {
    "scenarios": "scenarios", "nt": "Nt", "nx": "Nx",
    "compressors": "n_compressors", "pipelines": "n_pipelines", "junctions": "n_junctions",
    "seed": "demand_seed",
}


def model_overrides(args: argparse.Namespace, model: str) -> Dict[str, Any]:
    flags = PID_FLAGS if model == "pid" else GAS_FLAGS
    return {field: getattr(args, flag, None) for flag, field in flags.items()}


def _derived(path: Path, suffix: str) -> Path:
    return path.with_name(f"{path.stem}{suffix}")


class ModelHandler(BaseHandler):
    """generate / partition / aggregate / export / export-demand"""

    def __init__(self, service: Optional[ModelService] = None, **streams):
        super().__init__(**streams)
        self.service = service or ModelService()

    def _process(self, args: argparse.Namespace) -> int:
        handler = {
            "generate": self._generate,
            "partition": self._partition,
            "aggregate": self._aggregate,
            "export": self._export,
            "export-demand": self._export_demand,
        }[args.command]
        return handler(args)

    def _generate(self, args: argparse.Namespace) -> int:
        graph = self.service.generate(args.model, **model_overrides(args, args.model))
        out = self.service.save(graph, args.out or f"{args.model}.json")
        self._summary(graph, out)
        return EXIT_OK

    def _partition(self, args: argparse.Namespace) -> int:
        source = Path(args.file)
        graph = self.service.load(source)
        membership = FileUtils.read_membership(args.membership) if args.membership else None
        self.service.partition(graph, parts=args.parts, membership=membership, by_time=args.by_time)
        out = self.service.save(graph, args.out or _derived(source, ".partitioned.json"))
        sizes = [len(sg.all_nodes()) for sg in graph.subgraphs]
        self.emit(json.dumps({"file": str(out), "subgraph_sizes": sizes, "cut_links": len(graph.links)}))
        return EXIT_OK

    def _aggregate(self, args: argparse.Namespace) -> int:
        source = Path(args.file)
        graph = self.service.aggregate(self.service.load(source), whole=args.all)
        out = self.service.save(graph, args.out or _derived(source, ".aggregated.json"))
        self._summary(graph, out)
        return EXIT_OK

    def _export(self, args: argparse.Namespace) -> int:
        source = Path(args.file)
        graph = self.service.load(source)
        suffix = ".dot" if args.format == ExportFormatEnum.DOT.value else ".adjacency.csv"
        out = self.service.export(graph, args.format, args.out or _derived(source, suffix))
        self.emit(json.dumps({"file": str(out), "format": args.format}))
        return EXIT_OK

    def _export_demand(self, args: argparse.Namespace) -> int:
        graph = self.service.load(args.file) if args.file else None
        out = self.service.export_demand(args.out, graph, **model_overrides(args, "gas"))
        self.emit(json.dumps({"file": str(out)}))
        return EXIT_OK

    def _summary(self, graph, out: Path) -> None:
        stats = self.service.statistics(graph)
        self.emit(json.dumps({"file": str(out), **stats}))
