# src/application/handlers/solve_handler.py
import argparse
import json
from pathlib import Path
from typing import List, Optional

from src.application.handlers.handler_interface import EXIT_OK, EXIT_SOLVER_FAILURE, BaseHandler
from src.application.handlers.model_handler import model_overrides
from src.application.services.bench_service import BenchService
from src.application.services.model_service import ModelService
from src.application.services.solver_service import SolverService
from src.domain.exceptions.validation_exception import ConfigError
from src.domain.ipm.iteration_log import IterationLogger


def _split(value: Optional[str]) -> List[str]:
    return [v.strip() for v in (value or "").split(",") if v.strip()]


class SolveHandler(BaseHandler):
    """solve / bench"""

    def __init__(
        self,
        solver_service: Optional[SolverService] = None,
        model_service: Optional[ModelService] = None,
        bench_service: Optional[BenchService] = None,
        **streams,
    ):
        super().__init__(**streams)
        self.solver_service = solver_service or SolverService()
        self.model_service = model_service or ModelService(self.solver_service.settings)
        self.bench_service = bench_service or BenchService(self.solver_service.settings, self.solver_service)

    def _process(self, args: argparse.Namespace) -> int:
        if args.command == "bench":
            return self._bench(args)
        return self._solve(args)

    def _solve(self, args: argparse.Namespace) -> int:
        graph = self.model_service.load(args.file)
        options = self.solver_service.options(
            backend=args.backend, threads=args.threads, tol=args.tol, max_iter=args.max_iter,
        )
        iteration_logger = IterationLogger(self.stdout, csv_format=args.iter_csv, enabled=not args.quiet)
        report = self.solver_service.solve(graph, options, iteration_logger, args.dump_kkt)
        if args.report:
            self.solver_service.append_report(args.report, Path(args.file).stem, report)
        self.emit(json.dumps(report.summary(), default=str))
        return EXIT_OK if report.is_optimal else EXIT_SOLVER_FAILURE

    def _bench(self, args: argparse.Namespace) -> int:
        if args.file:
            graph = self.model_service.load(args.file)
            name = Path(args.file).stem
        elif args.model:
            graph = self.model_service.generate(args.model, **model_overrides(args, args.model))
            name = args.model
        else:
            raise ConfigError("bench", "give a model file or --model")
        try:
            threads = [int(t) for t in _split(args.threads_list)] or [self.solver_service.settings.threads]
        except ValueError:
            raise ConfigError("threads", f"expected a comma separated list of integers, got '{args.threads_list}'")
        backends = _split(args.backends) or ["monolithic"]

        rows = self.bench_service.run(name, graph, backends, threads, args.repeats,
                                      tol=args.tol, max_iter=args.max_iter)
        if args.out:
            self.bench_service.write(rows, args.out)
        self.emit(",".join(rows[0].COLUMNS) if rows else "")
        for row in rows:
            self.emit(",".join("" if v is None else str(v) for v in row.row()))
        return EXIT_OK if all(r.status == "optimal" for r in rows) else EXIT_SOLVER_FAILURE
