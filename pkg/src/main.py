# src/main.py
import argparse
import sys
from typing import List, Optional

from src.application.config.settings import get_settings
from src.application.handlers.handler_interface import EXIT_INVALID_INPUT
from src.application.handlers.model_handler import ModelHandler
from src.application.handlers.solve_handler import SolveHandler
from src.infrastructure.logging.logger import get_logger, setup_logging
from src.schemas.enums.solver_enums import ExportFormatEnum, ModelKindEnum, PidOrderingEnum

logger = get_logger(__name__)


def _add_model_flags(parser: argparse.ArgumentParser) -> None:
    """PID / 燃气网络生成参数，未给出的取配置文件默认值"""
    pid = parser.add_argument_group("pid")
    pid.add_argument("--ns", type=int, help="场景数")
    pid.add_argument("--n", type=int, help="时间离散点数")
    pid.add_argument("--tf", type=float, help="时域长度")
    pid.add_argument("--ordering", choices=PidOrderingEnum.list_values())
    gas = parser.add_argument_group("gas")
    gas.add_argument("--scenarios", type=int)
    gas.add_argument("--nt", type=int, help="时间点数")
    gas.add_argument("--nx", type=int, help="每条管道的空间点数")
    gas.add_argument("--compressors", type=int)
    gas.add_argument("--pipelines", type=int)
    gas.add_argument("--junctions", type=int)
    gas.add_argument("--seed", type=int, help="需求曲线随机种子")


def _add_solver_flags(parser: argparse.ArgumentParser, threads_default: int) -> None:
    parser.add_argument("--tol", type=float)
    parser.add_argument("--max-iter", dest="max_iter", type=int)
    parser.add_argument("--threads", type=int, default=threads_default)


def build_parser() -> argparse.ArgumentParser:
    settings = get_settings()
    parser = argparse.ArgumentParser(prog="graphnlp", description="图结构非线性规划建模与内点法求解")
    parser.add_argument("--log-level", dest="log_level", help="覆盖 GRAPHNLP_LOG_LEVEL")
    parser.add_argument("--version", action="version", version=f"%(prog)s {settings.app_version}")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="生成基准模型并写出模型文件")
    gen.add_argument("model", choices=ModelKindEnum.list_values())
    gen.add_argument("--out")
    _add_model_flags(gen)

    solve = sub.add_parser("solve", help="求解模型文件")
    solve.add_argument("file")
    solve.add_argument("--backend", type=str.lower, default=None,
                       choices=["monolithic", "schur_dual", "schur-dual", "schur_tree", "schur-tree"])
    _add_solver_flags(solve, settings.threads)
    solve.add_argument("--report", help="追加一行 CSV 报告")
    solve.add_argument("--dump-kkt", dest="dump_kkt", help="写出首次迭代 KKT 矩阵的目录")
    solve.add_argument("--iter-csv", dest="iter_csv", action="store_true", help="迭代日志使用 CSV")
    solve.add_argument("--quiet", action="store_true", help="不打印迭代日志")

    part = sub.add_parser("partition", help="划分图模型")
    part.add_argument("file")
    group = part.add_mutually_exclusive_group(required=True)
    group.add_argument("--parts", type=int)
    group.add_argument("--membership", help="节点归属文件（JSON 数组或空白分隔整数）")
    group.add_argument("--by-time", dest="by_time", type=int, metavar="PARTS", help="按时间划分 PID 模型")
    part.add_argument("--out")

    agg = sub.add_parser("aggregate", help="聚合子图为单个节点")
    agg.add_argument("file")
    agg.add_argument("--all", action="store_true", help="聚合整个图")
    agg.add_argument("--out")

    exp = sub.add_parser("export", help="导出图结构")
    exp.add_argument("file")
    exp.add_argument("--format", default=ExportFormatEnum.DOT.value, choices=ExportFormatEnum.list_values())
    exp.add_argument("--out")

    dem = sub.add_parser("export-demand", help="导出燃气需求曲线 CSV")
    dem.add_argument("file", nargs="?")
    dem.add_argument("--out", default="demand.csv")
    _add_model_flags(dem)

    bench = sub.add_parser("bench", help="后端 × 线程数基准测试")
    bench.add_argument("file", nargs="?")
    bench.add_argument("--model", choices=ModelKindEnum.list_values())
    bench.add_argument("--backends", default="monolithic,schur_dual,schur_tree", help="逗号分隔")
    bench.add_argument("--threads", dest="threads_list", default=str(settings.threads), help="逗号分隔")
    bench.add_argument("--tol", type=float)
    bench.add_argument("--max-iter", dest="max_iter", type=int)
    bench.add_argument("--repeats", type=int, default=3)
    bench.add_argument("--out", help="结果 CSV，缺省只打印")
    _add_model_flags(bench)

    return parser


def run(argv: Optional[List[str]] = None, stdout=None, stderr=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # --help / --version 返回 0，参数错误返回 2
        return 0 if e.code in (0, None) else EXIT_INVALID_INPUT

    settings = get_settings()
    setup_logging(args.log_level or settings.log_level, settings.log_format)
    logger.debug("命令行参数", extra={"command": args.command})

    streams = {"stdout": stdout, "stderr": stderr}
    if args.command in ("solve", "bench"):
        return SolveHandler(**streams).handle(args)
    return ModelHandler(**streams).handle(args)


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
