# tests/conftest.py
import sys
from pathlib import Path

# 添加项目根目录到Python路径
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

import pytest

from src.domain.graph.optigraph import OptiGraph
from src.schemas.dtos.request.solver_options import SolverOptions
from tests.builders import build_chain, build_two_stage


@pytest.fixture(autouse=True)
def setup_logging():
    """设置测试日志"""
    from src.infrastructure.logging.logger import setup_logging
    setup_logging("WARNING")


@pytest.fixture
def two_stage_graph() -> OptiGraph:
    return build_two_stage()


@pytest.fixture
def chain_graph() -> OptiGraph:
    return build_chain()


@pytest.fixture
def fast_options() -> SolverOptions:
    return SolverOptions(tol=1e-8, max_iter=100)
