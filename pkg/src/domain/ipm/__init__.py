# src/domain/ipm/__init__.py
from src.domain.ipm.barrier import (
    barrier_gradient,
    barrier_objective,
    constraint_violation,
    kkt_error,
    update_barrier,
)
from src.domain.ipm.evaluator import NLPEvaluator
from src.domain.ipm.iteration_log import IterationLogger, IterationRecord
from src.domain.ipm.line_search import FilterLineSearch, LineSearchResult, fraction_to_boundary
from src.domain.ipm.solver import InteriorPointSolver, compute_step, make_backend
from src.domain.ipm.state import BoundMasks, IterationState, SearchDirection

__all__ = [
    "BoundMasks",
    "FilterLineSearch",
    "InteriorPointSolver",
    "IterationLogger",
    "IterationRecord",
    "IterationState",
    "LineSearchResult",
    "NLPEvaluator",
    "SearchDirection",
    "barrier_gradient",
    "barrier_objective",
    "compute_step",
    "constraint_violation",
    "fraction_to_boundary",
    "kkt_error",
    "make_backend",
    "update_barrier",
]
