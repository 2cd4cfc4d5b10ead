# src/domain/exceptions/solver_exceptions.py
from typing import Any, Dict, Optional

from src.domain.exceptions.base_exception import DomainException
from src.schemas.enums.base_enums import ErrorCodeEnum


class NonAffineLink(DomainException):
    """Schur 后端要求链接约束为仿射"""

    def __init__(self, link_index: int, support: Any = None):
        super().__init__(
            message=f"link constraint {link_index} is nonlinear; Schur backends need affine links",
            error_code=ErrorCodeEnum.NON_AFFINE_LINK,
            details={"link_index": link_index, "support": sorted(map(str, support or ()))}
        )


class NotTwoStage(DomainException):
    """图结构不是以主节点为根的两级树"""

    def __init__(self, reason: str, link_index: Optional[int] = None):
        super().__init__(
            message=f"structure is not a two-stage tree: {reason}",
            error_code=ErrorCodeEnum.NOT_TWO_STAGE,
            details={"link_index": link_index}
        )


class SingularBlock(DomainException):
    """对角块正则化后仍无法分解"""

    def __init__(self, block: int, block_name: Any = None):
        self.block = block
        super().__init__(
            message=f"diagonal block {block} ({block_name}) could not be factorized",
            error_code=ErrorCodeEnum.SINGULAR_BLOCK,
            details={"block": block, "block_name": str(block_name)}
        )


class SingularSchur(DomainException):
    """Schur 补矩阵奇异"""

    def __init__(self, dimension: int):
        super().__init__(
            message=f"Schur complement of dimension {dimension} is singular",
            error_code=ErrorCodeEnum.SINGULAR_SCHUR,
            details={"dimension": dimension}
        )


class SingularKKT(DomainException):
    """正则化达到上限后 KKT 仍奇异或惯性错误"""

    def __init__(self, delta_w: float, details: Optional[Dict[str, Any]] = None):
        super().__init__(
            message=f"KKT system stayed singular up to regularization {delta_w:.3e}",
            error_code=ErrorCodeEnum.SINGULAR_KKT,
            details={**(details or {}), "delta_w": delta_w}
        )


class MaxIterations(DomainException):
    """超出最大迭代次数"""

    def __init__(self, max_iter: int, kkt_error: float):
        super().__init__(
            message=f"no convergence after {max_iter} iterations (kkt error {kkt_error:.3e})",
            error_code=ErrorCodeEnum.MAX_ITERATIONS,
            details={"max_iter": max_iter, "kkt_error": kkt_error}
        )


class LineSearchFailure(DomainException):
    """线搜索步长低于下限"""

    def __init__(self, alpha: float, iteration: int):
        super().__init__(
            message=f"line search step {alpha:.3e} fell below the minimum at iteration {iteration}",
            error_code=ErrorCodeEnum.LINE_SEARCH_FAILURE,
            details={"alpha": alpha, "iteration": iteration}
        )


class BackendError(DomainException):
    """KKT 后端失败"""

    def __init__(self, backend: str, cause: Exception):
        self.cause = cause
        super().__init__(
            message=f"backend '{backend}' failed: {cause}",
            error_code=ErrorCodeEnum.BACKEND_ERROR,
            details={"backend": backend, "cause": cause.__class__.__name__}
        )
