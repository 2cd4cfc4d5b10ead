# src/domain/exceptions/linalg_exceptions.py
from typing import Tuple

from src.domain.exceptions.base_exception import DomainException
from src.schemas.enums.base_enums import ErrorCodeEnum


class StructurallySingular(DomainException):
    """分解遇到零主元，携带已知惯性"""

    def __init__(self, inertia: Tuple[int, int, int], dimension: int):
        self.inertia = tuple(inertia)
        super().__init__(
            message=f"matrix of dimension {dimension} is singular, inertia {self.inertia}",
            error_code=ErrorCodeEnum.STRUCTURALLY_SINGULAR,
            details={"inertia": list(self.inertia), "dimension": dimension}
        )


class DimensionMismatch(DomainException):
    """维度不匹配"""

    def __init__(self, expected: int, actual: int, what: str = "right-hand side"):
        super().__init__(
            message=f"{what} has leading dimension {actual}, expected {expected}",
            error_code=ErrorCodeEnum.DIMENSION_MISMATCH,
            details={"expected": expected, "actual": actual, "what": what}
        )
