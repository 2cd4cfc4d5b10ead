# src/domain/expressions/__init__.py
from src.domain.expressions.derivatives import (
    SparseTriplet,
    evaluate,
    gradient,
    jacobian,
    lagrangian_hessian,
)
from src.domain.expressions.expression import (
    DEFAULT_ABS_SMOOTHING,
    Expression,
    ExprKind,
    VariableRef,
    as_expression,
    constant,
    exp,
    log,
    quicksum,
    smooth_abs,
    variable,
)
from src.domain.expressions.sexpr import from_sexpr, to_sexpr

__all__ = [
    "DEFAULT_ABS_SMOOTHING",
    "Expression",
    "ExprKind",
    "SparseTriplet",
    "VariableRef",
    "as_expression",
    "constant",
    "evaluate",
    "exp",
    "from_sexpr",
    "gradient",
    "jacobian",
    "lagrangian_hessian",
    "log",
    "quicksum",
    "smooth_abs",
    "to_sexpr",
    "variable",
]
