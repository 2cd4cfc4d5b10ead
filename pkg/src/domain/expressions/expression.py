# src/domain/expressions/expression.py
"""
表达式图（DAG）：目标函数和约束的可微表示。

叶子是常数或变量引用；内部节点是 sum / product / difference / quotient /
power / exp / log / smooth_abs。表达式构造后不可变，可在多线程中共享读取。
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from numbers import Real
from typing import Any, Callable, Dict, Hashable, Iterable, Iterator, Optional, Tuple

from src.schemas.enums.base_enums import BaseEnum

DEFAULT_ABS_SMOOTHING = 1e-4


class ExprKind(BaseEnum):
    """表达式节点类型"""
    CONSTANT = "constant"
    VARIABLE = "variable"
    SUM = "sum"
    PRODUCT = "product"
    DIFFERENCE = "difference"
    QUOTIENT = "quotient"
    POWER = "power"
    EXP = "exp"
    LOG = "log"
    SMOOTH_ABS = "smooth_abs"


class ExpressionOperators:
    """算术运算符混入；子类实现 as_expression()"""

    __slots__ = ()

    def as_expression(self) -> "Expression":
        raise NotImplementedError

    def __add__(self, other: Any) -> "Expression":
        return Expression.sum_of(self.as_expression(), as_expression(other))

    def __radd__(self, other: Any) -> "Expression":
        return Expression.sum_of(as_expression(other), self.as_expression())

    def __sub__(self, other: Any) -> "Expression":
        return Expression(ExprKind.DIFFERENCE, (self.as_expression(), as_expression(other)))

    def __rsub__(self, other: Any) -> "Expression":
        return Expression(ExprKind.DIFFERENCE, (as_expression(other), self.as_expression()))

    def __mul__(self, other: Any) -> "Expression":
        return Expression(ExprKind.PRODUCT, (self.as_expression(), as_expression(other)))

    def __rmul__(self, other: Any) -> "Expression":
        return Expression(ExprKind.PRODUCT, (as_expression(other), self.as_expression()))

    def __truediv__(self, other: Any) -> "Expression":
        return Expression(ExprKind.QUOTIENT, (self.as_expression(), as_expression(other)))

    def __rtruediv__(self, other: Any) -> "Expression":
        return Expression(ExprKind.QUOTIENT, (as_expression(other), self.as_expression()))

    def __pow__(self, exponent: Any) -> "Expression":
        if not isinstance(exponent, Real):
            raise TypeError("exponent must be a real constant")
        return Expression(ExprKind.POWER, (self.as_expression(),), float(exponent))

    def __neg__(self) -> "Expression":
        return Expression(ExprKind.PRODUCT, (Expression.constant(-1.0), self.as_expression()))

    def __pos__(self) -> "Expression":
        return self.as_expression()


@dataclass(frozen=True)
class VariableRef(ExpressionOperators):
    """节点变量引用；global_index 在 flatten 时赋值"""
    node_id: Hashable
    local_index: int
    global_index: Optional[int] = None

    def as_expression(self) -> "Expression":
        return Expression(ExprKind.VARIABLE, (), ref=self)

    def with_global_index(self, global_index: int) -> "VariableRef":
        return replace(self, global_index=global_index)

    def __repr__(self) -> str:
        g = "" if self.global_index is None else f"@{self.global_index}"
        return f"{self.node_id}[{self.local_index}]{g}"


class Expression(ExpressionOperators):
    """不可变表达式节点"""

    __slots__ = ("kind", "children", "value", "ref", "_tape")

    def __init__(
        self,
        kind: ExprKind,
        children: Tuple["Expression", ...] = (),
        value: float = 0.0,
        ref: Optional[VariableRef] = None,
    ):
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "children", tuple(children))
        object.__setattr__(self, "value", float(value))
        object.__setattr__(self, "ref", ref)
        object.__setattr__(self, "_tape", None)

    def __setattr__(self, name: str, value: Any) -> None:
        raise AttributeError("Expression is immutable")

    # ---- 构造 ----
    @staticmethod
    def constant(value: float) -> "Expression":
        return Expression(ExprKind.CONSTANT, (), value)

    @staticmethod
    def sum_of(*terms: "Expression") -> "Expression":
        children: list[Expression] = []
        for term in terms:
            if term.kind == ExprKind.SUM:
                children.extend(term.children)
            else:
                children.append(term)
        return Expression(ExprKind.SUM, tuple(children))

    def as_expression(self) -> "Expression":
        return self

    # ---- 查询 ----
    @property
    def is_constant(self) -> bool:
        return self.kind == ExprKind.CONSTANT

    def nodes(self) -> Iterator["Expression"]:
        """按后序遍历每个不同的子表达式一次"""
        seen: set[int] = set()
        stack: list[tuple[Expression, bool]] = [(self, False)]
        while stack:
            expr, expanded = stack.pop()
            if id(expr) in seen:
                continue
            if expanded or not expr.children:
                seen.add(id(expr))
                yield expr
                continue
            stack.append((expr, True))
            for child in reversed(expr.children):
                if id(child) not in seen:
                    stack.append((child, False))

    def variables(self) -> list[VariableRef]:
        """表达式中出现的不同变量（按首次出现顺序）"""
        refs: Dict[VariableRef, None] = {}
        for expr in self.nodes():
            if expr.kind == ExprKind.VARIABLE:
                refs.setdefault(expr.ref, None)
        return list(refs)

    def node_ids(self) -> set:
        return {ref.node_id for ref in self.variables()}

    def bind(self, mapping: Callable[[VariableRef], VariableRef]) -> "Expression":
        """替换所有变量引用，保持 DAG 共享结构"""
        rebuilt: Dict[int, Expression] = {}
        for expr in self.nodes():
            if expr.kind == ExprKind.VARIABLE:
                new = Expression(ExprKind.VARIABLE, (), ref=mapping(expr.ref))
            elif not expr.children:
                new = expr
            else:
                new = Expression(expr.kind, tuple(rebuilt[id(c)] for c in expr.children), expr.value)
            rebuilt[id(expr)] = new
        return rebuilt[id(self)]

    def compile(self):
        """编译（并缓存）求值磁带"""
        tape = self._tape
        if tape is None:
            from src.domain.expressions.tape import ExpressionTape

            tape = ExpressionTape(self)
            object.__setattr__(self, "_tape", tape)
        return tape

    def __repr__(self) -> str:
        from src.domain.expressions.sexpr import to_sexpr

        return f"Expression({to_sexpr(self)!r})"


def as_expression(value: Any) -> Expression:
    """把数字、变量引用或表达式统一转换为 Expression"""
    if isinstance(value, ExpressionOperators):
        return value.as_expression()
    if isinstance(value, Real):
        return Expression.constant(float(value))
    raise TypeError(f"cannot build an expression from {type(value).__name__}")


def constant(value: float) -> Expression:
    return Expression.constant(value)


def variable(ref: VariableRef) -> Expression:
    return ref.as_expression()


def quicksum(terms: Iterable[Any]) -> Expression:
    """n 元求和，避免逐项 + 造成的重复拷贝"""
    items = [as_expression(t) for t in terms]
    if not items:
        return Expression.constant(0.0)
    return Expression.sum_of(*items)


def exp(arg: Any) -> Expression:
    return Expression(ExprKind.EXP, (as_expression(arg),))


def log(arg: Any) -> Expression:
    return Expression(ExprKind.LOG, (as_expression(arg),))


def smooth_abs(arg: Any, smoothing: float = DEFAULT_ABS_SMOOTHING) -> Expression:
    """sqrt(u² + ε)，处处二阶连续可导"""
    if not smoothing > 0 or not math.isfinite(smoothing):
        raise ValueError("smoothing must be a positive finite number")
    return Expression(ExprKind.SMOOTH_ABS, (as_expression(arg),), smoothing)
