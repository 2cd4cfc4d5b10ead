# src/domain/expressions/sexpr.py
"""
前缀 s-表达式编解码，例如 ["*", 100.0, ["^", ["-", -2.0, ["var", 0]], 2]]。

变量写法：
  ["var", i]                 全局索引 i
  ["var", node_id, i]        节点 node_id 的第 i 个局部变量
"""
from __future__ import annotations

from numbers import Real
from typing import Any, Callable, Dict, Hashable, Optional

from src.domain.exceptions.expression_exceptions import ExpressionFormatError
from src.domain.expressions.expression import Expression, ExprKind, VariableRef, smooth_abs

_BINARY = {"*": ExprKind.PRODUCT, "-": ExprKind.DIFFERENCE, "/": ExprKind.QUOTIENT}
_UNARY = {"exp": ExprKind.EXP, "log": ExprKind.LOG}
_SYMBOL = {
    ExprKind.SUM: "+",
    ExprKind.PRODUCT: "*",
    ExprKind.DIFFERENCE: "-",
    ExprKind.QUOTIENT: "/",
    ExprKind.POWER: "^",
    ExprKind.EXP: "exp",
    ExprKind.LOG: "log",
    ExprKind.SMOOTH_ABS: "sabs",
}


def to_sexpr(expr: Expression, local_node: Optional[Hashable] = None) -> Any:
    """序列化；local_node 给定时，该节点的变量写成 ["var", i]"""
    out: Dict[int, Any] = {}
    for node in expr.nodes():
        if node.kind == ExprKind.CONSTANT:
            out[id(node)] = node.value
        elif node.kind == ExprKind.VARIABLE:
            ref = node.ref
            if local_node is not None and ref.node_id == local_node:
                out[id(node)] = ["var", ref.local_index]
            elif local_node is None and ref.global_index is not None and ref.node_id is None:
                out[id(node)] = ["var", ref.global_index]
            else:
                out[id(node)] = ["var", ref.node_id, ref.local_index]
        elif node.kind == ExprKind.POWER:
            e = node.value
            out[id(node)] = ["^", out[id(node.children[0])], int(e) if e.is_integer() else e]
        elif node.kind == ExprKind.SMOOTH_ABS:
            out[id(node)] = ["sabs", out[id(node.children[0])], node.value]
        else:
            out[id(node)] = [_SYMBOL[node.kind]] + [out[id(c)] for c in node.children]
    return out[id(expr)]


def from_sexpr(
    data: Any,
    resolve: Optional[Callable[[list], VariableRef]] = None,
) -> Expression:
    """解析；resolve 把 ["var", ...] 参数列表映射为 VariableRef"""
    resolve = resolve or _resolve_default

    def build(item: Any) -> Expression:
        if isinstance(item, bool):
            raise ExpressionFormatError("booleans are not numbers", item)
        if isinstance(item, Real):
            return Expression.constant(float(item))
        if not isinstance(item, list) or not item or not isinstance(item[0], str):
            raise ExpressionFormatError("expected a number or [operator, ...]", item)
        op, args = item[0], item[1:]
        if op == "var":
            return Expression(ExprKind.VARIABLE, (), ref=resolve(args))
        if op == "+":
            if not args:
                raise ExpressionFormatError("'+' needs at least one operand", item)
            return Expression(ExprKind.SUM, tuple(build(a) for a in args))
        if op in _BINARY:
            if len(args) < 2:
                if op == "-" and len(args) == 1:
                    return -build(args[0])
                raise ExpressionFormatError(f"'{op}' needs two operands", item)
            acc = build(args[0])
            for a in args[1:]:
                acc = Expression(_BINARY[op], (acc, build(a)))
            return acc
        if op == "^":
            if len(args) != 2 or isinstance(args[1], bool) or not isinstance(args[1], Real):
                raise ExpressionFormatError("'^' needs a base and a constant exponent", item)
            return Expression(ExprKind.POWER, (build(args[0]),), float(args[1]))
        if op in _UNARY:
            if len(args) != 1:
                raise ExpressionFormatError(f"'{op}' takes one operand", item)
            return Expression(_UNARY[op], (build(args[0]),))
        if op == "sabs":
            if len(args) not in (1, 2):
                raise ExpressionFormatError("'sabs' takes an operand and optional smoothing", item)
            return smooth_abs(build(args[0]), *(float(a) for a in args[1:]))
        raise ExpressionFormatError(f"unknown operator '{op}'", item)

    return build(data)


def _resolve_default(args: list) -> VariableRef:
    if len(args) == 1 and isinstance(args[0], int) and not isinstance(args[0], bool) and args[0] >= 0:
        return VariableRef(None, args[0], args[0])
    if len(args) == 2 and isinstance(args[1], int) and not isinstance(args[1], bool):
        return VariableRef(args[0], args[1])
    raise ExpressionFormatError("variable reference must be [\"var\", i] or [\"var\", node, i]", args)
