# src/domain/expressions/tape.py
"""
表达式磁带：把 DAG 拓扑排序成线性指令序列。

- 前向扫描：值以及每个节点对子节点的局部一阶/二阶偏导
- 反向扫描：梯度（伴随）
- 前向-反向（forward-over-reverse）：Hessian 列

子表达式按对象身份去重，变量按全局索引（未绑定时按引用）去重，
所以每个变量只占一个槽位。磁带本身不可变，每次求值的工作区由调用方的栈帧持有。
"""
from __future__ import annotations

import math
from typing import Dict, Hashable, List, Sequence, Tuple

from src.domain.exceptions.expression_exceptions import DomainError, UnboundVariableError
from src.domain.expressions.expression import Expression, ExprKind, VariableRef

_CONST, _VAR, _SUM, _PROD, _DIFF, _QUOT, _POW, _EXP, _LOG, _SABS = range(10)

_OPCODES = {
    ExprKind.CONSTANT: _CONST,
    ExprKind.VARIABLE: _VAR,
    ExprKind.SUM: _SUM,
    ExprKind.PRODUCT: _PROD,
    ExprKind.DIFFERENCE: _DIFF,
    ExprKind.QUOTIENT: _QUOT,
    ExprKind.POWER: _POW,
    ExprKind.EXP: _EXP,
    ExprKind.LOG: _LOG,
    ExprKind.SMOOTH_ABS: _SABS,
}

Forward = Tuple[List[float], List[Tuple[float, ...]], List[Tuple[Tuple[int, int, float], ...]]]


class ExpressionTape:
    """编译后的表达式"""

    __slots__ = ("ops", "args", "params", "var_refs", "var_slots", "hessian_pairs", "_seed_positions")

    def __init__(self, expr: Expression):
        slot_of: Dict[int, int] = {}
        var_slot_of: Dict[Hashable, int] = {}
        self.ops: List[int] = []
        self.args: List[Tuple[int, ...]] = []
        self.params: List[float] = []
        self.var_refs: List[VariableRef] = []
        self.var_slots: List[int] = []

        for node in expr.nodes():
            if node.kind == ExprKind.VARIABLE:
                ref = node.ref
                key = ref if ref.global_index is None else ref.global_index
                slot = var_slot_of.get(key)
                if slot is None:
                    slot = self._push(_VAR, (), float(len(self.var_refs)))
                    var_slot_of[key] = slot
                    self.var_refs.append(ref)
                    self.var_slots.append(slot)
                slot_of[id(node)] = slot
                continue
            children = tuple(slot_of[id(c)] for c in node.children)
            slot_of[id(node)] = self._push(_OPCODES[node.kind], children, node.value)

        self.hessian_pairs = self._structural_hessian()
        self._seed_positions = sorted({j for _, j in self.hessian_pairs})

    def _push(self, op: int, args: Tuple[int, ...], param: float) -> int:
        self.ops.append(op)
        self.args.append(args)
        self.params.append(param)
        return len(self.ops) - 1

    # ------------------------------------------------------------------
    @property
    def num_variables(self) -> int:
        return len(self.var_refs)

    @property
    def is_affine(self) -> bool:
        return not self.hessian_pairs

    @property
    def global_indices(self) -> List[int]:
        return [ref.global_index for ref in self.var_refs]

    def _structural_hessian(self) -> List[Tuple[int, int]]:
        """结构性 Hessian 模式：局部二阶项把子节点的变量集两两相连"""
        var_sets: List[frozenset] = []
        pairs: set[Tuple[int, int]] = set()
        for op, args, param in zip(self.ops, self.args, self.params):
            if op == _CONST:
                var_sets.append(frozenset())
                continue
            if op == _VAR:
                var_sets.append(frozenset((int(param),)))
                continue
            var_sets.append(frozenset().union(*(var_sets[a] for a in args)))
            for p, q in _second_order_children(op, param):
                for i in var_sets[args[p]]:
                    for j in var_sets[args[q]]:
                        pairs.add((i, j) if i >= j else (j, i))
        return sorted(pairs)

    # ------------------------------------------------------------------
    def _variable_value(self, position: int, x: Sequence[float]) -> float:
        ref = self.var_refs[position]
        g = ref.global_index
        if g is None:
            raise UnboundVariableError(ref.node_id, ref.local_index)
        if g < 0 or g >= len(x):
            raise UnboundVariableError(ref.node_id, ref.local_index, g, len(x))
        return float(x[g])

    def value(self, x: Sequence[float]) -> float:
        """仅前向求值"""
        vals: List[float] = [0.0] * len(self.ops)
        for i, (op, args, param) in enumerate(zip(self.ops, self.args, self.params)):
            if op == _CONST:
                vals[i] = param
            elif op == _VAR:
                vals[i] = self._variable_value(int(param), x)
            else:
                vals[i] = _apply(op, [vals[a] for a in args], param)
        return vals[-1]

    def forward(self, x: Sequence[float]) -> Forward:
        """前向扫描：值、局部一阶偏导、局部二阶偏导（子节点位置对）"""
        n = len(self.ops)
        vals: List[float] = [0.0] * n
        d1: List[Tuple[float, ...]] = [()] * n
        d2: List[Tuple[Tuple[int, int, float], ...]] = [()] * n
        for i, (op, args, param) in enumerate(zip(self.ops, self.args, self.params)):
            if op == _CONST:
                vals[i] = param
            elif op == _VAR:
                vals[i] = self._variable_value(int(param), x)
            else:
                vals[i], d1[i], d2[i] = _apply_with_partials(op, [vals[a] for a in args], param)
        return vals, d1, d2

    def reverse(self, d1: List[Tuple[float, ...]], seed: float = 1.0) -> List[float]:
        """反向扫描：返回每个槽位的伴随"""
        bar = [0.0] * len(self.ops)
        bar[-1] = seed
        for i in range(len(self.ops) - 1, -1, -1):
            b = bar[i]
            if b == 0.0:
                continue
            for a, partial in zip(self.args[i], d1[i]):
                bar[a] += b * partial
        return bar

    def gradient(self, x: Sequence[float]) -> Tuple[float, List[float]]:
        """值与按变量位置排列的梯度"""
        vals, d1, _ = self.forward(x)
        bar = self.reverse(d1)
        return vals[-1], [bar[s] for s in self.var_slots]

    def hessian_values(self, x: Sequence[float], weight: float = 1.0) -> List[float]:
        """weight·∇²f 在 hessian_pairs 上的取值"""
        if not self.hessian_pairs or weight == 0.0:
            return [0.0] * len(self.hessian_pairs)
        _, d1, d2 = self.forward(x)
        bar = self.reverse(d1, weight)
        return self.hessian_from_sweeps(d1, d2, bar)

    def hessian_from_sweeps(
        self,
        d1: List[Tuple[float, ...]],
        d2: List[Tuple[Tuple[int, int, float], ...]],
        bar: List[float],
    ) -> List[float]:
        """由已有的前向/反向结果计算 Hessian 模式上的值"""
        n = len(self.ops)
        columns: Dict[int, List[float]] = {}
        for k in self._seed_positions:
            dot = [0.0] * n
            dot[self.var_slots[k]] = 1.0
            for i in range(n):
                args = self.args[i]
                if args:
                    acc = 0.0
                    for a, partial in zip(args, d1[i]):
                        acc += partial * dot[a]
                    dot[i] = acc
            adot = [0.0] * n
            for i in range(n - 1, -1, -1):
                args = self.args[i]
                if not args:
                    continue
                ai = adot[i]
                if ai != 0.0:
                    for a, partial in zip(args, d1[i]):
                        adot[a] += ai * partial
                b = bar[i]
                if b != 0.0:
                    for p, q, second in d2[i]:
                        adot[args[p]] += b * second * dot[args[q]]
                        if p != q:
                            adot[args[q]] += b * second * dot[args[p]]
            columns[k] = [adot[s] for s in self.var_slots]
        return [columns[j][i] for i, j in self.hessian_pairs]


def _second_order_children(op: int, param: float) -> Tuple[Tuple[int, int], ...]:
    if op == _PROD:
        return ((0, 1),)
    if op == _QUOT:
        return ((0, 1), (1, 1))
    if op == _POW:
        return () if param in (0.0, 1.0) else ((0, 0),)
    if op in (_EXP, _LOG, _SABS):
        return ((0, 0),)
    return ()


def _power_value(a: float, e: float) -> float:
    if float(e).is_integer():
        n = int(e)
        if n < 0 and a == 0.0:
            raise DomainError("power", a)
        return a ** n
    if a <= 0.0:
        raise DomainError("power", a)
    return math.exp(e * math.log(a))


def _apply(op: int, v: List[float], param: float) -> float:
    if op == _SUM:
        return math.fsum(v) if len(v) > 8 else sum(v)
    if op == _PROD:
        return v[0] * v[1]
    if op == _DIFF:
        return v[0] - v[1]
    if op == _QUOT:
        if v[1] == 0.0:
            raise DomainError("quotient", v[1])
        return v[0] / v[1]
    if op == _POW:
        return _power_value(v[0], param)
    if op == _EXP:
        try:
            return math.exp(v[0])
        except OverflowError:
            raise DomainError("exp", v[0]) from None
    if op == _LOG:
        if v[0] <= 0.0:
            raise DomainError("log", v[0])
        return math.log(v[0])
    if op == _SABS:
        return math.sqrt(v[0] * v[0] + param)
    raise ValueError(f"unknown opcode {op}")


def _apply_with_partials(op: int, v: List[float], param: float):
    if op == _SUM:
        return _apply(op, v, param), (1.0,) * len(v), ()
    if op == _PROD:
        return v[0] * v[1], (v[1], v[0]), ((0, 1, 1.0),)
    if op == _DIFF:
        return v[0] - v[1], (1.0, -1.0), ()
    if op == _QUOT:
        a, b = v
        if b == 0.0:
            raise DomainError("quotient", b)
        inv = 1.0 / b
        val = a * inv
        return val, (inv, -val * inv), ((0, 1, -inv * inv), (1, 1, 2.0 * val * inv * inv))
    if op == _POW:
        a, e = v[0], param
        if e == 0.0:
            return 1.0, (0.0,), ()
        if e == 1.0:
            return a, (1.0,), ()
        val = _power_value(a, e)
        if float(e).is_integer():
            n = int(e)
            d1 = n * a ** (n - 1)
            d2 = n * (n - 1) * a ** (n - 2) if (n >= 2 or a != 0.0) else 0.0
        else:
            d1 = e * val / a
            d2 = e * (e - 1.0) * val / (a * a)
        return val, (d1,), ((0, 0, d2),)
    if op == _EXP:
        val = _apply(op, v, param)
        return val, (val,), ((0, 0, val),)
    if op == _LOG:
        a = v[0]
        if a <= 0.0:
            raise DomainError("log", a)
        return math.log(a), (1.0 / a,), ((0, 0, -1.0 / (a * a)),)
    if op == _SABS:
        a = v[0]
        val = math.sqrt(a * a + param)
        return val, (a / val,), ((0, 0, param / (val * val * val)),)
    raise ValueError(f"unknown opcode {op}")
