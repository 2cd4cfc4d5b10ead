# src/domain/exceptions/graph_exceptions.py
from typing import Any, Iterable

from src.domain.exceptions.base_exception import DomainException
from src.schemas.enums.base_enums import ErrorCodeEnum


class CrossNodeExpression(DomainException):
    """节点约束/目标引用了其他节点的变量"""

    def __init__(self, node_id: Any, foreign_nodes: Iterable[Any]):
        foreign = sorted(map(str, set(foreign_nodes)))
        super().__init__(
            message=f"expression on node '{node_id}' references variables of {foreign}",
            error_code=ErrorCodeEnum.CROSS_NODE_EXPRESSION,
            details={"node_id": node_id, "foreign_nodes": foreign}
        )


class SingleNodeLink(DomainException):
    """链接约束只涉及一个节点"""

    def __init__(self, support: Iterable[Any]):
        support = sorted(map(str, support))
        super().__init__(
            message=f"link constraint must span at least two nodes, support is {support}",
            error_code=ErrorCodeEnum.SINGLE_NODE_LINK,
            details={"support": support}
        )


class UnreachableNode(DomainException):
    """链接约束引用了当前层级不可达的节点"""

    def __init__(self, node_id: Any, graph_name: str):
        super().__init__(
            message=f"node '{node_id}' is not reachable from graph '{graph_name}'",
            error_code=ErrorCodeEnum.UNREACHABLE_NODE,
            details={"node_id": node_id, "graph": graph_name}
        )


class DuplicateNodeId(DomainException):
    """节点 ID 在层级内重复"""

    def __init__(self, node_id: Any):
        super().__init__(
            message=f"node id '{node_id}' already exists in the hierarchy",
            error_code=ErrorCodeEnum.DUPLICATE_NODE_ID,
            details={"node_id": node_id}
        )


class LengthMismatch(DomainException):
    """成员向量长度与节点数不符"""

    def __init__(self, expected: int, actual: int):
        super().__init__(
            message=f"membership vector has length {actual}, graph has {expected} nodes",
            error_code=ErrorCodeEnum.LENGTH_MISMATCH,
            details={"expected": expected, "actual": actual}
        )


class EmptyPart(DomainException):
    """分区中存在空的部分"""

    def __init__(self, part: int, num_parts: int):
        super().__init__(
            message=f"part {part} of {num_parts} has no nodes",
            error_code=ErrorCodeEnum.EMPTY_PART,
            details={"part": part, "num_parts": num_parts}
        )


class InvalidPartCount(DomainException):
    """分区数量非法"""

    def __init__(self, parts: int, num_nodes: int):
        super().__init__(
            message=f"cannot split {num_nodes} nodes into {parts} parts",
            error_code=ErrorCodeEnum.INVALID_PART_COUNT,
            details={"parts": parts, "num_nodes": num_nodes}
        )


class UnknownVariable(DomainException):
    """变量引用的局部索引超出节点变量数"""

    def __init__(self, node_id: Any, local_index: int, num_variables: int):
        super().__init__(
            message=f"node '{node_id}' has {num_variables} variables, no variable {local_index}",
            error_code=ErrorCodeEnum.UNKNOWN_VARIABLE,
            details={"node_id": node_id, "local_index": local_index, "num_variables": num_variables}
        )
