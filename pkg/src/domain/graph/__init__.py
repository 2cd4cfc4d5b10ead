# src/domain/graph/__init__.py
from src.domain.graph.aggregate import aggregate, aggregate_all
from src.domain.graph.flatten import FlatConstraint, FlatNLP, NodeBlock, flatten
from src.domain.graph.optigraph import OptiGraph
from src.domain.graph.optinode import (
    ConstraintBounds,
    LinkConstraint,
    NodeConstraint,
    OptiNode,
    VariableInfo,
)
from src.domain.graph.partition import Partition, heuristic_partition, partition
from src.domain.graph.structure import (
    AdjacencyExport,
    Block,
    BlockStructure,
    adjacency_export,
    to_dot,
    write_adjacency_csv,
)

__all__ = [
    "AdjacencyExport",
    "Block",
    "BlockStructure",
    "ConstraintBounds",
    "FlatConstraint",
    "FlatNLP",
    "LinkConstraint",
    "NodeBlock",
    "NodeConstraint",
    "OptiGraph",
    "OptiNode",
    "Partition",
    "VariableInfo",
    "adjacency_export",
    "aggregate",
    "aggregate_all",
    "flatten",
    "heuristic_partition",
    "partition",
    "to_dot",
    "write_adjacency_csv",
]
