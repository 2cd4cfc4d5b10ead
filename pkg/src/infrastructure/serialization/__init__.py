# src/infrastructure/serialization/__init__.py
from src.infrastructure.serialization.model_file_codec import (
    graph_to_model_file,
    model_file_to_graph,
    parse_model_file,
    read_model_file,
    write_model_file,
)

__all__ = [
    "graph_to_model_file",
    "model_file_to_graph",
    "parse_model_file",
    "read_model_file",
    "write_model_file",
]
