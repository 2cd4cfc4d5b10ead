# tests/test_optigraph.py
import json
import math

import numpy as np
import pytest

from src.domain.exceptions.expression_exceptions import ExpressionFormatError
from src.domain.exceptions.graph_exceptions import (
    CrossNodeExpression,
    DuplicateNodeId,
    EmptyPart,
    InvalidPartCount,
    LengthMismatch,
    SingleNodeLink,
    UnknownVariable,
    UnreachableNode,
)
from src.domain.exceptions.validation_exception import ConfigError, ModelFileError
from src.domain.expressions import evaluate
from src.domain.expressions.expression import VariableRef
from src.domain.graph import (
    ConstraintBounds,
    OptiGraph,
    Partition,
    adjacency_export,
    aggregate,
    aggregate_all,
    flatten,
    heuristic_partition,
    partition,
    to_dot,
)
from src.infrastructure.serialization import parse_model_file, read_model_file, write_model_file
from tests.builders import build_chain


class TestConstruction:
    """测试图的构造规则"""

    def setup_method(self):
        self.graph = OptiGraph("g")

    def test_auto_ids_are_unique(self):
        a = self.graph.add_node()
        b = self.graph.add_node()
        assert a.id != b.id
        assert self.graph.num_nodes == 2

    def test_duplicate_id_across_subgraphs(self):
        self.graph.add_node("x")
        sg = self.graph.add_subgraph(name="sub")
        with pytest.raises(DuplicateNodeId):
            sg.add_node("x")

    def test_variable_bounds_checked(self):
        node = self.graph.add_node("n")
        with pytest.raises(ConfigError):
            node.add_variable("x", 2.0, 1.0)

    def test_duplicate_variable_name(self):
        node = self.graph.add_node("n")
        node.add_variable("x")
        with pytest.raises(ConfigError):
            node.add_variable("x")

    def test_node_constraint_must_be_local(self):
        a = self.graph.add_node("a")
        b = self.graph.add_node("b")
        xa = a.add_variable("x")
        xb = b.add_variable("x")
        with pytest.raises(CrossNodeExpression):
            a.add_constraint(xa + xb)
        with pytest.raises(CrossNodeExpression):
            a.set_objective(xb * 2)

    def test_link_needs_two_nodes(self):
        a = self.graph.add_node("a")
        x = a.add_variable("x")
        y = a.add_variable("y")
        with pytest.raises(SingleNodeLink):
            self.graph.link_constraint(x - y)

    def test_link_must_reach_nodes_from_its_graph(self):
        sg = self.graph.add_subgraph(name="sub")
        inner = sg.add_node("inner")
        outer = self.graph.add_node("outer")
        x = inner.add_variable("x")
        y = outer.add_variable("y")
        with pytest.raises(UnreachableNode):
            sg.link_constraint(x - y)
        self.graph.link_constraint(x - y)
        assert self.graph.check_links_reachable()

    def test_link_variable_index_checked(self):
        a = self.graph.add_node("a")
        b = self.graph.add_node("b")
        x = a.add_variable("x")
        b.add_variable("y")
        with pytest.raises(UnknownVariable) as exc:
            self.graph.link_constraint(x - VariableRef("b", 3))
        assert exc.value.details["local_index"] == 3
        assert self.graph.num_link_constraints == 0

    def test_node_variable_index_checked(self):
        a = self.graph.add_node("a")
        a.add_variable("x")
        with pytest.raises(UnknownVariable):
            a.set_objective(VariableRef("a", 1) * 2)

    def test_inverted_constraint_bounds(self):
        with pytest.raises(ConfigError):
            ConstraintBounds.inequality(1.0, 0.0)

    def test_counts(self, two_stage_graph):
        assert two_stage_graph.num_nodes == 3
        assert two_stage_graph.num_variables == 3
        assert two_stage_graph.num_link_constraints == 2


class TestFlatten:
    """测试展开为单个非线性规划"""

    def test_variable_order_follows_nodes(self, two_stage_graph):
        flat = flatten(two_stage_graph)
        assert flat.var_names == ["m.y", "s1.x", "s2.x"]
        assert flat.n_cons == 2
        np.testing.assert_array_equal(flat.link_rows, [0, 1])

    def test_inequality_adds_slack_on_last_support_node(self, chain_graph):
        flat = flatten(chain_graph)
        assert flat.num_slacks == 3
        # 链接 n0–n1 的松弛变量归 n1
        n1 = flat.block_map["n1"]
        assert n1.var_stop - n1.var_start == 2
        slack = n1.var_start + 1
        assert flat.upper[slack] == 0.5
        assert math.isinf(flat.lower[slack])

    def test_slack_starts_at_constraint_value(self, chain_graph):
        flat = flatten(chain_graph)
        row = flat.link_rows[0]
        assert evaluate(flat.constraints[row].expr, flat.x0) == pytest.approx(0.0)

    def test_block_structure_detects_master(self, two_stage_graph):
        flat = flatten(two_stage_graph)
        structure = flat.structure
        assert structure.num_blocks == 3
        assert structure.blocks[structure.master].node_ids == ("m",)
        assert structure.border_rows.size == 2

    def test_solution_by_node(self, two_stage_graph):
        flat = flatten(two_stage_graph)
        by_node = flat.solution_by_node([1.0, 2.0, 3.0])
        assert by_node == {"m": {"y": 1.0}, "s1": {"x": 2.0}, "s2": {"x": 3.0}}


class TestPartition:
    """测试划分"""

    def test_membership_validation(self):
        with pytest.raises(EmptyPart):
            Partition.from_membership([0, 2, 2])
        with pytest.raises(ConfigError):
            Partition((0, 5), 2)

    def test_length_mismatch(self, chain_graph):
        with pytest.raises(LengthMismatch):
            partition(chain_graph, Partition.from_membership([0, 1]))

    def test_partition_moves_internal_links(self, chain_graph):
        partition(chain_graph, Partition.from_membership([0, 0, 1, 1]))
        assert [len(sg.nodes) for sg in chain_graph.subgraphs] == [2, 2]
        assert [len(sg.links) for sg in chain_graph.subgraphs] == [1, 1]
        assert len(chain_graph.links) == 1
        assert chain_graph.num_nodes == 4
        assert chain_graph.check_links_reachable()

    def test_heuristic_sizes(self):
        graph = build_chain(7)
        p = heuristic_partition(graph, 3)
        assert p.part_sizes() == [3, 2, 2]
        assert list(p.membership) == [0, 0, 0, 1, 1, 2, 2]

    def test_heuristic_part_count_checked(self, chain_graph):
        with pytest.raises(InvalidPartCount):
            heuristic_partition(chain_graph, 5)
        with pytest.raises(InvalidPartCount):
            heuristic_partition(chain_graph, 0)


class TestAggregate:
    """测试聚合"""

    def test_aggregate_subgraphs(self, two_stage_graph):
        result = aggregate(two_stage_graph)
        assert result.num_nodes == 3
        assert result.num_variables == 3
        assert len(result.links) == 2
        assert result.has_node("scenario1")
        assert "s1.x" in result.node("scenario1")

    def test_aggregate_all_turns_links_into_constraints(self, two_stage_graph):
        result = aggregate_all(two_stage_graph)
        assert result.num_nodes == 1
        assert result.num_link_constraints == 0
        assert result.num_constraints == 2

    def test_aggregate_preserves_objective(self, two_stage_graph):
        x = [0.3, 1.2, -0.4]
        before = flatten(two_stage_graph)
        after = flatten(aggregate_all(two_stage_graph))
        assert evaluate(after.objective, x) == pytest.approx(evaluate(before.objective, x))


class TestExport:
    """测试结构导出"""

    def test_adjacency_edges_colored_by_part(self, chain_graph):
        partition(chain_graph, Partition.from_membership([0, 0, 1, 1]))
        export = adjacency_export(chain_graph)
        assert export.edges == ((0, 1, 0), (1, 2, -1), (2, 3, 1))
        assert export.matrix().sum() == 6

    def test_dot_output(self, two_stage_graph):
        text = to_dot(adjacency_export(two_stage_graph), "two_stage")
        assert text.startswith('graph "two_stage" {')
        assert text.count(" -- ") == 2


class TestModelFile:
    """测试模型文件读写"""

    def test_round_trip(self, tmp_path, two_stage_graph):
        two_stage_graph.metadata["generator"] = "test"
        path = write_model_file(two_stage_graph, tmp_path / "model.json")
        restored = read_model_file(path)
        assert restored.num_nodes == 3
        assert restored.num_link_constraints == 2
        assert [sg.name for sg in restored.subgraphs] == ["scenario1", "scenario2"]
        assert restored.metadata["generator"] == "test"
        x = [0.1, 0.2, 0.3]
        assert evaluate(flatten(restored).objective, x) == pytest.approx(
            evaluate(flatten(two_stage_graph).objective, x))

    def test_infinite_bounds_written_as_null(self, tmp_path, chain_graph):
        path = write_model_file(chain_graph, tmp_path / "chain.json")
        data = json.loads(path.read_text())
        assert data["links"][0]["bounds"] == {"kind": "inequality", "lo": None, "hi": 0.5}

    def test_syntax_error_has_position(self):
        with pytest.raises(ModelFileError) as exc:
            parse_model_file('{"name": "x",\n "nodes": [}', "bad.json")
        assert exc.value.details["line"] == 2

    def test_structure_error_names_field(self):
        with pytest.raises(ModelFileError) as exc:
            parse_model_file('{"name": "x", "nodes": [{"variables": []}]}')
        assert "nodes.0.id" in str(exc.value)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ModelFileError):
            read_model_file(tmp_path / "missing.json")

    def test_link_must_name_nodes(self, tmp_path):
        text = json.dumps({
            "name": "g",
            "nodes": [{"id": "a", "variables": [{"name": "x"}]}, {"id": "b", "variables": [{"name": "x"}]}],
            "links": [{"expr": ["-", ["var", 0], ["var", "b", 0]]}],
        })
        (tmp_path / "g.json").write_text(text)
        with pytest.raises(ExpressionFormatError):
            read_model_file(tmp_path / "g.json")
