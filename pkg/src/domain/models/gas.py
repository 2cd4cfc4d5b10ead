# src/domain/models/gas.py
"""
两阶段随机天然气管网

链式拓扑 P1 C1 P2 C2 … Pk Ck P(k+1) … Pm，相邻元件之间是节点（junction），
气体在第一个节点供应、在最后一个节点交付。每个场景一个子图，场景内每个节点、
压缩机、管道又各是一个子图：节点和压缩机每个时间点一个 OptiNode，管道每个
(时间, 空间) 点一个 OptiNode。主节点持有第一阶段压缩功率 P̄[ℓ, t]，
与每个场景的压缩机功率相等。
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from src.domain.exceptions.validation_exception import TopologyError
from src.domain.expressions.expression import Expression, quicksum, smooth_abs
from src.domain.graph.optigraph import OptiGraph
from src.domain.graph.optinode import ConstraintBounds, OptiNode
from src.domain.models.demand import demand_matrix
from src.infrastructure.logging.logger import get_logger
from src.schemas.dtos.request.gas_config import GasConfig

logger = get_logger(__name__)

MASTER_ID = "master"
# 参考规模的每场景变量数，只用于报告差值
REFERENCE_SCENARIO_VARIABLES = 11376

Element = Tuple[str, int]


def chain_topology(cfg: GasConfig) -> List[Element]:
    """元件顺序；第 e 个元件（从 0 开始）连接节点 e+1 与 e+2"""
    if cfg.n_pipelines < cfg.n_compressors:
        raise TopologyError(
            f"{cfg.n_compressors} compressors need at least as many pipelines, got {cfg.n_pipelines}"
        )
    if cfg.n_junctions != cfg.num_elements + 1:
        raise TopologyError(
            f"a chain of {cfg.num_elements} elements has {cfg.num_elements + 1} junctions, "
            f"configured {cfg.n_junctions}"
        )
    elements: List[Element] = []
    for i in range(1, cfg.n_compressors + 1):
        elements.append(("pipeline", i))
        elements.append(("compressor", i))
    for i in range(cfg.n_compressors + 1, cfg.n_pipelines + 1):
        elements.append(("pipeline", i))
    return elements


def _constrain(graph: OptiGraph, expr: Expression, kind: Optional[ConstraintBounds] = None,
               name: Optional[str] = None) -> None:
    """只涉及一个节点时作为节点约束，否则作为链接约束"""
    support = expr.node_ids()
    if len(support) == 1:
        graph.node(next(iter(support))).add_constraint(expr, kind, name)
    else:
        graph.link_constraint(expr, kind, name)


@dataclass
class _Endpoints:
    """元件在每个时间点的入口 / 出口节点"""
    inlet: List[OptiNode]
    outlet: List[OptiNode]


class _ScenarioBuilder:
    def __init__(self, cfg: GasConfig, s: int, demand: np.ndarray):
        self.cfg = cfg
        self.s = s
        self.demand = demand
        self.graph = OptiGraph(f"scenario{s}")
        self.p0 = 0.5 * (cfg.pressure_min + cfg.pressure_max)
        self.f0 = min(cfg.demand_base, cfg.flow_max)
        self.compressors: Dict[int, List[OptiNode]] = {}

    def build(self, elements: List[Element]) -> OptiGraph:
        cfg = self.cfg
        junctions = [self._junction(j) for j in range(1, cfg.n_junctions + 1)]
        endpoints: List[_Endpoints] = []
        for kind, index in elements:
            if kind == "compressor":
                nodes = self._compressor(index)
                self.compressors[index] = nodes
                endpoints.append(_Endpoints(nodes, nodes))
            else:
                grid = self._pipeline(index)
                endpoints.append(_Endpoints([row[0] for row in grid], [row[-1] for row in grid]))
        self._link_junctions(junctions, endpoints)
        return self.graph

    # ---- 节点 ----
    def _junction(self, j: int) -> List[OptiNode]:
        cfg, s = self.cfg, self.s
        sub = OptiGraph(f"s{s}.junction{j}")
        nodes = []
        for t in range(1, cfg.Nt + 1):
            node = sub.add_node(f"s{s}.j{j}.t{t}")
            node.add_variable("theta", cfg.pressure_min, cfg.pressure_max, init=self.p0)
            if j == 1:
                node.add_variable("supply", 0.0, cfg.supply_max, init=min(self.f0, cfg.supply_max))
            if j == cfg.n_junctions:
                d = float(self.demand[t - 1])
                delivery = node.add_variable("delivery", 0.0, init=d)
                excess = node.add_variable("excess", 0.0, init=0.0)
                node.add_constraint(delivery - excess, ConstraintBounds.inequality(hi=d), name="demand")
                node.set_objective(-cfg.beta * delivery + cfg.kappa * excess)
            nodes.append(node)
        self.graph.add_subgraph(sub)
        return nodes

    # ---- 压缩机 ----
    def _compressor(self, index: int) -> List[OptiNode]:
        cfg, s = self.cfg, self.s
        sub = OptiGraph(f"s{s}.compressor{index}")
        exponent = (cfg.gamma - 1.0) / cfg.gamma
        nodes = []
        for t in range(1, cfg.Nt + 1):
            node = sub.add_node(f"s{s}.c{index}.t{t}")
            p_in = node.add_variable("p_in", cfg.pressure_min, cfg.pressure_max, init=self.p0)
            p_out = node.add_variable("p_out", cfg.pressure_min, cfg.pressure_max, init=self.p0)
            boost = node.add_variable("boost", 0.0, cfg.boost_max, init=0.0)
            power = node.add_variable("P", 0.0, cfg.power_max, init=0.0)
            f = node.add_variable("f", 0.0, cfg.flow_max, init=self.f0)
            f_in = node.add_variable("f_in", init=self.f0)
            f_out = node.add_variable("f_out", init=self.f0)
            node.add_constraint(power - cfg.cP * cfg.T * f * ((p_out / p_in) ** exponent - 1.0), name="power")
            node.add_constraint(p_out - p_in - boost, name="boost")
            node.add_constraint(f_in - f, name="f_in")
            node.add_constraint(f_out - f, name="f_out")
            node.set_objective(cfg.alpha * power)
            nodes.append(node)
        self.graph.add_subgraph(sub)
        return nodes

    # ---- 管道 ----
    def _pipeline(self, index: int) -> List[List[OptiNode]]:
        cfg, s = self.cfg, self.s
        sub = OptiGraph(f"s{s}.pipeline{index}")
        q0 = self.f0 * abs(self.f0) / self.p0
        grid: List[List[OptiNode]] = []
        for t in range(1, cfg.Nt + 1):
            row = []
            for k in range(1, cfg.Nx + 1):
                node = sub.add_node(f"s{s}.p{index}.t{t}.x{k}")
                p = node.add_variable("p", cfg.pressure_min, cfg.pressure_max, init=self.p0)
                f = node.add_variable("f", -cfg.flow_max, cfg.flow_max, init=self.f0)
                q = node.add_variable("q", init=q0)
                # q = f|f|/p，动量方程里的摩擦项
                node.add_constraint(q - f * smooth_abs(f) / p, name="friction")
                if k == 1:
                    f_in = node.add_variable("f_in", init=self.f0)
                    p_in = node.add_variable("p_in", init=self.p0)
                    node.add_variable("linepack", init=self.p0 * cfg.pipe_length / cfg.c1)
                    node.add_constraint(f_in - f, name="f_in")
                    node.add_constraint(p_in - p, name="p_in")
                if k == cfg.Nx:
                    f_out = node.add_variable("f_out", init=self.f0)
                    p_out = node.add_variable("p_out", init=self.p0)
                    node.add_constraint(f_out - f, name="f_out")
                    node.add_constraint(p_out - p, name="p_out")
                row.append(node)
            grid.append(row)

        dt, dx = cfg.dt, cfg.dx
        for t in range(cfg.Nt):
            for k in range(cfg.Nx - 1):
                a, b = grid[t][k], grid[t][k + 1]
                tag = f"[{index},{t + 1},{k + 1}]"
                if t == 0:
                    # 初始稳态
                    sub.link_constraint((b["f"] - a["f"]) / dx, name=f"steady_mass{tag}")
                    sub.link_constraint(cfg.c2 * (b["p"] - a["p"]) / dx + cfg.c3 * a["q"],
                                        name=f"steady_momentum{tag}")
                else:
                    prev = grid[t - 1][k]
                    sub.link_constraint((a["p"] - prev["p"]) / dt + cfg.c1 * (b["f"] - a["f"]) / dx,
                                        name=f"mass{tag}")
                    sub.link_constraint((a["f"] - prev["f"]) / dt + cfg.c2 * (b["p"] - a["p"]) / dx
                                        + cfg.c3 * a["q"], name=f"momentum{tag}")

            first = grid[t][0]
            packed = quicksum(grid[t][k]["p"] for k in range(cfg.Nx - 1))
            _constrain(sub, first["linepack"] - (dx / cfg.c1) * packed, name=f"linepack[{index},{t + 1}]")

        # 末时刻的管存不少于初始管存
        sub.link_constraint(grid[-1][0]["linepack"] - grid[0][0]["linepack"],
                            ConstraintBounds.inequality(lo=0.0), name=f"refill[{index}]")
        self.graph.add_subgraph(sub)
        return grid

    # ---- 节点连接 ----
    def _link_junctions(self, junctions: List[List[OptiNode]], endpoints: List[_Endpoints]) -> None:
        cfg, g = self.cfg, self.graph
        last = len(endpoints) - 1
        for t in range(cfg.Nt):
            tag = f"[{t + 1}]"
            for e, ends in enumerate(endpoints):
                g.link_constraint(ends.inlet[t]["p_in"] - junctions[e][t]["theta"], name=f"p_in[{e + 1}]{tag}")
                g.link_constraint(ends.outlet[t]["p_out"] - junctions[e + 1][t]["theta"],
                                  name=f"p_out[{e + 1}]{tag}")
            g.link_constraint(junctions[0][t]["supply"] - endpoints[0].inlet[t]["f_in"], name=f"supply{tag}")
            for j in range(1, len(junctions) - 1):
                g.link_constraint(endpoints[j - 1].outlet[t]["f_out"] - endpoints[j].inlet[t]["f_in"],
                                  name=f"balance[{j + 1}]{tag}")
            g.link_constraint(endpoints[last].outlet[t]["f_out"] - junctions[-1][t]["delivery"],
                              name=f"delivery{tag}")


def build_gas(cfg: Optional[GasConfig] = None) -> OptiGraph:
    """构建多场景管网图；主节点的 P̄ 与每个场景的压缩机功率相连"""
    cfg = cfg or GasConfig()
    elements = chain_topology(cfg)
    demand = demand_matrix(cfg)

    graph = OptiGraph("gas")
    master = graph.add_node(MASTER_ID)
    for c in range(1, cfg.n_compressors + 1):
        for t in range(1, cfg.Nt + 1):
            master.add_variable(f"Pbar[{c},{t}]", 0.0, cfg.power_max, init=0.0)

    for s in range(1, cfg.scenarios + 1):
        builder = _ScenarioBuilder(cfg, s, demand[s - 1])
        graph.add_subgraph(builder.build(elements))
        for c, nodes in builder.compressors.items():
            for t, node in enumerate(nodes, start=1):
                graph.link_constraint(master[f"Pbar[{c},{t}]"] - node["P"], name=f"first_stage[{s},{c},{t}]")

    graph.metadata.update({
        "generator": "gas",
        "config": cfg.model_dump(mode="json"),
        "master": MASTER_ID,
        "demand": demand.tolist(),
    })
    logger.info(
        f"管网模型已生成: {cfg.scenarios} 个场景, {graph.num_variables} 个变量",
        extra={"scenarios": cfg.scenarios, "nodes": graph.num_nodes, "links": graph.num_link_constraints},
    )
    return graph


@dataclass(frozen=True)
class GasStatistics:
    scenarios: int
    scenario_variables: int
    reference_scenario_variables: int
    master_variables: int
    total_variables: int
    schur_tree_dimension: int
    schur_dual_dimension: int

    @property
    def scenario_delta(self) -> int:
        """与参考规模每场景变量数之差"""
        return self.scenario_variables - self.reference_scenario_variables

    def to_dict(self) -> Dict[str, int]:
        return {
            "scenarios": self.scenarios,
            "scenario_variables": self.scenario_variables,
            "reference_scenario_variables": self.reference_scenario_variables,
            "scenario_delta": self.scenario_delta,
            "master_variables": self.master_variables,
            "total_variables": self.total_variables,
            "schur_tree_dimension": self.schur_tree_dimension,
            "schur_dual_dimension": self.schur_dual_dimension,
        }


def _inequalities(graph: OptiGraph) -> int:
    nodes = sum(1 for n in graph.all_nodes() for c in n.constraints if not c.bounds.is_equality)
    return nodes + sum(1 for link in graph.all_links() if not link.bounds.is_equality)


def gas_statistics(graph: OptiGraph) -> GasStatistics:
    """
    展开后的变量计数（含不等式松弛变量）。每场景计数取第一个场景子图；
    tree Schur 维数 = 主节点变量 + 主节点约束，dual Schur 维数 = 顶层链接行数。
    """
    master = graph.node(MASTER_ID)
    scenario = graph.subgraphs[0] if graph.subgraphs else None
    per_scenario = scenario.num_variables + _inequalities(scenario) if scenario else 0
    return GasStatistics(
        scenarios=len(graph.subgraphs),
        scenario_variables=per_scenario,
        reference_scenario_variables=REFERENCE_SCENARIO_VARIABLES,
        master_variables=master.num_variables,
        total_variables=graph.num_variables + _inequalities(graph),
        schur_tree_dimension=master.num_variables + master.num_constraints,
        schur_dual_dimension=len(graph.links),
    )
