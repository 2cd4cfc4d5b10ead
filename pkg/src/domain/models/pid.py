# src/domain/models/pid.py
"""
随机 PID 整定

每个场景一个子图，每个时间点一个节点；主节点持有整定参数 Kc、tauI、tauD。
乘积项 Kc·x、tauI·int、tauD·x 在节点内提升为变量，链接约束因此全部是仿射的。
隐式一阶差分，h = Tf / N，积分用矩形公式。
"""
from __future__ import annotations

import re
from typing import Dict, List, Optional

from src.domain.graph.optigraph import OptiGraph
from src.domain.graph.optinode import OptiNode
from src.domain.graph.partition import Partition
from src.infrastructure.logging.logger import get_logger
from src.schemas.dtos.request.pid_config import PidConfig
from src.schemas.enums.solver_enums import PidOrderingEnum

logger = get_logger(__name__)

MASTER_ID = "master"
_NODE_ID = re.compile(r"^s(\d+)\.t(\d+)$")


def node_id(s: int, t: int) -> str:
    """场景 s、时间 t（均从 1 开始）的节点 ID"""
    return f"s{s}.t{t}"


def _add_time_node(graph: OptiGraph, cfg: PidConfig, s: int, t: int) -> OptiNode:
    node = graph.add_node(node_id(s, t))
    x = node.add_variable("x", *cfg.x_bounds)
    u = node.add_variable("u", *cfg.u_bounds)
    integral = node.add_variable("int")
    kc = node.add_variable("Kc")
    tau_i = node.add_variable("tauI")
    tau_d = node.add_variable("tauD")
    kcx = node.add_variable("Kcx")
    tau_i_int = node.add_variable("tauIint")
    tau_dx = node.add_variable("tauDx")

    node.add_constraint(kcx - kc * x, name="Kcx")
    node.add_constraint(tau_i_int - tau_i * integral, name="tauIint")
    node.add_constraint(tau_dx - tau_d * x, name="tauDx")

    xsp = cfg.xsp[s - 1]
    node.set_objective((1.0 / cfg.NS) * (cfg.tracking_weight * (xsp - x) ** 2 + cfg.control_weight * u ** 2))
    if t == 1:
        node.add_constraint(integral, name="int0")
        node.add_constraint(x - cfg.x0, name="x0")
    return node


def _link_scenario(graph: OptiGraph, cfg: PidConfig, s: int, nodes: List[OptiNode]) -> None:
    h = cfg.h
    xsp = cfg.xsp[s - 1]
    d = cfg.d[s - 1]
    for t in range(len(nodes) - 1):
        a, b = nodes[t], nodes[t + 1]
        graph.link_constraint(
            (1.0 / cfg.tau) * (b["x"] - a["x"]) / h + b["x"] - cfg.K * b["u"] - cfg.Kd * d,
            name=f"dynamics[{s},{t + 1}]",
        )
        graph.link_constraint(
            b["u"] - (a["Kc"] * xsp - a["Kcx"] + b["tauIint"] + b["tauDx"] / h - a["tauDx"] / h),
            name=f"controller[{s},{t + 1}]",
        )
        graph.link_constraint((b["int"] - a["int"]) / h - (xsp - b["x"]), name=f"integral[{s},{t + 1}]")
        for p in ("Kc", "tauI", "tauD"):
            graph.link_constraint(a[p] - b[p], name=f"{p}[{s},{t + 1}]")


def _add_master(graph: OptiGraph, cfg: PidConfig) -> OptiNode:
    master = graph.add_node(MASTER_ID)
    master.add_variable("Kc", *cfg.Kc_bounds)
    master.add_variable("tauI", *cfg.tau_bounds)
    master.add_variable("tauD", *cfg.tau_bounds)
    return master


def _tie_to_master(graph: OptiGraph, master: OptiNode, first: OptiNode, s: int) -> None:
    for p in ("Kc", "tauI", "tauD"):
        graph.link_constraint(first[p] - master[p], name=f"master.{p}[{s}]")


def build_pid(cfg: Optional[PidConfig] = None) -> OptiGraph:
    """
    构建 PID 整定图。

    scenario_major：主节点 + 每个场景一个子图（all_nodes 顺序为主节点、场景 1 的 N 个节点、…）；
    time_major：单层图，节点按时间优先顺序创建，所有链接在顶层。
    """
    cfg = cfg or PidConfig()
    graph = OptiGraph("pid")
    master = _add_master(graph, cfg)
    ordering = PidOrderingEnum(cfg.ordering)

    scenario_nodes: Dict[int, List[OptiNode]] = {}
    if ordering == PidOrderingEnum.SCENARIO_MAJOR:
        for s in range(1, cfg.NS + 1):
            sub = OptiGraph(f"scenario{s}")
            nodes = [_add_time_node(sub, cfg, s, t) for t in range(1, cfg.N + 1)]
            _link_scenario(sub, cfg, s, nodes)
            graph.add_subgraph(sub)
            scenario_nodes[s] = nodes
    else:
        for s in range(1, cfg.NS + 1):
            scenario_nodes[s] = []
        for t in range(1, cfg.N + 1):
            for s in range(1, cfg.NS + 1):
                scenario_nodes[s].append(_add_time_node(graph, cfg, s, t))
        for s in range(1, cfg.NS + 1):
            _link_scenario(graph, cfg, s, scenario_nodes[s])

    for s in range(1, cfg.NS + 1):
        _tie_to_master(graph, master, scenario_nodes[s][0], s)

    graph.metadata.update({"generator": "pid", "config": cfg.model_dump(mode="json"), "master": MASTER_ID})
    logger.info(
        f"PID 模型已生成: {graph.num_nodes} 个节点, {graph.num_variables} 个变量",
        extra={"scenarios": cfg.NS, "steps": cfg.N, "ordering": str(ordering)},
    )
    return graph


def pid_time_partition(graph: OptiGraph, parts: int = 4) -> Partition:
    """
    按时间窗口分区：每个场景的第 t 个节点属于第 ⌊(t−1)·P/N⌋ 部分，主节点归入第一部分。
    成员向量按 all_nodes 顺序给出，节点通过 ID s<场景>.t<时间> 识别。
    """
    nodes = graph.all_nodes()
    times = {}
    for node in nodes:
        match = _NODE_ID.match(str(node.id))
        if match:
            times[node.id] = int(match.group(2))
    if not times:
        return Partition.from_membership([0] * len(nodes), 1)
    horizon = max(times.values())
    membership = [((times[node.id] - 1) * parts) // horizon if node.id in times else 0 for node in nodes]
    return Partition.from_membership(membership, parts)
