# tests/test_models.py
import numpy as np
import pytest

from src.domain.exceptions.validation_exception import ConfigError, TopologyError
from src.domain.graph import aggregate, flatten, partition
from src.domain.ipm import InteriorPointSolver, compute_step
from src.domain.kkt import SchurDualBackend, SchurTreeBackend, check_affine_links
from src.domain.models import (
    build_gas,
    build_pid,
    chain_topology,
    demand_matrix,
    demand_profile,
    gas_statistics,
    pid_time_partition,
    write_demand_csv,
)
from src.schemas.dtos.request.gas_config import GasConfig
from src.schemas.dtos.request.pid_config import PidConfig
from src.schemas.dtos.request.solver_options import SolverOptions


def small_gas(**overrides) -> GasConfig:
    values = dict(n_compressors=1, n_pipelines=2, n_junctions=4, Nt=3, Nx=3, scenarios=2)
    values.update(overrides)
    return GasConfig(**values)


class TestPidConfig:
    """测试 PID 配置校验"""

    def test_scenarios_resize_disturbances(self):
        cfg = PidConfig(NS=7)
        assert len(cfg.d) == 7
        assert cfg.xsp == [-2.0, -1.5, -0.5, 0.5, 1.0, -2.0, -1.5]

    def test_explicit_lists_are_not_resized(self):
        with pytest.raises(ConfigError):
            PidConfig.from_defaults({"NS": 5}, NS=2, d=[1.0, 2.0, 3.0])

    def test_invalid_values(self):
        with pytest.raises(ConfigError) as exc:
            PidConfig.validated({"N": 1})
        assert exc.value.details["field_name"] == "N"
        with pytest.raises(ConfigError):
            PidConfig.validated({"tau": 0.0})
        with pytest.raises(ConfigError):
            PidConfig.validated({"x_bounds": (1.0, -1.0)})

    def test_step_size(self):
        assert PidConfig(N=50, Tf=5.0).h == pytest.approx(0.1)


class TestPidModel:
    """测试 PID 图结构"""

    def setup_method(self):
        self.cfg = PidConfig(NS=2, N=4)

    def test_counts(self):
        graph = build_pid(self.cfg)
        assert graph.num_nodes == 1 + 2 * 4
        assert graph.num_variables == 3 + 2 * 4 * 9
        # 每个时间步 6 条链接，每个场景 3 条连到主节点
        assert graph.num_link_constraints == 2 * 3 * 6 + 2 * 3
        assert len(graph.links) == 6
        assert [sg.name for sg in graph.subgraphs] == ["scenario1", "scenario2"]

    def test_links_are_affine(self):
        flat = flatten(build_pid(self.cfg))
        check_affine_links(flat)

    def test_master_detected(self):
        flat = flatten(build_pid(self.cfg))
        structure = flat.structure
        assert structure.master is not None
        assert structure.blocks[structure.master].node_ids == ("master",)

    def test_time_major_is_flat(self):
        graph = build_pid(PidConfig(NS=2, N=4, ordering="time_major"))
        assert graph.subgraphs == []
        assert len(graph.links) == 42
        assert [n.id for n in graph.all_nodes()[:4]] == ["master", "s1.t1", "s2.t1", "s1.t2"]

    def test_time_partition(self):
        graph = build_pid(self.cfg)
        p = pid_time_partition(graph, 2)
        assert list(p.membership) == [0, 0, 0, 1, 1, 0, 0, 1, 1]
        partition(graph, p)
        assert [len(sg.all_nodes()) for sg in graph.subgraphs] == [5, 4]
        assert graph.check_links_reachable()

    def test_metadata(self):
        graph = build_pid(self.cfg)
        assert graph.metadata["generator"] == "pid"
        assert graph.metadata["config"]["NS"] == 2


class TestDemand:
    """测试需求曲线"""

    def test_explicit_step(self):
        profile = demand_profile(1, 8, base=10.0, step_mag=3.0, step_window=(2, 5))
        np.testing.assert_allclose(profile, [10, 10, 13, 13, 13, 10, 10, 10])

    def test_random_profile_is_deterministic(self):
        a = demand_profile(2, 24, seed=7)
        b = demand_profile(2, 24, seed=7)
        np.testing.assert_array_equal(a, b)
        assert not np.array_equal(a, demand_profile(3, 24, seed=7))

    def test_random_profile_shape(self):
        profile = demand_profile(1, 24)
        assert profile[0] == 10.0
        raised = profile > 10.0
        assert raised.sum() >= 4
        # 只有一个连续窗口
        assert np.count_nonzero(np.diff(raised.astype(int)) == 1) == 1
        assert 12.0 <= profile.max() <= 16.0

    def test_invalid_window(self):
        with pytest.raises(ConfigError):
            demand_profile(1, 5, step_mag=1.0, step_window=(3, 9))
        with pytest.raises(ConfigError):
            demand_profile(1, 0)

    def test_explicit_matrix_wins(self):
        cfg = small_gas(scenarios=1, demand=[[1.0, 2.0, 3.0]])
        np.testing.assert_array_equal(demand_matrix(cfg), [[1.0, 2.0, 3.0]])

    def test_csv_layout(self, tmp_path):
        path = write_demand_csv(np.array([[1.0, 2.0], [3.0, 4.0]]), tmp_path / "d.csv")
        assert path.read_text().splitlines() == ["t,scenario1,scenario2", "1,1,3", "2,2,4"]


class TestGasModel:
    """测试管网图结构"""

    def test_topology_order(self):
        assert chain_topology(small_gas()) == [("pipeline", 1), ("compressor", 1), ("pipeline", 2)]

    def test_topology_checks(self):
        with pytest.raises(TopologyError):
            chain_topology(small_gas(n_junctions=5))
        with pytest.raises(TopologyError):
            chain_topology(small_gas(n_compressors=3, n_junctions=6))

    def test_config_checks(self):
        with pytest.raises(ConfigError):
            GasConfig.validated({"pressure_min": 80.0})
        with pytest.raises(ConfigError):
            GasConfig.validated({"scenarios": 2, "demand": [[1.0] * 24]})

    def test_statistics(self):
        stats = gas_statistics(build_gas(small_gas()))
        assert stats.scenarios == 2
        assert stats.scenario_variables == 126 + 5
        assert stats.master_variables == 3
        assert stats.total_variables == 3 + 2 * 131
        assert stats.schur_dual_dimension == 6
        assert stats.schur_tree_dimension == 3
        assert stats.to_dict()["scenario_delta"] == 131 - 11376

    def test_default_scenario_size(self):
        stats = gas_statistics(build_gas(GasConfig()))
        assert stats.scenario_variables == 13440 + 24 + 13

    def test_flat_variables_match_statistics(self):
        graph = build_gas(small_gas())
        assert flatten(graph).n_vars == gas_statistics(graph).total_variables

    def test_first_stage_links(self):
        graph = build_gas(small_gas())
        names = [link.name for link in graph.links]
        assert names[0] == "first_stage[1,1,1]"
        flat = flatten(graph)
        check_affine_links(flat, flat.structure.border_rows)


@pytest.mark.slow
class TestModelSolves:
    """小规模模型的完整求解"""

    def test_pid_backends_agree(self):
        flat = flatten(build_pid(PidConfig(NS=3, N=10)))
        reports = [InteriorPointSolver(SolverOptions(backend=b, threads=2)).solve(flat)
                   for b in ("monolithic", "schur_dual", "schur_tree")]
        assert all(r.is_optimal for r in reports)
        for r in reports[1:]:
            assert r.objective == pytest.approx(reports[0].objective, rel=1e-6)

    def test_gas_solves(self):
        flat = flatten(build_gas(small_gas(Nt=4)))
        mono = InteriorPointSolver(SolverOptions()).solve(flat)
        tree = InteriorPointSolver(SolverOptions(backend="schur_tree")).solve(flat)
        assert mono.is_optimal and tree.is_optimal
        assert tree.objective == pytest.approx(mono.objective, rel=1e-6)


class TestPidDefaults:
    """默认 PID 模型的结构"""

    def setup_method(self):
        self.graph = build_pid()

    def test_node_count(self):
        assert self.graph.num_nodes == 501

    def test_time_partition_sizes(self):
        p = pid_time_partition(self.graph, 4)
        assert p.part_sizes() == [126, 125, 125, 125]
        partition(self.graph, p)
        assert [len(sg.all_nodes()) for sg in self.graph.subgraphs] == [126, 125, 125, 125]

    def test_aggregated_scenario_form(self):
        collapsed = aggregate(self.graph)
        assert collapsed.num_nodes == 6
        assert collapsed.subgraphs == []
        assert flatten(collapsed).n_vars == flatten(self.graph).n_vars


class TestGasSchurDimension:
    """树形 Schur 维数与场景数无关，对偶 Schur 维数随场景线性增长"""

    @pytest.mark.parametrize("scenarios", [1, 2, 4, 8])
    def test_dimensions_reduced_space_grid(self, scenarios):
        stats = gas_statistics(build_gas(GasConfig(Nx=2, scenarios=scenarios)))
        assert stats.schur_tree_dimension == 264
        assert stats.schur_dual_dimension == 264 * scenarios

    @pytest.mark.parametrize("scenarios", [1, 2])
    def test_backends_report_same_dimension(self, scenarios):
        flat = flatten(build_gas(GasConfig(Nx=2, scenarios=scenarios)))
        tree, dual = SchurTreeBackend(), SchurDualBackend()
        try:
            tree.prepare(flat)
            dual.prepare(flat)
            assert tree.schur_dimension == 264
            assert dual.schur_dimension == 264 * scenarios
        finally:
            tree.close()
            dual.close()

    @pytest.mark.slow
    @pytest.mark.parametrize("scenarios", [1, 2, 4, 8])
    def test_dimensions_full_size(self, scenarios):
        stats = gas_statistics(build_gas(GasConfig(scenarios=scenarios)))
        assert stats.master_variables == 264
        assert stats.schur_tree_dimension == 264
        assert stats.schur_dual_dimension == 264 * scenarios


def reduced_gas() -> GasConfig:
    return GasConfig(n_compressors=2, n_pipelines=3, n_junctions=6, Nt=6, Nx=4, scenarios=2)


def recorded_steps(flat, **options):
    steps = []
    report = InteriorPointSolver(SolverOptions(**options), on_step=lambda s, d: steps.append((s, d))).solve(flat)
    return report, steps


def assert_steps_match(flat, steps, backend):
    try:
        for state, reference in steps:
            other = compute_step(state, flat, backend)
            scale = 1.0 + max(np.max(np.abs(reference.d_x)), np.max(np.abs(reference.d_lambda), initial=0.0))
            assert np.max(np.abs(other.d_x - reference.d_x)) <= 1e-8 * scale, f"iteration {state.k}"
            assert np.max(np.abs(other.d_lambda - reference.d_lambda), initial=0.0) <= 1e-8 * scale
    finally:
        backend.close()


@pytest.mark.slow
class TestStepEquivalence:
    """每次迭代 Schur 后端与整体后端给出相同的搜索方向"""

    def test_pid(self):
        flat = flatten(build_pid(PidConfig(NS=2, N=10)))
        report, steps = recorded_steps(flat)
        assert report.is_optimal
        assert len(steps) == report.iterations
        assert_steps_match(flat, steps, SchurDualBackend())
        assert_steps_match(flat, steps, SchurTreeBackend())

    def test_gas(self):
        flat = flatten(build_gas(reduced_gas()))
        report, steps = recorded_steps(flat)
        assert report.is_optimal
        assert_steps_match(flat, steps, SchurDualBackend(threads=2))
        assert_steps_match(flat, steps, SchurTreeBackend(threads=2))
        tree = InteriorPointSolver(SolverOptions(backend="schur_tree")).solve(flat)
        assert tree.objective == pytest.approx(report.objective, abs=1e-6)


@pytest.mark.slow
class TestGasSolutionPhysics:
    """管网最优解满足物理关系"""

    @classmethod
    def setup_class(cls):
        cls.cfg = reduced_gas()
        graph = build_gas(cls.cfg)
        cls.flat = flatten(graph)
        cls.report = InteriorPointSolver(SolverOptions(backend="schur_tree", threads=2)).solve(cls.flat)
        cls.sol = cls.flat.solution_by_node(cls.report.x)
        cls.demand = np.asarray(graph.metadata["demand"])

    def endpoints(self, s, t):
        """每个元件在时间 t 的 (入口节点, 出口节点)"""
        nx = self.cfg.Nx
        out = []
        for kind, i in chain_topology(self.cfg):
            if kind == "compressor":
                node = self.sol[f"s{s}.c{i}.t{t}"]
                out.append((node, node))
            else:
                out.append((self.sol[f"s{s}.p{i}.t{t}.x1"], self.sol[f"s{s}.p{i}.t{t}.x{nx}"]))
        return out

    def test_converged(self):
        assert self.report.is_optimal

    def test_junction_balances(self):
        tol = self.report.kkt_error + 1e-8
        for s in range(1, self.cfg.scenarios + 1):
            for t in range(1, self.cfg.Nt + 1):
                ends = self.endpoints(s, t)
                supply = self.sol[f"s{s}.j1.t{t}"]["supply"]
                delivery = self.sol[f"s{s}.j{self.cfg.n_junctions}.t{t}"]["delivery"]
                assert supply == pytest.approx(ends[0][0]["f_in"], abs=tol)
                for (_, outlet), (inlet, _) in zip(ends, ends[1:]):
                    assert outlet["f_out"] == pytest.approx(inlet["f_in"], abs=tol)
                assert ends[-1][1]["f_out"] == pytest.approx(delivery, abs=tol)

    def test_linepack_refilled(self):
        for s in range(1, self.cfg.scenarios + 1):
            for i in range(1, self.cfg.n_pipelines + 1):
                first = self.sol[f"s{s}.p{i}.t1.x1"]["linepack"]
                last = self.sol[f"s{s}.p{i}.t{self.cfg.Nt}.x1"]["linepack"]
                assert last >= first - 1e-8

    def test_first_stage_power_equal(self):
        master = self.sol["master"]
        for s in range(1, self.cfg.scenarios + 1):
            for c in range(1, self.cfg.n_compressors + 1):
                for t in range(1, self.cfg.Nt + 1):
                    power = self.sol[f"s{s}.c{c}.t{t}"]["P"]
                    assert abs(master[f"Pbar[{c},{t}]"] - power) <= 1e-8
                    assert -1e-8 <= power <= self.cfg.power_max + 1e-8

    def test_delivery_within_demand_plus_excess(self):
        for s in range(1, self.cfg.scenarios + 1):
            for t in range(1, self.cfg.Nt + 1):
                node = self.sol[f"s{s}.j{self.cfg.n_junctions}.t{t}"]
                assert node["delivery"] <= self.demand[s - 1][t - 1] + node["excess"] + 1e-8


@pytest.mark.slow
class TestPidDefaultSolve:
    """默认规模 PID 收敛"""

    def test_converges_within_iteration_limit(self):
        flat = flatten(build_pid())
        report = InteriorPointSolver(SolverOptions(backend="schur_tree", threads=4, tol=1e-8, max_iter=300)).solve(flat)
        assert report.is_optimal, report.message
        assert report.iterations <= 300
        gains = flat.solution_by_node(report.x)
        kc = [values["Kc"] for values in gains.values()]
        assert max(kc) - min(kc) <= 1e-8
