# tests/test_settings.py
import pytest
from pydantic import ValidationError

from src.application.config.models.model_settings import ModelSettings
from src.application.config.settings import Settings
from src.schemas.dtos.request.solver_options import SolverOptions


class TestSettings:
    """测试配置加载优先级"""

    def test_yaml_values_loaded(self):
        settings = Settings()
        assert settings.ipm_tol == pytest.approx(1e-8)
        assert settings.reg_delta_w_growth == 8.0
        assert settings.schur_rhs_batch == 32

    def test_environment_overrides_yaml(self, monkeypatch):
        monkeypatch.setenv("GRAPHNLP_IPM_TOL", "1e-5")
        monkeypatch.setenv("GRAPHNLP_THREADS", "3")
        settings = Settings()
        assert settings.ipm_tol == pytest.approx(1e-5)
        assert settings.threads == 3

    def test_explicit_values_win(self):
        assert Settings(log_level="debug").log_level == "DEBUG"

    def test_invalid_log_format(self):
        with pytest.raises(ValidationError):
            Settings(log_format="xml")

    def test_solver_config_groups(self):
        config = Settings().get_solver_config()
        assert "ipm_mu0" in config
        assert "linsolve_dense_threshold" in config
        assert "log_level" not in config

    def test_solver_options_from_settings(self):
        settings = Settings(threads=4)
        options = SolverOptions.from_settings(settings, {"backend": "schur-dual", "tol": None})
        assert options.threads == 4
        assert options.backend == "schur_dual"
        assert options.tol == settings.ipm_tol


class TestModelSettings:
    """测试基准模型默认参数"""

    def test_defaults(self):
        settings = ModelSettings()
        assert settings.available_models == ["gas", "pid"]
        assert settings.get_model_defaults("pid")["NS"] == 5
        assert settings.get_model_defaults("gas")["Nx"] == 10

    def test_missing_file(self, tmp_path):
        settings = ModelSettings(tmp_path / "none.yaml")
        assert settings.get_model_defaults("pid") == {}
