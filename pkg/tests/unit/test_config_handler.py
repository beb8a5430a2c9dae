"""
Test cases for YAML run configuration and CLI overrides.
"""
import pytest

from qpma.errors import ConfigError
from qpma.operations.config_handler import ConfigHandler, RunConfig
from qpma.simulation import ScenarioKind


def write_config(tmp_path, text):
    path = tmp_path / "run.yaml"
    path.write_text(text, encoding="utf-8")
    return str(path)


class TestConfigHandler:
    """Defaults, file values and overrides."""

    def test_defaults_without_file(self):
        config = ConfigHandler().build()
        assert config.basis.name == "gaussian"
        assert config.spline_order == 2
        assert config.methods == ("qlrm", "qrcm", "ew", "qpl", "jqplma")
        [scenario] = config.scenarios
        assert scenario.kind is ScenarioKind.EXAMPLE1
        assert scenario.n == 100 and scenario.reps == 50

    def test_file_values(self, tmp_path):
        path = write_config(tmp_path, """
fit: {max_iters: 100, continuation: 1}
weights: {thin: 4}
basis: cubic-poly
spline: {order: 3, knots: 2}
methods: [ew, jqplma]
seed: 99
report: {writers: [csv]}
scenario: {kind: example2, n: 60, p: 15, error_case: t3, reps: 5}
""")
        config = ConfigHandler(path).build()
        assert config.fit.max_iters == 100
        assert config.weights.thin == 4
        assert config.basis.name == "cubic-poly"
        assert (config.spline_order, config.knots) == (3, 2)
        assert config.methods == ("ew", "jqplma")
        assert config.report == {"writers": ["csv"]}
        [scenario] = config.scenarios
        assert (scenario.kind, scenario.n, scenario.p, scenario.reps) == (ScenarioKind.EXAMPLE2, 60, 15, 5)
        assert scenario.seed == 99

    def test_overrides_win(self, tmp_path):
        path = write_config(tmp_path, "basis: mixed\nweights: {thin: 2}\nscenario: {n: 80}\n")
        config = ConfigHandler(path).build({
            "basis": "gaussian", "thin": 5, "n": 150, "reps": 3, "methods": "ew,qpl", "writers": ["text"],
        })
        assert config.basis.name == "gaussian"
        assert config.weights.thin == 5
        assert config.scenarios[0].n == 150
        assert config.scenarios[0].reps == 3
        assert config.scenarios[0].name == "example1-n150-t0-r20.8"
        assert config.methods == ("ew", "qpl")
        assert config.report["writers"] == ["text"]

    def test_sweep(self, tmp_path):
        path = write_config(tmp_path, """
bases: [gaussian, mixed]
scenarios:
  low: {t: 0.0, r2: 0.5}
  high: {preset: example1-table1, r2: 0.8}
""")
        config = ConfigHandler(path).build()
        assert [s.name for s in config.scenarios] == ["low", "high"]
        assert config.scenarios[1].n == 200
        assert [b.name for b in config.bases] == ["gaussian", "mixed"]
        assert config.benchmark_settings().method_names()[-2:] == ["jqplma[gaussian]", "jqplma[mixed]"]

    def test_preset_override_replaces_file_scenarios(self, tmp_path):
        path = write_config(tmp_path, "scenario: {n: 80}\n")
        [scenario] = ConfigHandler(path).build({"preset": "example2-desk"}).scenarios
        assert scenario.kind is ScenarioKind.EXAMPLE2
        assert scenario.reps == 30

    def test_to_dict_round_values(self):
        data = ConfigHandler().build().to_dict()
        assert data["spline"] == {"order": 2, "knots": None}
        assert data["bases"] == ["gaussian"]


class TestConfigErrors:
    """Every configuration problem surfaces as ConfigError."""

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="not found"):
            ConfigHandler(str(tmp_path / "absent.yaml"))

    def test_bad_yaml(self, tmp_path):
        with pytest.raises(ConfigError, match="parsing YAML"):
            ConfigHandler(write_config(tmp_path, "fit: [unclosed\n"))

    def test_root_must_be_mapping(self, tmp_path):
        with pytest.raises(ConfigError, match="mapping"):
            ConfigHandler(write_config(tmp_path, "- a\n- b\n"))

    @pytest.mark.parametrize("text,match", [
        ("fit: {iterations: 3}\n", "unknown key"),
        ("weights: {thin: 0}\n", "thin"),
        ("scenario: {colour: red}\n", "unknown scenario field"),
        ("scenario: {preset: nope}\n", "unknown preset"),
        ("basis: wavelet\n", "unknown tau basis"),
        ("methods: [lasso]\n", "unknown method"),
        ("fit: 3\n", "must be a mapping"),
    ])
    def test_invalid_values(self, tmp_path, text, match):
        handler = ConfigHandler(write_config(tmp_path, text))
        with pytest.raises(ConfigError, match=match):
            handler.build().benchmark_settings()

    def test_run_config_validation(self):
        with pytest.raises(ConfigError, match="spline.order"):
            RunConfig(spline_order=1)
