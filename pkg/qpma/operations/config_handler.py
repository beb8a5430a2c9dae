"""
Run configuration: YAML file merged with defaults and CLI overrides.

File layout (every key optional)::

    fit:      {max_iters: 500, tol: 1.0e-9, smoothing: null, continuation: 2, loo_max_iters: 50}
    weights:  {thin: 1, subgradient_iters: 300, polish_stages: 4}
    basis:    gaussian            # or cubic-poly, mixed, custom:one,tau,qnorm
    bases:    [gaussian, mixed]   # optional sensitivity sweep for jqplma
    spline:   {order: 2, knots: null}
    methods:  [qlrm, qrcm, ew, qpl, jqplma]
    seed:     20240101
    out:      results
    report:   {writers: [csv, text]}
    scenario: {preset: example1-desk, n: 200, reps: 50}
    scenarios:                    # benchmark sweeps; overrides ``scenario``
      cell-a: {kind: example1, t: 0.0, r2: 0.8}
"""

import logging
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import yaml

from ..core.iqr_solver import FitConfig
from ..core.jackknife_averaging import WeightConfig
from ..core.spline_basis import DEFAULT_ORDER
from ..core.tau_basis import DEFAULT_FAMILY, TauBasis
from ..errors import ConfigError
from ..simulation.benchmark import DEFAULT_METHODS, BenchmarkSettings
from ..simulation.scenarios import PRESETS, Scenario

logger = logging.getLogger(__name__)

TOP_LEVEL_KEYS = {
    "fit", "weights", "basis", "bases", "spline", "methods", "seed", "out", "report",
    "scenario", "scenarios",
}
SCENARIO_KEYS = {f.name for f in fields(Scenario)} | {"preset"}
DEFAULT_PRESET = "example1-desk"


@dataclass
class RunConfig:
    """Effective settings of one command invocation."""

    fit: FitConfig = field(default_factory=FitConfig)
    weights: WeightConfig = field(default_factory=WeightConfig)
    basis: TauBasis = field(default_factory=lambda: TauBasis.of(DEFAULT_FAMILY))
    bases: Tuple[TauBasis, ...] = ()
    spline_order: int = DEFAULT_ORDER
    knots: Optional[int] = None
    methods: Tuple[str, ...] = DEFAULT_METHODS
    seed: Optional[int] = None
    out: Optional[str] = None
    report: Dict[str, Any] = field(default_factory=dict)
    scenarios: List[Scenario] = field(default_factory=list)

    def __post_init__(self):
        if not self.bases:
            self.bases = (self.basis,)
        if self.spline_order < 2:
            raise ConfigError(f"spline.order must be >= 2, got {self.spline_order}")
        if self.knots is not None and self.knots < 0:
            raise ConfigError(f"spline.knots must be >= 0, got {self.knots}")

    def benchmark_settings(self) -> BenchmarkSettings:
        return BenchmarkSettings(
            methods=self.methods,
            bases=self.bases,
            spline_order=self.spline_order,
            n_interior=self.knots,
            fit=self.fit,
            weights=self.weights,
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "fit": self.fit.to_dict(),
            "weights": self.weights.to_dict(),
            "basis": self.basis.name,
            "bases": [b.name for b in self.bases],
            "spline": {"order": self.spline_order, "knots": self.knots},
            "methods": list(self.methods),
            "seed": self.seed,
            "out": self.out,
            "report": dict(self.report),
            "scenarios": [s.to_dict() for s in self.scenarios],
        }


class ConfigHandler:
    """Loads a run configuration file and applies command-line overrides."""

    def __init__(self, path: Optional[str] = None):
        self.logger = logging.getLogger(f"qpma.{self.__class__.__name__}")
        self.path = Path(path) if path else None
        self.raw = self._load_yaml_file(self.path)

    def _load_yaml_file(self, path: Optional[Path]) -> Dict[str, Any]:
        """Load a YAML file safely and return a dictionary."""
        if path is None:
            return {}
        try:
            with open(path, "r", encoding="utf-8") as f:
                content = yaml.safe_load(f) or {}
        except FileNotFoundError:
            raise ConfigError(f"configuration file not found: {path}") from None
        except yaml.YAMLError as e:
            raise ConfigError(f"error parsing YAML configuration {path}: {e}") from None
        if not isinstance(content, dict):
            raise ConfigError(f"YAML root must be a mapping in {path}")
        unknown = sorted(set(content) - TOP_LEVEL_KEYS)
        if unknown:
            self.logger.warning(f"Ignoring unknown configuration keys {unknown} in {path}")
        self.logger.info(f"Loaded configuration file: {path}")
        return content

    def _section(self, key: str) -> Dict[str, Any]:
        value = self.raw.get(key) or {}
        if not isinstance(value, dict):
            raise ConfigError(f"'{key}' must be a mapping")
        return value

    @staticmethod
    def _merge(defaults: Dict[str, Any], values: Dict[str, Any]) -> Dict[str, Any]:
        """Defaults overridden by non-empty values."""
        merged = dict(defaults)
        for key, value in values.items():
            if value is None:
                continue
            if isinstance(value, str) and not value.strip():
                continue
            merged[key] = value
        return merged

    @staticmethod
    def _dataclass_from(cls, section: str, values: Dict[str, Any]):
        allowed = {f.name for f in fields(cls)} - {"warm_start"}
        unknown = sorted(set(values) - allowed)
        if unknown:
            raise ConfigError(f"unknown key(s) {unknown} in '{section}'")
        try:
            return cls(**values)
        except TypeError as e:
            raise ConfigError(f"invalid '{section}' settings: {e}") from None

    def build_scenario(self, values: Dict[str, Any], name: str = "") -> Scenario:
        values = dict(values or {})
        unknown = sorted(set(values) - SCENARIO_KEYS)
        if unknown:
            raise ConfigError(f"unknown scenario field(s) {unknown}; allowed: {sorted(SCENARIO_KEYS)}")
        preset = values.pop("preset", None)
        base: Dict[str, Any] = {}
        if preset is not None:
            if preset not in PRESETS:
                raise ConfigError(f"unknown preset '{preset}'; choose from {sorted(PRESETS)}")
            base = dict(PRESETS[preset])
        merged = self._merge(base, values)
        if name and "name" not in merged:
            merged["name"] = name
        try:
            return Scenario(**merged)
        except TypeError as e:
            raise ConfigError(f"invalid scenario: {e}") from None

    def _scenarios(self, preset: Optional[str]) -> List[Scenario]:
        if preset is not None:
            return [self.build_scenario({"preset": preset})]
        sweep = self._section("scenarios")
        if sweep:
            return [self.build_scenario(values or {}, name=str(name)) for name, values in sweep.items()]
        single = self._section("scenario")
        if single:
            return [self.build_scenario(single)]
        return [self.build_scenario({"preset": DEFAULT_PRESET})]

    def build(self, overrides: Optional[Dict[str, Any]] = None) -> RunConfig:
        """Effective configuration: built-in defaults, then the file, then ``overrides``.

        Override keys mirror the CLI flags: basis, spline_order, knots, thin,
        seed, reps, n, methods, out, preset, writers.
        """
        o = {k: v for k, v in (overrides or {}).items() if v is not None}

        fit_cfg = self._dataclass_from(FitConfig, "fit", self._section("fit"))
        weight_values = self._merge(self._section("weights"), {"thin": o.get("thin")})
        weight_cfg = self._dataclass_from(WeightConfig, "weights", weight_values)

        spline = self._section("spline")
        basis = TauBasis.from_name(str(o.get("basis") or self.raw.get("basis") or DEFAULT_FAMILY.value))
        if "basis" in o:
            bases: Tuple[TauBasis, ...] = (basis,)
        else:
            bases = tuple(TauBasis.from_name(str(b)) for b in (self.raw.get("bases") or [])) or (basis,)
            basis = bases[0]

        methods = o.get("methods") or self.raw.get("methods") or DEFAULT_METHODS
        if isinstance(methods, str):
            methods = [m for m in methods.split(",") if m.strip()]

        report = dict(self._section("report"))
        if o.get("writers"):
            report["writers"] = list(o["writers"])

        seed = o.get("seed", self.raw.get("seed"))
        scenarios = self._scenarios(o.get("preset"))
        scenario_overrides = {"seed": seed, "reps": o.get("reps"), "n": o.get("n")}
        scenarios = [self._override_scenario(s, scenario_overrides) for s in scenarios]

        config = RunConfig(
            fit=fit_cfg,
            weights=weight_cfg,
            basis=basis,
            bases=bases,
            spline_order=int(o.get("spline_order", spline.get("order") or DEFAULT_ORDER)),
            knots=o.get("knots", spline.get("knots")),
            methods=tuple(str(m).strip().lower() for m in methods),
            seed=seed,
            out=o.get("out", self.raw.get("out")),
            report=report,
            scenarios=scenarios,
        )
        self.logger.debug(f"Effective configuration: {config.to_dict()}")
        return config

    def _override_scenario(self, scenario: Scenario, values: Dict[str, Any]) -> Scenario:
        changes = {k: v for k, v in values.items() if v is not None}
        if not changes:
            return scenario
        data = {f.name: getattr(scenario, f.name) for f in fields(Scenario)}
        if data["name"] == scenario.default_name():
            data["name"] = ""
        data.update(changes)
        return Scenario(**data)
