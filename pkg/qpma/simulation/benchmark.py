"""
Replication driver comparing quantile prediction methods on simulated data.

Every replication draws its own training and test sets from counter-based
streams, fits each requested method on the training set and scores it by
OAQPE on the test set over ``tau_grid(n)``. Replications are independent, so
they may run in separate processes; aggregation happens afterwards in
replication order, which keeps the tables identical for any worker count.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .. import __version__
from ..core.baselines import equal_weight_model, fit_qlrm, fit_qrcm_linear, single_submodel
from ..core.candidate_models import Dataset, candidate_indices, fit_specs
from ..core.evaluation import MethodResult, comparison_measures, crossing_diagnostic, oaqpe
from ..core.iqr_solver import FitConfig
from ..core.jackknife_averaging import (
    AveragedModel,
    CandidateFits,
    WeightConfig,
    build_candidates,
    fit_candidates,
    loo_predictions,
    optimize_weights,
)
from ..core.tau_basis import DEFAULT_FAMILY, TauBasis, tau_grid, thin_grid
from ..errors import ConfigError, NumericalError, QPMAError
from ..reporting import (
    BenchmarkReport,
    ExcludedReplication,
    ReportDispatcher,
    ReportMetadata,
    WeightSummary,
    discover_writers,
)
from ..utils.environment import detect_thread_count
from ..utils.parallel import parallel_map
from .rng import StreamRole, stream
from .scenarios import Scenario, generate

logger = logging.getLogger(__name__)

KNOWN_METHODS = ("qlrm", "qrcm", "ew", "qpl", "jqplma", "oracle")
DEFAULT_METHODS = ("qlrm", "qrcm", "ew", "qpl", "jqplma")
REFERENCE_METHOD = "jqplma"


@dataclass
class BenchmarkSettings:
    """Methods, bases and solver settings shared by every replication."""

    methods: Tuple[str, ...] = DEFAULT_METHODS
    bases: Tuple[TauBasis, ...] = (TauBasis.of(DEFAULT_FAMILY),)
    spline_order: int = 2
    n_interior: Optional[int] = None
    fit: FitConfig = field(default_factory=FitConfig)
    weights: WeightConfig = field(default_factory=WeightConfig)

    def __post_init__(self):
        self.methods = tuple(str(m).lower() for m in self.methods)
        if not self.methods:
            raise ConfigError("methods must name at least one method")
        unknown = sorted(set(self.methods) - set(KNOWN_METHODS))
        if unknown:
            raise ConfigError(f"unknown method(s) {unknown}; expected a subset of {list(KNOWN_METHODS)}")
        if len(set(self.methods)) != len(self.methods):
            raise ConfigError(f"duplicate methods in {list(self.methods)}")
        self.bases = tuple(self.bases)
        if not self.bases:
            raise ConfigError("bases must name at least one tau basis")
        if self.spline_order < 2:
            raise ConfigError(f"spline.order must be >= 2, got {self.spline_order}")
        if self.n_interior is not None and self.n_interior < 0:
            raise ConfigError(f"spline.knots must be >= 0, got {self.n_interior}")

    @property
    def primary_basis(self) -> TauBasis:
        return self.bases[0]

    def jqplma_labels(self) -> List[str]:
        if REFERENCE_METHOD not in self.methods:
            return []
        if len(self.bases) == 1:
            return [REFERENCE_METHOD]
        return [f"{REFERENCE_METHOD}[{b.name}]" for b in self.bases]

    def method_names(self) -> List[str]:
        names: List[str] = []
        for method in self.methods:
            names.extend(self.jqplma_labels() if method == REFERENCE_METHOD else [method])
        return names

    def to_dict(self) -> Dict[str, Any]:
        return {
            "methods": list(self.methods),
            "bases": [b.name for b in self.bases],
            "spline": {"order": self.spline_order, "knots": self.n_interior},
            "fit": self.fit.to_dict(),
            "weights": self.weights.to_dict(),
        }


@dataclass
class ReplicationOutcome:
    replication: int
    oaqpe: Dict[str, float] = field(default_factory=dict)
    crossing: Dict[str, float] = field(default_factory=dict)
    weights: Dict[str, np.ndarray] = field(default_factory=dict)
    candidate_names: Tuple[str, ...] = ()
    error: Optional[str] = None


class _CandidateCache:
    """Full-sample candidate fits per basis, shared by ew, qpl and jqplma."""

    def __init__(self, train: Dataset, settings: BenchmarkSettings, workers: int):
        self.train = train
        self.settings = settings
        self.workers = workers
        self.specs = fit_specs(train, settings.n_interior, settings.spline_order)
        self._fits: Dict[str, CandidateFits] = {}

    def fits(self, basis: TauBasis) -> CandidateFits:
        if basis.name not in self._fits:
            self._fits[basis.name] = fit_candidates(
                self.train, self.specs, basis, self.settings.fit, self.workers,
            )
        return self._fits[basis.name]

    def candidates(self, basis: TauBasis):
        return build_candidates(self.train, self.fits(basis), basis)


def run_replication(job: Tuple[Scenario, BenchmarkSettings, int, int]) -> ReplicationOutcome:
    """Generate, fit and score one replication (0-based index)."""
    scenario, settings, replication, workers = job
    outcome = ReplicationOutcome(replication=replication)
    try:
        data = generate(scenario, replication)
        train, test = data.train, data.test
        grid = tau_grid(train.n)
        cv_grid = thin_grid(grid, settings.weights.thin)
        cache = _CandidateCache(train, settings, workers)
        outcome.candidate_names = tuple(f"M{s + 1}" for s in candidate_indices(train))

        predictors = {}
        for method in settings.methods:
            if method == "qlrm":
                predictors["qlrm"] = fit_qlrm(train, grid, settings.fit, workers)
            elif method == "qrcm":
                predictors["qrcm"] = fit_qrcm_linear(train, settings.primary_basis, settings.fit)
            elif method == "ew":
                predictors["ew"] = equal_weight_model(cache.candidates(settings.primary_basis))
            elif method == "qpl":
                rng = stream(scenario.seed, replication, StreamRole.QPL_CHOICE)
                predictors["qpl"] = single_submodel(cache.candidates(settings.primary_basis), rng=rng)
            elif method == "oracle":
                predictors["oracle"] = data.true_quantile
            else:
                for label, basis in zip(settings.jqplma_labels(), settings.bases):
                    loo = loo_predictions(train, cache.specs, basis, settings.fit, cv_grid,
                                          fits=cache.fits(basis), workers=workers)
                    selected = optimize_weights(loo, settings.weights)
                    outcome.weights[label] = selected.weights.w
                    predictors[label] = AveragedModel(cache.candidates(basis), selected.weights)

        for label in settings.method_names():
            predictor = predictors[label]
            outcome.oaqpe[label] = oaqpe(predictor, test, grid)
            outcome.crossing[label] = crossing_diagnostic(predictor, test, grid)
    except (QPMAError, np.linalg.LinAlgError, ValueError, FloatingPointError) as exc:
        outcome.error = f"{type(exc).__name__}: {exc}"
        logger.warning(f"replication {replication + 1} excluded: {outcome.error}")
    else:
        logger.debug(f"replication {replication + 1}: {outcome.oaqpe}")
    return outcome


def summarize(scenario: Scenario, settings: BenchmarkSettings,
              outcomes: Sequence[ReplicationOutcome]) -> BenchmarkReport:
    """Deterministic reduction of replication outcomes into a report."""
    kept = [o for o in outcomes if o.error is None]
    excluded = [ExcludedReplication(o.replication + 1, o.error) for o in outcomes if o.error is not None]
    if not kept:
        raise NumericalError(f"all {len(outcomes)} replications of '{scenario.name}' failed; "
                             f"first error: {excluded[0].error}")

    names = settings.method_names()
    results = [MethodResult(name, np.array([o.oaqpe[name] for o in kept])) for name in names]
    reference = next((n for n in names if n.startswith(REFERENCE_METHOD)), names[0])
    comparison = comparison_measures(results, reference=reference)

    summaries = []
    for label, basis in zip(settings.jqplma_labels(), settings.bases):
        stacked = np.vstack([o.weights[label] for o in kept])
        values = np.array([o.oaqpe[label] for o in kept])
        ddof = 1 if len(kept) > 1 else 0
        summaries.append(WeightSummary(
            label=label,
            basis=basis.name,
            candidate_names=kept[0].candidate_names,
            mean=stacked.mean(axis=0),
            sd=stacked.std(axis=0, ddof=ddof),
            oaqpe_mean=float(values.mean()),
            oaqpe_sd=float(values.std(ddof=ddof)),
        ))

    crossing = {name: float(np.mean([o.crossing[name] for o in kept])) for name in names}
    for name, rate in crossing.items():
        if rate > 0:
            logger.warning(f"{name}: quantile crossing on {rate:.1%} of test rows on average")

    metadata = ReportMetadata(
        scenario=scenario.to_dict(),
        settings=settings.to_dict(),
        version=__version__,
        grid_size=scenario.n,
        cv_grid_size=thin_grid(tau_grid(scenario.n), settings.weights.thin).size,
    )
    return BenchmarkReport(
        metadata=metadata,
        method_results=results,
        comparison=comparison,
        weight_summaries=summaries,
        crossing_rates=crossing,
        excluded=excluded,
        replications=[o.replication + 1 for o in kept],
        reference=reference,
    )


def run_benchmark(scenario: Scenario, settings: Optional[BenchmarkSettings] = None,
                  out_path: Optional[Path] = None, workers: Optional[int] = None,
                  report_config: Optional[dict] = None) -> BenchmarkReport:
    """Run every replication of ``scenario`` and optionally write the tables to ``out_path``."""
    settings = settings or BenchmarkSettings()
    workers = detect_thread_count() if workers is None else max(1, int(workers))
    logger.info(f"Scenario '{scenario.name}': {scenario.reps} replications, methods {settings.method_names()}")

    # replications go to processes; a single replication may use threads for its LOO fits
    inner = workers if scenario.reps == 1 else 1
    jobs = [(scenario, settings, r, inner) for r in range(scenario.reps)]
    outcomes = parallel_map(run_replication, jobs, workers, processes=True)

    report = summarize(scenario, settings, outcomes)
    if report.excluded:
        logger.warning(f"{len(report.excluded)} of {scenario.reps} replications excluded")
    if out_path is not None:
        dispatcher = ReportDispatcher(discover_writers(), report_config)
        dispatcher.dispatch(report, Path(out_path))
        if dispatcher.failed:
            raise QPMAError(f"report writer(s) failed: {dispatcher.failed}")
    return report


def run_sweep(scenarios: Sequence[Scenario], settings: Optional[BenchmarkSettings] = None,
              out_path: Optional[Path] = None, workers: Optional[int] = None,
              report_config: Optional[dict] = None) -> List[BenchmarkReport]:
    """Benchmark several scenarios, one output subdirectory per scenario name."""
    names = [s.name for s in scenarios]
    if len(set(names)) != len(names):
        raise ConfigError(f"scenario names must be unique, got {names}")
    reports = []
    for scenario in scenarios:
        target = Path(out_path) / scenario.name if out_path is not None else None
        reports.append(run_benchmark(scenario, settings, target, workers, report_config))
    return reports
