"""Data transfer objects for benchmark reports."""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from ..core.evaluation import ComparisonRow, MethodResult


@dataclass(frozen=True)
class ReportMetadata:
    """Effective configuration of one benchmark run."""
    scenario: Dict[str, Any]
    settings: Dict[str, Any]
    version: str
    grid_size: int
    cv_grid_size: int

    def header_items(self) -> List[Tuple[str, Any]]:
        items: List[Tuple[str, Any]] = [("qpma_version", self.version)]
        items += [(f"scenario.{k}", v) for k, v in self.scenario.items()]
        items += _flatten("settings", self.settings)
        items += [("tau_grid_size", self.grid_size), ("cv_grid_size", self.cv_grid_size)]
        return items


@dataclass
class WeightSummary:
    """Mean and SD of the selected weights across replications (one tau basis)."""
    label: str
    basis: str
    candidate_names: Tuple[str, ...]
    mean: np.ndarray
    sd: np.ndarray
    oaqpe_mean: float
    oaqpe_sd: float


@dataclass
class ExcludedReplication:
    replication: int  # 1-based
    error: str


@dataclass
class BenchmarkReport:
    """Complete result of one scenario, handed to every writer."""
    metadata: ReportMetadata
    method_results: List[MethodResult] = field(default_factory=list)
    comparison: List[ComparisonRow] = field(default_factory=list)
    weight_summaries: List[WeightSummary] = field(default_factory=list)
    crossing_rates: Dict[str, float] = field(default_factory=dict)
    excluded: List[ExcludedReplication] = field(default_factory=list)
    replications: List[int] = field(default_factory=list)
    reference: Optional[str] = None

    @property
    def name(self) -> str:
        return str(self.metadata.scenario.get("name", "benchmark"))

    def comparison_row(self, method: str) -> ComparisonRow:
        for row in self.comparison:
            if row.method == method:
                return row
        raise KeyError(method)


def _flatten(prefix: str, value: Any) -> List[Tuple[str, Any]]:
    if isinstance(value, dict):
        items: List[Tuple[str, Any]] = []
        for key, inner in value.items():
            items += _flatten(f"{prefix}.{key}", inner)
        return items
    if isinstance(value, (list, tuple)):
        return [(prefix, ",".join(str(v) for v in value))]
    return [(prefix, value)]
