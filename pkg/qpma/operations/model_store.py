"""
Versioned model files.

A model file is YAML holding everything needed to predict without the
training data: column names, kinds and order, every candidate's spline knots
and coefficient matrix, the tau basis, the weights and the fit diagnostics.
Floats are written in shortest round-trip form, so loading a file gives back
bit-identical numbers.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Tuple

import numpy as np
import yaml

from .. import __version__
from ..core.candidate_models import CandidateModel, ColumnKind
from ..core.jackknife_averaging import AveragedModel, WeightVector
from ..core.tau_basis import TauBasis
from ..errors import ConfigError, DataError

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1
REQUIRED_KEYS = ("format_version", "response", "columns", "tau_basis", "candidates", "weights")


@dataclass
class FittedModel:
    """An averaged model plus the metadata stored alongside it."""

    model: AveragedModel
    response: str
    column_kinds: Tuple[ColumnKind, ...]
    diagnostics: Dict[str, Any] = field(default_factory=dict)
    config: Dict[str, Any] = field(default_factory=dict)

    @property
    def column_names(self) -> Tuple[str, ...]:
        return self.model.column_names

    @property
    def candidates(self) -> List[CandidateModel]:
        return self.model.candidates

    def candidate_smoothing(self) -> Dict[int, float]:
        """Final smoothing scale of each candidate's full-sample fit, by covariate index."""
        return {int(c["s"]): float(c["smoothing"]) for c in self.diagnostics.get("candidates", [])
                if c.get("smoothing") is not None}


def _plain(value: Any) -> Any:
    """Convert numpy scalars and arrays to built-in types for the YAML dumper."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return _plain(value.tolist())
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    return value


def model_document(fitted: FittedModel) -> Dict[str, Any]:
    model = fitted.model
    return _plain({
        "format_version": FORMAT_VERSION,
        "qpma_version": __version__,
        "response": fitted.response,
        "columns": [{"name": n, "kind": k.value} for n, k in zip(fitted.column_names, fitted.column_kinds)],
        "tau_basis": model.tau_basis.name,
        "candidates": [c.to_dict() for c in model.candidates],
        "weights": model.weights.w,
        "diagnostics": fitted.diagnostics,
        "config": fitted.config,
    })


def save_model(fitted: FittedModel, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        yaml.safe_dump(model_document(fitted), f, sort_keys=False, default_flow_style=None, width=120)
    logger.info(f"Model with {len(fitted.candidates)} candidates written to {path}")
    return path


def load_model(path: Path) -> FittedModel:
    try:
        with open(path, "r", encoding="utf-8") as f:
            doc = yaml.safe_load(f)
    except FileNotFoundError:
        raise DataError(f"model file not found: {path}") from None
    except yaml.YAMLError as e:
        raise DataError(f"model file {path} is not valid YAML: {e}") from None
    if not isinstance(doc, dict):
        raise DataError(f"model file {path} must contain a mapping")
    missing = [k for k in REQUIRED_KEYS if k not in doc]
    if missing:
        raise DataError(f"model file {path} is missing {missing}")
    if doc["format_version"] != FORMAT_VERSION:
        raise DataError(f"model file {path} has format version {doc['format_version']}, "
                        f"this release reads version {FORMAT_VERSION}")

    try:
        basis = TauBasis.from_name(doc["tau_basis"])
    except ConfigError as e:
        raise DataError(f"model file {path}: {e}") from None
    names = tuple(str(c["name"]) for c in doc["columns"])
    kinds = tuple(ColumnKind(c["kind"]) for c in doc["columns"])
    try:
        candidates = [CandidateModel.from_dict(c, basis, names) for c in doc["candidates"]]
        weights = WeightVector(np.asarray(doc["weights"], dtype=float))
        model = AveragedModel(candidates=candidates, weights=weights, column_names=names)
    except (KeyError, TypeError, ValueError) as e:
        raise DataError(f"model file {path} is malformed: {e}") from None
    return FittedModel(
        model=model,
        response=str(doc["response"]),
        column_kinds=kinds,
        diagnostics=doc.get("diagnostics") or {},
        config=doc.get("config") or {},
    )
