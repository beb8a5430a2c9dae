"""
CSV input and output.

Files are comma separated with a header row and '.' as decimal point. Column
kinds are inferred (at most ``DISCRETE_MAX_LEVELS`` distinct integer values
means discrete) unless declared, and continuous columns are moved in front of
discrete ones, keeping their relative order.
"""

import logging
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from ..core.candidate_models import ColumnKind, Dataset
from ..core.tau_basis import check_tau
from ..errors import DataError

logger = logging.getLogger(__name__)

DISCRETE_MAX_LEVELS = 10
PREDICTION_FORMAT = "%.17g"


def read_frame(path: str) -> pd.DataFrame:
    try:
        frame = pd.read_csv(path, sep=",", decimal=".", float_precision="round_trip")
    except FileNotFoundError:
        raise DataError(f"cannot read CSV '{path}': file not found") from None
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise DataError(f"cannot read CSV '{path}': {e}") from None
    frame.columns = [str(c).strip() for c in frame.columns]
    if frame.columns.duplicated().any():
        dupes = sorted(set(frame.columns[frame.columns.duplicated()]))
        raise DataError(f"duplicate column names in '{path}': {dupes}")
    return frame


def _numeric(frame: pd.DataFrame, columns: Sequence[str], path: str) -> np.ndarray:
    bad = [c for c in columns if not pd.api.types.is_numeric_dtype(frame[c])]
    if bad:
        raise DataError(f"non-numeric column(s) {bad} in '{path}'")
    values = frame[list(columns)].to_numpy(dtype=float)
    if not np.all(np.isfinite(values)):
        missing = [c for c in columns if not np.all(np.isfinite(frame[c].to_numpy(dtype=float)))]
        raise DataError(f"missing or non-finite values in column(s) {missing} of '{path}'")
    return values


def infer_kind(values: np.ndarray) -> ColumnKind:
    """Discrete when every value is an integer and there are few distinct levels."""
    integral = np.all(np.equal(np.mod(values, 1), 0))
    if integral and np.unique(values).size <= DISCRETE_MAX_LEVELS:
        return ColumnKind.DISCRETE
    return ColumnKind.CONTINUOUS


def read_dataset(path: str, response: str, kinds: Optional[Dict[str, str]] = None,
                 drop: Sequence[str] = ()) -> Dataset:
    """Load a training CSV.

    ``kinds`` maps column names to ``continuous`` or ``discrete`` and overrides
    inference. Columns listed in ``drop`` are ignored.
    """
    frame = read_frame(path)
    if response not in frame.columns:
        raise DataError(f"response column '{response}' not found in '{path}'; columns are {list(frame.columns)}")
    kinds = dict(kinds or {})
    unknown = sorted((set(kinds) | set(drop)) - set(frame.columns))
    if unknown:
        raise DataError(f"column(s) {unknown} named in options are not in '{path}'")

    covariates = [c for c in frame.columns if c != response and c not in drop]
    if not covariates:
        raise DataError(f"'{path}' has no covariate columns besides '{response}'")
    x = _numeric(frame, covariates, path)
    y = _numeric(frame, [response], path)[:, 0]

    resolved: List[ColumnKind] = []
    for j, name in enumerate(covariates):
        if name in kinds:
            try:
                resolved.append(ColumnKind(str(kinds[name]).lower()))
            except ValueError:
                raise DataError(f"column kind for '{name}' must be continuous or discrete") from None
        else:
            resolved.append(infer_kind(x[:, j]))

    order = [j for j, k in enumerate(resolved) if k is ColumnKind.CONTINUOUS]
    order += [j for j, k in enumerate(resolved) if k is ColumnKind.DISCRETE]
    if not any(k is ColumnKind.CONTINUOUS for k in resolved):
        raise DataError("all covariates are discrete (p = 0); at least one continuous covariate is required")

    names = tuple(covariates[j] for j in order)
    logger.info(f"Read {frame.shape[0]} rows from {path}: response '{response}', "
                f"continuous {[n for n, k in zip(covariates, resolved) if k is ColumnKind.CONTINUOUS]}, "
                f"discrete {[n for n, k in zip(covariates, resolved) if k is ColumnKind.DISCRETE]}")
    return Dataset(y=y, x=x[:, order], column_kind=tuple(resolved[j] for j in order), column_names=names)


def read_covariates(path: str, column_names: Sequence[str], response: Optional[str] = None) -> np.ndarray:
    """Covariate matrix in the model's column order, matched by name.

    A column named like the model's response is ignored.
    """
    frame = read_frame(path)
    present = [c for c in frame.columns if c != response]
    missing = [c for c in column_names if c not in present]
    extra = [c for c in present if c not in column_names]
    if missing or extra:
        raise DataError(f"columns of '{path}' do not match the model: missing {missing}, extra {extra}")
    return _numeric(frame, list(column_names), path)


def dataset_frame(data: Dataset, response: str = "y") -> pd.DataFrame:
    frame = pd.DataFrame(data.x, columns=list(data.column_names))
    frame.insert(0, response, data.y)
    return frame


def write_dataset(data: Dataset, path: Path, response: str = "y") -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    dataset_frame(data, response).to_csv(path, index=False, float_format=PREDICTION_FORMAT, lineterminator="\n")
    return path


def parse_taus(text) -> np.ndarray:
    """Sorted distinct quantile levels from ``"0.25,0.5"`` or a sequence."""
    if isinstance(text, str):
        parts = [p for p in text.replace(" ", "").split(",") if p]
        try:
            values = [float(p) for p in parts]
        except ValueError:
            raise DataError(f"cannot parse quantile levels '{text}'") from None
    else:
        values = [float(v) for v in text]
    if not values:
        raise DataError("at least one quantile level is required")
    return np.unique(check_tau(np.asarray(values)))


def tau_label(tau: float) -> str:
    return f"tau={float(tau)!r}"


def write_predictions(predictions: np.ndarray, taus: Sequence[float], path: Path) -> Path:
    """One row per input row, one column per tau in increasing order."""
    frame = pd.DataFrame(np.asarray(predictions, dtype=float), columns=[tau_label(t) for t in taus])
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=PREDICTION_FORMAT, lineterminator="\n")
    return path
