"""
Tabular views of a benchmark report.

Column lists are declared once here and shared by every writer, so the CSV
files and the aligned text tables always agree.
"""

from typing import List

import numpy as np
import pandas as pd

from .report import BenchmarkReport

COMPARISON_COLUMNS = [
    "method", "average_oaqpe", "sd_oaqpe", "winning_ratio", "loss_to_reference", "crossing_rate",
]
WEIGHT_COLUMNS_PREFIX = ["basis", "statistic"]
EXCLUDED_COLUMNS = ["replication", "error"]

FLOAT_FORMAT = "%.6f"


def comparison_frame(report: BenchmarkReport) -> pd.DataFrame:
    """Average OAQPE, winning ratio and loss-to-reference, one row per method."""
    rows = [
        {
            "method": row.method,
            "average_oaqpe": row.average_oaqpe,
            "sd_oaqpe": row.sd_oaqpe,
            "winning_ratio": row.winning_ratio,
            "loss_to_reference": np.nan if row.loss_to_reference is None else row.loss_to_reference,
            "crossing_rate": report.crossing_rates.get(row.method, np.nan),
        }
        for row in report.comparison
    ]
    return pd.DataFrame(rows, columns=COMPARISON_COLUMNS)


def weights_frame(report: BenchmarkReport) -> pd.DataFrame:
    """Mean and SD of each candidate's weight plus the OAQPE of the averaged model."""
    frames: List[pd.DataFrame] = []
    for summary in report.weight_summaries:
        names = list(summary.candidate_names)
        frame = pd.DataFrame(
            [summary.mean, summary.sd], columns=names,
        )
        frame.insert(0, "statistic", ["mean", "sd"])
        frame.insert(0, "basis", summary.basis)
        frame["oaqpe"] = [summary.oaqpe_mean, summary.oaqpe_sd]
        frames.append(frame)
    if not frames:
        return pd.DataFrame(columns=WEIGHT_COLUMNS_PREFIX + ["oaqpe"])
    return pd.concat(frames, ignore_index=True)


def replications_frame(report: BenchmarkReport) -> pd.DataFrame:
    """OAQPE of every method in every kept replication."""
    frame = pd.DataFrame({r.method_name: r.oaqpe_by_rep for r in report.method_results})
    frame.insert(0, "replication", report.replications)
    return frame


def excluded_frame(report: BenchmarkReport) -> pd.DataFrame:
    return pd.DataFrame(
        [{"replication": e.replication, "error": e.error} for e in report.excluded],
        columns=EXCLUDED_COLUMNS,
    )


def header_lines(report: BenchmarkReport, comment: str = "# ") -> List[str]:
    lines = [f"{comment}{key}: {value}" for key, value in report.metadata.header_items()]
    lines.append(f"{comment}replications_kept: {len(report.replications)}")
    lines.append(f"{comment}replications_excluded: {len(report.excluded)}")
    if report.reference:
        lines.append(f"{comment}reference_method: {report.reference}")
    return lines
