"""CSV writer: one comma-separated file per table, each opened by a commented config header."""

import logging
from pathlib import Path
from typing import List

import pandas as pd

from ..report import BenchmarkReport
from ..tables import (
    FLOAT_FORMAT,
    comparison_frame,
    excluded_frame,
    header_lines,
    replications_frame,
    weights_frame,
)
from ..writer_base import ReportWriter

logger = logging.getLogger(__name__)


def write_csv(frame: pd.DataFrame, path: Path, header: List[str]) -> Path:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        for line in header:
            handle.write(line + "\n")
        frame.to_csv(handle, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return path


class CsvWriter(ReportWriter):
    """comparison.csv, weights.csv, replications.csv and, when needed, excluded.csv."""

    def name(self) -> str:
        return "csv"

    def is_enabled(self, config: dict) -> bool:
        return self.enabled_by_list(self.name(), config)

    def publish(self, report: BenchmarkReport, out_dir: Path) -> List[Path]:
        header = header_lines(report)
        paths = [
            write_csv(comparison_frame(report), out_dir / "comparison.csv", header),
            write_csv(replications_frame(report), out_dir / "replications.csv", header),
        ]
        if report.weight_summaries:
            paths.append(write_csv(weights_frame(report), out_dir / "weights.csv", header))
        if report.excluded:
            paths.append(write_csv(excluded_frame(report), out_dir / "excluded.csv", header))
        logger.debug(f"csv tables for '{report.name}' written to {out_dir}")
        return paths
