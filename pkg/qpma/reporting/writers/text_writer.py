"""Aligned plain-text tables for reading in a terminal."""

from pathlib import Path
from typing import List

import pandas as pd

from ..report import BenchmarkReport
from ..tables import comparison_frame, excluded_frame, header_lines, weights_frame
from ..writer_base import ReportWriter

RULE = "=" * 72


def _format(value) -> str:
    if isinstance(value, float):
        return "-" if pd.isna(value) else f"{value:.4f}"
    return str(value)


def render_table(frame: pd.DataFrame) -> str:
    return frame.to_string(index=False, formatters={c: _format for c in frame.columns}, na_rep="-")


def render_report(report: BenchmarkReport) -> str:
    blocks = ["\n".join(header_lines(report, comment=""))]

    if report.weight_summaries:
        blocks.append(f"{RULE}\nSelected weights across replications (mean / sd) and OAQPE\n{RULE}")
        blocks.append(render_table(weights_frame(report)))

    comparison = comparison_frame(report)
    for column in ("winning_ratio", "loss_to_reference", "crossing_rate"):
        comparison[column] = comparison[column] * 100.0
    comparison = comparison.rename(columns={
        "winning_ratio": "winning_ratio_%",
        "loss_to_reference": f"loss_to_{report.reference or 'reference'}_%",
        "crossing_rate": "crossing_%",
    })
    blocks.append(f"{RULE}\nAverage OAQPE, winning ratio and loss to the reference method\n{RULE}")
    blocks.append(render_table(comparison))

    if report.excluded:
        blocks.append(f"{RULE}\nExcluded replications\n{RULE}")
        blocks.append(render_table(excluded_frame(report)))
    return "\n\n".join(blocks) + "\n"


class TextWriter(ReportWriter):
    """tables.txt with the config header followed by the weight and comparison tables."""

    def name(self) -> str:
        return "text"

    def is_enabled(self, config: dict) -> bool:
        return self.enabled_by_list(self.name(), config)

    def publish(self, report: BenchmarkReport, out_dir: Path) -> List[Path]:
        path = out_dir / "tables.txt"
        path.write_text(render_report(report), encoding="utf-8")
        return [path]
