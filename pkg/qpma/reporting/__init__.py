"""Reporting package: pluggable writers for benchmark result tables."""

from .writer_base import ReportWriter
from .dispatcher import ReportDispatcher
from .report import BenchmarkReport, ExcludedReplication, ReportMetadata, WeightSummary


def discover_writers():
    """Return all available writer instances.

    To add a new output format, import it here and append to the list.
    """
    from .writers import CsvWriter, TextWriter
    return [CsvWriter(), TextWriter()]


__all__ = [
    "ReportWriter",
    "ReportDispatcher",
    "BenchmarkReport",
    "ExcludedReplication",
    "ReportMetadata",
    "WeightSummary",
    "discover_writers",
]
