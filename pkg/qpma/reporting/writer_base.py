"""Abstract base class for report writers."""

from abc import ABC, abstractmethod
from pathlib import Path
from typing import List

from .report import BenchmarkReport


class ReportWriter(ABC):
    """Interface that every output format must implement."""

    @abstractmethod
    def name(self) -> str:
        """Unique writer name used in the ``report.writers`` config list (e.g. 'csv', 'text')."""
        ...

    @abstractmethod
    def is_enabled(self, config: dict) -> bool:
        """Return True if this writer should run for the given report config."""
        ...

    @abstractmethod
    def publish(self, report: BenchmarkReport, out_dir: Path) -> List[Path]:
        """Write the report under ``out_dir`` and return the files written."""
        ...

    @staticmethod
    def enabled_by_list(name: str, config: dict) -> bool:
        selected = (config or {}).get("writers")
        return not selected or name in selected
