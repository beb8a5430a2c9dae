"""Report dispatcher: fans a finished benchmark report out to the enabled writers."""

import logging
from pathlib import Path
from typing import List, Optional

from .report import BenchmarkReport
from .writer_base import ReportWriter

logger = logging.getLogger(__name__)


class ReportDispatcher:
    """Runs every enabled writer; one writer failing does not stop the others."""

    def __init__(self, writers: List[ReportWriter], config: Optional[dict] = None):
        config = config or {}
        self._writers = [w for w in writers if w.is_enabled(config)]
        self._config = config
        self.failed: List[str] = []

    @property
    def writer_names(self) -> List[str]:
        return [w.name() for w in self._writers]

    def dispatch(self, report: BenchmarkReport, out_dir: Path) -> List[Path]:
        if not self._writers:
            logger.info("No report writers enabled, skipping output")
            return []

        logger.info(f"Enabled writers: {self.writer_names}")
        if report.excluded:
            logger.warning(f"{len(report.excluded)} replication(s) excluded from '{report.name}'")

        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        written: List[Path] = []
        self.failed = []
        for writer in self._writers:
            try:
                paths = writer.publish(report, out_dir)
                written.extend(paths)
                logger.info(f"Writer '{writer.name()}' wrote {[p.name for p in paths]}")
            except Exception:
                logger.error(f"Writer '{writer.name()}' failed, output NOT written", exc_info=True)
                self.failed.append(writer.name())

        if not self.failed:
            logger.info(f"All writers completed for '{report.name}'")
        return written
