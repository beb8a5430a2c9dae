import argparse
from pathlib import Path

from ..argument_mixins import (
    ConfigFileMixin,
    GridMixin,
    ModelSpecMixin,
    OutputMixin,
    SimulationMixin,
    VerboseMixin,
    comma_list,
    run_config_from,
)
from ..command_base import Command
from ...core.tau_basis import TauBasis
from ...simulation.benchmark import run_sweep
from ...utils.environment import detect_thread_count


class BenchmarkCommand(Command, ConfigFileMixin, SimulationMixin, ModelSpecMixin, GridMixin,
                       OutputMixin, VerboseMixin):
    """Run every scenario of a sweep, one output directory per scenario."""

    name = "benchmark"
    help = "Run a multi-scenario benchmark sweep"

    def register_args(self, parser: argparse.ArgumentParser) -> None:
        self.add_config_arg(parser)
        self.add_simulation_args(parser)
        self.add_model_args(parser)
        parser.add_argument('--bases', type=comma_list,
                            help='Fit jqplma once per tau basis, e.g. gaussian,cubic-poly,mixed')
        self.add_grid_args(parser)
        self.add_out_arg(parser, 'results', 'Output directory; each scenario gets a subdirectory')
        self.add_verbose_arg(parser)

    def validate_args(self, args) -> bool:
        if args.bases and args.basis:
            self.logger.error("❌ Use either --basis or --bases, not both")
            return False
        return True

    def execute(self, args) -> int:
        try:
            if not self.validate_args(args):
                return 1
            config = run_config_from(args)
            if args.bases:
                config.bases = tuple(TauBasis.from_name(b) for b in args.bases)
                config.basis = config.bases[0]
            reports = run_sweep(config.scenarios, config.benchmark_settings(), Path(args.out),
                                workers=detect_thread_count(), report_config=config.report)
            excluded = sum(len(r.excluded) for r in reports)
            self.logger.info(f"✅ {len(reports)} scenario(s) written under {args.out}"
                             + (f" ({excluded} replication(s) excluded)" if excluded else ""))
            return 0
        except Exception as e:
            return self.handle_error(e)
