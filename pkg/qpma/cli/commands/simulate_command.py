import argparse
from pathlib import Path

from ..argument_mixins import (
    ConfigFileMixin,
    GridMixin,
    ModelSpecMixin,
    OutputMixin,
    SimulationMixin,
    VerboseMixin,
    run_config_from,
)
from ..command_base import Command
from ...errors import ConfigError
from ...operations.data_io import write_dataset
from ...simulation.benchmark import run_benchmark
from ...simulation.scenarios import generate
from ...utils.environment import detect_thread_count


class SimulateCommand(Command, ConfigFileMixin, SimulationMixin, ModelSpecMixin, GridMixin,
                      OutputMixin, VerboseMixin):
    """Run one simulation scenario and write its comparison tables."""

    name = "simulate"
    help = "Run the replications of one simulation scenario"

    def register_args(self, parser: argparse.ArgumentParser) -> None:
        self.add_config_arg(parser)
        self.add_simulation_args(parser)
        self.add_model_args(parser)
        self.add_grid_args(parser)
        self.add_out_arg(parser, 'results', 'Output directory for the tables')
        parser.add_argument('--data-out', dest='data_out',
                            help='Also write the first replication\'s train.csv and test.csv here')
        self.add_verbose_arg(parser)

    def validate_args(self, args) -> bool:
        return True

    def execute(self, args) -> int:
        try:
            config = run_config_from(args)
            if len(config.scenarios) != 1:
                raise ConfigError(f"simulate runs one scenario, the configuration has {len(config.scenarios)}; "
                                  "use 'qpma benchmark' for sweeps")
            scenario = config.scenarios[0]
            if args.data_out:
                data = generate(scenario, 0)
                write_dataset(data.train, Path(args.data_out) / "train.csv")
                write_dataset(data.test, Path(args.data_out) / "test.csv")

            report = run_benchmark(scenario, config.benchmark_settings(), Path(args.out),
                                   workers=detect_thread_count(), report_config=config.report)
            for row in report.comparison:
                self.logger.info(f"  {row.method:<20} average OAQPE {row.average_oaqpe:.4f}  "
                                 f"winning ratio {row.winning_ratio:.1%}")
            self.logger.info(f"✅ Tables for '{scenario.name}' written to {args.out}")
            return 0
        except Exception as e:
            return self.handle_error(e)
