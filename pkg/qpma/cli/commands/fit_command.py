import argparse

from ..argument_mixins import (
    ConfigFileMixin,
    GridMixin,
    ModelSpecMixin,
    OutputMixin,
    VerboseMixin,
    comma_list,
    run_config_from,
)
from ..command_base import Command
from ...operations.data_io import read_dataset
from ...operations.model_runner import ModelRunner
from ...operations.model_store import save_model
from ...utils.environment import detect_thread_count


class FitCommand(Command, ConfigFileMixin, ModelSpecMixin, GridMixin, OutputMixin, VerboseMixin):
    """Fit every candidate sub-model, select jackknife weights and write a model file."""

    name = "fit"
    help = "Fit an averaged quantile model from a CSV file"

    def register_args(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument('data', help='Training CSV with a header row')
        parser.add_argument('--response', '-y', default='y', help='Response column name (default: y)')
        parser.add_argument('--discrete', type=comma_list, default=[], help='Columns to treat as discrete')
        parser.add_argument('--continuous', type=comma_list, default=[], help='Columns to treat as continuous')
        parser.add_argument('--drop', type=comma_list, default=[], help='Columns to ignore')
        self.add_config_arg(parser)
        self.add_model_args(parser)
        self.add_grid_args(parser)
        self.add_out_arg(parser, 'model.yaml', 'Model file to write')
        self.add_verbose_arg(parser)

    def validate_args(self, args) -> bool:
        overlap = set(args.discrete) & set(args.continuous)
        if overlap:
            self.logger.error(f"❌ Columns {sorted(overlap)} are declared both discrete and continuous")
            return False
        return True

    def execute(self, args) -> int:
        try:
            if not self.validate_args(args):
                return 1
            config = run_config_from(args)
            kinds = {c: "discrete" for c in args.discrete}
            kinds.update({c: "continuous" for c in args.continuous})
            data = read_dataset(args.data, args.response, kinds=kinds, drop=args.drop)

            runner = ModelRunner(config, workers=detect_thread_count(), logger=self.logger)
            fitted = runner.fit(data, response=args.response)
            save_model(fitted, args.out)
            self.logger.info(f"✅ Model written to {args.out}")
            return 0
        except Exception as e:
            return self.handle_error(e)
