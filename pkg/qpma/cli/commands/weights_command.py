import argparse

from ..argument_mixins import ConfigFileMixin, GridMixin, OutputMixin, VerboseMixin, run_config_from
from ..command_base import Command
from ...operations.data_io import read_dataset
from ...operations.model_runner import ModelRunner
from ...operations.model_store import load_model, save_model
from ...utils.environment import detect_thread_count


class WeightsCommand(Command, ConfigFileMixin, GridMixin, OutputMixin, VerboseMixin):
    """Re-run leave-one-out weight selection for an already fitted model."""

    name = "weights"
    help = "Estimate jackknife weights for a pre-fit model"

    def register_args(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument('model', help='Model file written by "qpma fit"')
        parser.add_argument('data', help='The training CSV the model was fitted on')
        self.add_config_arg(parser)
        self.add_grid_args(parser)
        self.add_out_arg(parser, None, 'Model file to write (default: overwrite MODEL)')
        self.add_verbose_arg(parser)

    def validate_args(self, args) -> bool:
        return True

    def execute(self, args) -> int:
        try:
            fitted = load_model(args.model)
            config = run_config_from(args)
            kinds = {n: k.value for n, k in zip(fitted.column_names, fitted.column_kinds)}
            data = read_dataset(args.data, fitted.response, kinds=kinds)

            runner = ModelRunner(config, workers=detect_thread_count(), logger=self.logger)
            updated = runner.estimate_weights(fitted, data)
            target = args.out or args.model
            save_model(updated, target)
            self.logger.info(f"✅ Weights written to {target}")
            return 0
        except Exception as e:
            return self.handle_error(e)
