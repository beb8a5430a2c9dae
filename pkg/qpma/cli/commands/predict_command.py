import argparse

from ..argument_mixins import OutputMixin, VerboseMixin
from ..command_base import Command
from ...operations.data_io import parse_taus, read_covariates, write_predictions
from ...operations.model_runner import ModelRunner
from ...operations.config_handler import RunConfig
from ...operations.model_store import load_model


class PredictCommand(Command, OutputMixin, VerboseMixin):
    """Predict conditional quantiles for every row of a CSV file."""

    name = "predict"
    help = "Predict quantiles from a model file"

    def register_args(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument('model', help='Model file written by "qpma fit"')
        parser.add_argument('data', help='CSV with the model\'s covariate columns')
        parser.add_argument('--taus', '-t', required=True, help='Comma-separated quantile levels in (0, 1)')
        self.add_out_arg(parser, 'predictions.csv', 'Predictions CSV to write')
        self.add_verbose_arg(parser)

    def validate_args(self, args) -> bool:
        return True

    def execute(self, args) -> int:
        try:
            taus = parse_taus(args.taus)
            fitted = load_model(args.model)
            x = read_covariates(args.data, fitted.column_names, response=fitted.response)
            predictions = ModelRunner(RunConfig(), logger=self.logger).predict(fitted, x, taus)
            write_predictions(predictions, taus, args.out)
            self.logger.info(f"✅ {predictions.shape[0]} rows x {taus.size} quantiles written to {args.out}")
            return 0
        except Exception as e:
            return self.handle_error(e)
