"""Operations behind the command-line front end."""

from .config_handler import ConfigHandler, RunConfig
from .data_io import read_covariates, read_dataset, write_dataset, write_predictions
from .model_runner import ModelRunner
from .model_store import FittedModel, load_model, save_model

__all__ = [
    "ConfigHandler",
    "RunConfig",
    "ModelRunner",
    "FittedModel",
    "load_model",
    "save_model",
    "read_covariates",
    "read_dataset",
    "write_dataset",
    "write_predictions",
]
