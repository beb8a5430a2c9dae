import argparse
from dataclasses import replace
from typing import Any, Dict, List, Optional

from ..operations.config_handler import ConfigHandler, RunConfig


def comma_list(text: str) -> List[str]:
    return [part.strip() for part in text.split(",") if part.strip()]


class ConfigFileMixin:
    """Adds --config / -c."""

    @staticmethod
    def add_config_arg(parser: argparse.ArgumentParser):
        parser.add_argument('--config', '-c', help='YAML run configuration (CLI flags override its values)')


class ModelSpecMixin:
    """Adds --basis, --spline-order, --knots."""

    @staticmethod
    def add_model_args(parser: argparse.ArgumentParser):
        parser.add_argument('--basis', help='Tau basis: gaussian (default), cubic-poly, mixed or custom:one,tau,...')
        parser.add_argument('--spline-order', dest='spline_order', type=int,
                            help='B-spline order, degree + 1 (default: 2)')
        parser.add_argument('--knots', type=int, help='Interior knots per spline (default: floor(n^0.2))')


class GridMixin:
    """Adds --tau-grid, --thin."""

    @staticmethod
    def add_grid_args(parser: argparse.ArgumentParser):
        parser.add_argument('--tau-grid', dest='tau_grid', type=int,
                            help='Size of the tau grid k/(m+1) used for fitting (default: n)')
        parser.add_argument('--thin', type=int, help='Keep every k-th tau of the cross-validation grid (default: 1)')


class SimulationMixin:
    """Adds --preset, --seed, --reps, --n, --methods, --writers."""

    @staticmethod
    def add_simulation_args(parser: argparse.ArgumentParser):
        parser.add_argument('--preset', help='Built-in scenario preset (e.g. example1-desk, example2-desk)')
        parser.add_argument('--seed', type=int, help='Master seed for every replication')
        parser.add_argument('--reps', type=int, help='Number of replications R')
        parser.add_argument('--n', type=int, help='Training sample size')
        parser.add_argument('--methods', type=comma_list,
                            help='Comma-separated methods from qlrm,qrcm,ew,qpl,jqplma,oracle')
        parser.add_argument('--writers', type=comma_list, help='Output writers to run (default: csv,text)')


class OutputMixin:
    """Adds --out / -o."""

    @staticmethod
    def add_out_arg(parser: argparse.ArgumentParser, default: Optional[str], what: str):
        parser.add_argument('--out', '-o', default=default, help=f'{what} (default: {default})')


class VerboseMixin:
    """Adds --verbose / -v."""

    @staticmethod
    def add_verbose_arg(parser: argparse.ArgumentParser):
        parser.add_argument('--verbose', '-v', action='store_true', help='Enable verbose output')


def overrides_from(args) -> Dict[str, Any]:
    """CLI values that take precedence over the configuration file."""
    keys = ('basis', 'spline_order', 'knots', 'thin', 'seed', 'reps', 'n', 'methods', 'preset', 'writers')
    return {key: getattr(args, key, None) for key in keys}


def run_config_from(args) -> RunConfig:
    config = ConfigHandler(getattr(args, 'config', None)).build(overrides_from(args))
    tau_grid = getattr(args, 'tau_grid', None)
    if tau_grid is not None:
        config.fit = replace(config.fit, grid_size=tau_grid)
    return config
