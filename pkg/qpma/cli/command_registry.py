from __future__ import annotations

import argparse
import sys

from .command_base import Command
from . import commands  # noqa: F401  (registers the commands)


class UsageErrorParser(argparse.ArgumentParser):
    """Argument parser that reports usage errors with exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


class CommandRegistry:
    """Discovers Command subclasses, builds the argparse tree, and resolves
    the target command from parsed args."""

    def __init__(self, logger):
        self.logger = logger

    def build_parser(self) -> argparse.ArgumentParser:
        """Walk every registered Command subclass and build the full
        subcommand parsers from their ``name`` and ``help``."""
        root = UsageErrorParser(
            prog="qpma",
            description="Jackknife quantile partially linear model averaging",
            formatter_class=argparse.RawDescriptionHelpFormatter,
            epilog="""
Examples:
  qpma fit train.csv --response y --out model.yaml
  qpma predict model.yaml new.csv --taus 0.1,0.5,0.9 --out predictions.csv
  qpma weights model.yaml train.csv --thin 4 --out model.yaml
  qpma simulate --preset example1-desk --seed 7 --out results
  qpma benchmark --config sweep.yaml --out results
  qpma version
""",
        )
        root_subparsers = root.add_subparsers(
            dest="command", help="Available commands", required=True
        )

        for cmd_cls in sorted(Command._registry, key=lambda c: c.name):
            sub = root_subparsers.add_parser(cmd_cls.name, help=cmd_cls.help)

            # Let the command define its own arguments
            instance = cmd_cls(self.logger)
            instance.register_args(sub)

            # Stash the instance so resolve() can retrieve it
            sub.set_defaults(_command_instance=instance)

        return root

    @staticmethod
    def resolve(args) -> Command:
        """Return the Command instance that was set by ``set_defaults``."""
        command = getattr(args, "_command_instance", None)
        if command is None:
            raise SystemExit(
                "No command resolved. Run with --help to see available commands."
            )
        return command
