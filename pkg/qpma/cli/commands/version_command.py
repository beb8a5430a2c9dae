import argparse
from pathlib import Path

from ..command_base import Command
from ... import __version__

DEPENDENCIES = ("numpy", "scipy", "pandas", "yaml")


class VersionCommand(Command):
    """Command for displaying version information."""

    name = "version"
    help = "Show version information"

    def register_args(self, parser: argparse.ArgumentParser) -> None:
        pass  # No arguments for version command

    def validate_args(self, args) -> bool:
        return True  # No validation needed for version command

    def execute(self, args) -> int:
        try:
            self.version_command()
            return 0
        except Exception as e:
            return self.handle_error(e)

    def version_command(self):
        """Show version information"""
        self.logger.info(f"qpma v{__version__}")
        self.logger.info(f"Location: {Path(__file__).parent.parent.parent}")
        self.logger.info("Dependencies:")
        for module_name in DEPENDENCIES:
            try:
                module = __import__(module_name)
                self.logger.info(f"  • {module_name}: {getattr(module, '__version__', 'unknown')}")
            except ImportError:
                self.logger.info(f"  • {module_name}: not installed")
