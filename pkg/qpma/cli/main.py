import sys
from typing import Optional, Sequence

from .command_registry import CommandRegistry
from ..utils.logger import QPMALogger, get_logger


def main(argv: Optional[Sequence[str]] = None):
    """Main CLI entry point for console script."""
    logger = get_logger('CLI')

    registry = CommandRegistry(logger)
    parser = registry.build_parser()
    args = parser.parse_args(argv)
    QPMALogger.set_verbose(getattr(args, 'verbose', False))

    # Resolve and execute, no if/else routing
    command = registry.resolve(args)
    exit_code = command.execute(args)

    if exit_code != 0:
        sys.exit(exit_code)


if __name__ == "__main__":
    main()
