#!/usr/bin/env python3
"""
Main entry point for the ceprecode command line.
"""

import logging
import sys
from typing import List, Optional

from . import config
from .controllers.cli_controller import CLIController, parse_args


def setup_logging(level: str = config.LOG_LEVEL, log_file: Optional[str] = None) -> None:
    """Set up logging to stdout and, optionally, a log file."""
    handlers = [logging.StreamHandler(sys.stdout)]
    if log_file:
        handlers.append(logging.FileHandler(log_file))
    logging.basicConfig(level=level, format=config.LOG_FORMAT, handlers=handlers, force=True)


def main(argv: Optional[List[str]] = None) -> int:
    """
    Parses the command line, configures logging and runs the command.

    Returns:
        int: Process exit code (0 success, 1 config, 2 I/O, 3 numerical)
    """
    args = parse_args(argv)
    setup_logging("WARNING" if args.quiet else config.LOG_LEVEL)
    logger = logging.getLogger(__name__)
    logger.debug(f"Running command '{args.command}'")

    return CLIController().dispatch(args)


if __name__ == "__main__":
    sys.exit(main())
