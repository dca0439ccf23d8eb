"""Logging helpers shared by the command-line tools."""

import logging
import sys
from typing import Optional

FORMAT = '%(asctime)s - %(levelname)s - %(message)s'


def setup_logger(name: str = "meslab", log_file: Optional[str] = None, verbose: bool = False) -> logging.Logger:
    """Configure the package logger.

    The console handler writes to stderr (stdout carries reports) and stays at
    WARNING unless verbose is set. A file handler, when requested, keeps INFO
    and above.
    """
    logger = logging.getLogger(name)
    logger.setLevel(logging.DEBUG if verbose else logging.INFO)
    formatter = logging.Formatter(FORMAT)

    # Re-running main() in one process must not stack handlers
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        handler.close()

    stream_handler = logging.StreamHandler(sys.stderr)
    stream_handler.setLevel(logging.INFO if verbose else logging.WARNING)
    stream_handler.setFormatter(formatter)
    logger.addHandler(stream_handler)

    if log_file:
        file_handler = logging.FileHandler(log_file)
        file_handler.setLevel(logging.INFO)
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)

    logger.propagate = False
    return logger


def log_error(logger: logging.Logger, error: BaseException, context: str) -> None:
    """Log an error with the step it happened in."""
    logger.error(f"Error {context}: {error}")
    logger.debug("Traceback:", exc_info=error)
