import logging

from rich.console import Console
from rich.logging import RichHandler

LOG_FORMAT = "%(message)s"

stderr_console = Console(stderr=True)


def setup_logging(level: str = "WARNING") -> None:
    """Route the ``edgeforge`` logger tree to a single rich handler on stderr."""
    numeric_level = logging.getLevelName(level.upper())
    if not isinstance(numeric_level, int):
        raise ValueError(f"Unknown log level '{level.upper()}'")

    logger = logging.getLogger("edgeforge")
    logger.setLevel(numeric_level)
    for handler in list(logger.handlers):
        if isinstance(handler, RichHandler):
            logger.removeHandler(handler)

    handler = RichHandler(
        console=stderr_console, show_path=False, rich_tracebacks=False
    )
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    logger.addHandler(handler)
