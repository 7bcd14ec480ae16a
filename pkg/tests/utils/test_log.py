import logging

import pytest
from rich.logging import RichHandler

from edgeforge.utils.log import setup_logging


def _rich_handlers():
    return [
        handler
        for handler in logging.getLogger("edgeforge").handlers
        if isinstance(handler, RichHandler)
    ]


def test_setup_logging_sets_level_and_single_handler():
    setup_logging("debug")
    setup_logging("INFO")

    assert logging.getLogger("edgeforge").level == logging.INFO
    assert len(_rich_handlers()) == 1


def test_setup_logging_rejects_unknown_level():
    with pytest.raises(ValueError, match="Unknown log level 'LOUD'"):
        setup_logging("loud")
