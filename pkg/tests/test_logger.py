import logging

import pytest

from utils.logger import configure_basic_logging, get_logger


@pytest.fixture
def foreign_logger():
    """带有自己 handler 的外部 logger."""
    logger = logging.getLogger("thirdparty.component")
    handler = logging.NullHandler()
    logger.addHandler(handler)
    logger.setLevel(logging.WARNING)
    yield logger
    logger.removeHandler(handler)
    logger.setLevel(logging.NOTSET)


def test_basic_logging_only_resyncs_own_loggers(foreign_logger):
    own = get_logger("shallow_scaling.test_logger", level=logging.INFO)
    try:
        configure_basic_logging(level=logging.DEBUG)
        assert own.level == logging.DEBUG
        assert foreign_logger.level == logging.WARNING

        configure_basic_logging(level=logging.ERROR)
        assert own.level == logging.ERROR
        assert foreign_logger.level == logging.WARNING
    finally:
        configure_basic_logging(level=logging.INFO)
