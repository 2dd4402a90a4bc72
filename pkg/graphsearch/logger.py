"""
Logger
"""
import sys
from tempfile import gettempdir
from pathlib import Path
import logging
import os

graphsearch_dir = os.path.dirname(Path(__file__).parent)


logger = logging.getLogger(__name__)
root_logger = logging.getLogger("graphsearch")


def set_logger(version):
    formatter = "%(levelname)s " "[%(name)-10s %(funcName)-10s]: %(message)s"
    logging.basicConfig(stream=sys.stdout, format=formatter, level=logging.WARNING)
    root_logger.setLevel(logging.INFO)
    # add logger file
    filepath = os.environ.get("GS_LOG_FILE")
    if filepath is None:
        filepath = Path(gettempdir()) / ("graphsearch.log")
    if not any(isinstance(h, logging.FileHandler) for h in root_logger.handlers):
        try:
            file_handler = logging.FileHandler(filepath, mode="w")
        except OSError as exception:
            root_logger.warning("Log file not writable: {} ".format(exception))
        else:
            file_handler.setFormatter(logging.Formatter(formatter))
            root_logger.addHandler(file_handler)
    root_logger.debug("Log file: " + str(filepath))
    root_logger.debug("Python version: {} ".format(sys.version))
    root_logger.debug("GraphSearch version: {} ".format(version))
    root_logger.debug("GraphSearch directory: {} ".format(graphsearch_dir))


def update_logging_level(level):
    """Set the level of the package root logger.

    Args:
        level (str, int): e.g. "DEBUG", "INFO" or a logging constant.
    """
    if isinstance(level, str):
        level = level.upper()
    root_logger.setLevel(level)
