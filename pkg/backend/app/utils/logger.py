"""
Logging configuration
"""

import logging
import sys
from datetime import datetime
from pathlib import Path
from typing import Optional, TextIO, Union

LOG_FORMAT = '%(asctime)s | %(name)-20s | %(levelname)-8s | %(message)s'

_HANDLER_TAG = "_lab_handler"


def setup_logging(log_level: Union[int, str] = logging.INFO, log_dir: Optional[str] = "logs", stream: Optional[TextIO] = None):
    """
    Setup application logging

    Creates:
    - Console handler (stdout, or `stream`)
    - File handler (logs/lab_YYYYMMDD.log) unless log_dir is None

    Calling it again replaces the handlers installed by the previous call.
    """
    if isinstance(log_level, str):
        log_level = logging.getLevelName(log_level.upper())
        if not isinstance(log_level, int):
            log_level = logging.INFO

    formatter = logging.Formatter(LOG_FORMAT, datefmt='%Y-%m-%d %H:%M:%S')
    root_logger = logging.getLogger()

    for handler in list(root_logger.handlers):
        if getattr(handler, _HANDLER_TAG, False):
            root_logger.removeHandler(handler)
            handler.close()

    # Console handler
    console_handler = logging.StreamHandler(stream or sys.stdout)
    console_handler.setFormatter(formatter)
    console_handler.setLevel(log_level)
    setattr(console_handler, _HANDLER_TAG, True)
    root_logger.addHandler(console_handler)

    # File handler
    if log_dir:
        path = Path(log_dir)
        path.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(
            path / f"lab_{datetime.now().strftime('%Y%m%d')}.log"
        )
        file_handler.setFormatter(formatter)
        file_handler.setLevel(logging.INFO)
        setattr(file_handler, _HANDLER_TAG, True)
        root_logger.addHandler(file_handler)

    root_logger.setLevel(log_level)

    # Suppress noisy loggers
    logging.getLogger("hypothesis").setLevel(logging.WARNING)

    return root_logger
