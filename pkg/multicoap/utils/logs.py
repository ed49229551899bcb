import os
import logging
from logging import LogRecord, _nameToLevel
from typing import Dict

import click

try:
    from dotenv import load_dotenv

    load_dotenv()
except ImportError:  # .env support is optional
    pass

log_level = os.environ.get("LOG_LEVEL", "INFO").upper()
LOG_LEVEL = _nameToLevel.get(log_level, logging.INFO)


class ColorFormatter:
    """
    Formatter that colours the whole record according to its level.
    """

    color_mapper = {
        logging.DEBUG: "cyan",
        logging.INFO: "green",
        logging.WARNING: "yellow",
        logging.ERROR: "red",
        logging.CRITICAL: "bright_red",
    }

    def __init__(
        self,
        fmt: str = "%(asctime)s [%(name)s - %(levelname)s] > %(message)s",
        datefmt: str = "%Y-%m-%d %H:%M:%S",
        use_colors: bool = True,
    ):
        self.formatter = logging.Formatter(fmt=fmt, datefmt=datefmt)
        self.use_colors = use_colors

    @property
    def fmt(self) -> str:
        return self.formatter._fmt

    def color_message(self, level_no: int, msg: str) -> str:
        """Colour a message with the colour registered for the given level."""
        return click.style(str(msg), fg=self.color_mapper.get(level_no, "green"))

    def format(self, record: LogRecord) -> str:
        message = self.formatter.format(record)
        if self.use_colors:
            return self.color_message(record.levelno, message)
        return message


# Global formatter, colours are dropped when stderr is not a terminal
FORMATTER = ColorFormatter(use_colors=os.environ.get("NO_COLOR") is None)


class BaseLogger:
    """
    Thin wrapper around a `logging.Logger` with a single stream handler.
    """

    def __init__(self, name: str, level: int, formatter: ColorFormatter):
        self.logger = logging.getLogger(name)
        self.logger.setLevel(level)
        self.formatter = formatter
        self.logger.propagate = False

        if not self.logger.handlers:
            ch = logging.StreamHandler()
            ch.setLevel(level)
            ch.setFormatter(self.formatter)
            self.logger.addHandler(ch)

    def debug(self, message: str) -> None:
        self.logger.debug(message)

    def info(self, message: str) -> None:
        self.logger.info(message)

    def warning(self, message: str) -> None:
        self.logger.warning(message)

    def error(self, message: str) -> None:
        self.logger.error(message)

    def critical(self, message: str) -> None:
        self.logger.critical(message)

    def set_level(self, level: str) -> None:
        """Change the level of the logger and all of its handlers."""
        level_no = _nameToLevel.get(level.upper(), logging.INFO)
        self.logger.setLevel(level_no)
        for handler in self.logger.handlers:
            handler.setLevel(level_no)


# Global loggers dict
LOGGERS: Dict[str, BaseLogger] = {}


def get_logger(name: str) -> BaseLogger:
    """
    Wrapper method for creating loggers quickly.
    """
    if name not in LOGGERS:
        LOGGERS[name] = BaseLogger(name, level=LOG_LEVEL, formatter=FORMATTER)
    return LOGGERS[name]


def set_global_level(level: str) -> None:
    """
    Change the level of every logger created so far and of those created later.
    """
    global LOG_LEVEL
    LOG_LEVEL = _nameToLevel.get(level.upper(), logging.INFO)
    for _logger in LOGGERS.values():
        _logger.set_level(level)


# General logger for package-level messages
general_logger = get_logger("multicoap")
