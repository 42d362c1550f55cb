import logging
import sys
from logging import CRITICAL, ERROR, WARNING, INFO, DEBUG, NOTSET, StreamHandler


class CliHandler(StreamHandler):
    COLOR_LEVELS = [
        (CRITICAL, 91),
        (ERROR, 91),
        (WARNING, 93),
        (INFO, 92),
        (DEBUG, 97),
        (NOTSET, 97),
    ]

    def __init__(self, color: bool = True):
        StreamHandler.__init__(self, sys.stderr)
        self._color_enabled = color

    def format(self, record: logging.LogRecord) -> str:
        s = StreamHandler.format(self, record)
        if not self._color_enabled:
            return s
        for level, color in self.COLOR_LEVELS:
            if record.levelno >= level:
                return self._color(s, color)
        return s

    def _color(self, s: str, color: int) -> str:
        return '\033[%dm%s\033[0m' % (color, s)


def set_verbosity(logger: logging.Logger, verbose: bool = False, quiet: bool = False) -> None:
    if verbose and quiet:
        raise ValueError('Verbose and quiet output are mutually exclusive.')
    if verbose:
        logger.setLevel(DEBUG)
    elif quiet:
        logger.setLevel(WARNING)
    else:
        logger.setLevel(INFO)
