import logging
import os
import sys

from rich.logging import RichHandler

__all__ = ["log", "set_level", "progress_enabled"]


FORMAT = "%(message)s"
logging.basicConfig(
    level=logging.WARNING,
    format=FORMAT,
    datefmt="[%X]",
    handlers=[RichHandler()],
)

log = logging.getLogger("poincare_kernels")
log.setLevel(os.environ.get("POINCARE_KERNELS_LOG_LEVEL", "INFO").upper())

_progress = {"enabled": True}


def set_level(level):
    """Set the package log level; the environment variable still wins"""
    level = os.environ.get("POINCARE_KERNELS_LOG_LEVEL", level)
    if isinstance(level, str):
        level = level.upper()
    log.setLevel(level)
    _progress["enabled"] = log.getEffectiveLevel() <= logging.INFO


def progress_enabled():
    """Whether tqdm bars should be drawn"""
    return _progress["enabled"] and sys.stderr.isatty()
