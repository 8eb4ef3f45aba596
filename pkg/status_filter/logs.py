from __future__ import annotations

import logging
import os

from rich.console import Console
from rich.logging import RichHandler

ENV_VAR = "CSF_LOG"

_LEVELS: dict[str, int] = {
    "quiet": logging.ERROR,
    "info": logging.INFO,
    "debug": logging.DEBUG,
}

_HANDLER: RichHandler | None = None


def resolve_level(name: str | None) -> tuple[int, bool]:
    key = (name or "info").strip().lower()
    if key in _LEVELS:
        return _LEVELS[key], True
    return logging.INFO, False


def configure_logging(level: str | None = None) -> logging.Logger:
    global _HANDLER

    raw = level if level is not None else os.getenv(ENV_VAR)
    lvl, known = resolve_level(raw)

    logger = logging.getLogger("status_filter")
    if _HANDLER is None:
        _HANDLER = RichHandler(
            console=Console(stderr=True),
            show_time=False,
            show_path=False,
            markup=False,
        )
        _HANDLER.setFormatter(logging.Formatter("%(message)s"))
        logger.addHandler(_HANDLER)
        logger.propagate = False
    logger.setLevel(lvl)

    if not known:
        logger.warning("Unknown %s value %r; using info.", ENV_VAR, raw)
    return logger
