import sys

from loguru import logger

from .config import settings


def configure_logging(level: str | None = None, serialize: bool | None = None) -> None:
    """Install a single stderr sink; called once by the CLI entry point."""
    logger.remove()
    logger.add(
        sys.stderr,
        level=(level or settings.LOG_LEVEL).upper(),
        serialize=settings.LOG_JSON if serialize is None else serialize,
        format="<green>{time:HH:mm:ss}</green> | <level>{level: <8}</level> | {name} | {message} | {extra}",
    )
