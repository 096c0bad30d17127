import logging

LOGGER_NAME = "patcover"
AUDIT_FORMAT = "%(asctime)s,%(levelname)s,%(message)s"

_logger = logging.getLogger(LOGGER_NAME)


def configure_logging(filename=None, level="INFO"):
    """Audit lines are CSV-shaped: timestamp,level,message."""
    kwargs = {"level": getattr(logging, str(level).upper(), logging.INFO), "format": AUDIT_FORMAT}
    if filename:
        kwargs["filename"] = filename
    logging.basicConfig(**kwargs)


def log_error(message):
    _logger.error(message)


def log_warning(message):
    _logger.warning(message)


def log_info(message):
    _logger.info(message)


def log_debug(message):
    _logger.debug(message)
