import logging
import os

import ngs_tools as ngs

logger = ngs.logging.Logger(__name__)
logger.setLevel(logging.INFO)

LOG_LEVELS = {
    "error": logging.ERROR,
    "info": logging.INFO,
    "debug": logging.DEBUG,
}


def set_level_from_env(variable: str = "FRACPME_LOG") -> None:
    """Sets the package log level from an environment variable.

    Args:
        variable: Name of the environment variable. Accepted values are
            "error", "info" and "debug". An unset variable leaves the level
            untouched.

    Raises:
        ValueError if the variable holds an unknown level.
    """
    level = os.environ.get(variable)
    if level is None:
        return
    if level.lower() not in LOG_LEVELS:
        raise ValueError(
            f"{variable} must be one of {', '.join(LOG_LEVELS)}, got `{level}`."
        )
    logger.setLevel(LOG_LEVELS[level.lower()])
