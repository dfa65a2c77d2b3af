"""Errors, warnings, the package logger and logging decorators."""

from .errors import *
from .logging import logger, set_level_from_env
from .utilities import *
from .warnings import *
