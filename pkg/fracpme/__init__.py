# -*- coding: utf-8 -*-

"""Top-level for fracpme development."""

package_name = "fracpme"
__version__ = "0.1.0"

from . import data
from . import tools
from . import solver
from . import simulator
from . import cli
