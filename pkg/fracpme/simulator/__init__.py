"""Top level for simulator."""

from .FieldSimulator import FieldSimulator
from .FractionalPorousMediumSimulator import FractionalPorousMediumSimulator
from .oracle_utilities import (
    compare_self_similar,
    front_exponent,
    front_positions,
    l1_weights,
)
