"""Top level for tools."""

from . import special
from .bounds import (
    beta0,
    bounds_report,
    eta1,
    eta2,
    f_minus,
    f_plus,
    g1,
    g2,
)
from .ekoperator import (
    ek_apply,
    ek_apply_function,
    ek_apply_grid,
    select_node_count,
)
