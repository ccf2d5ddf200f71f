"""Complex-length finite elements for stratified subdomains.

Linear finite elements with midpoint integration and complex element
lengths derived from rational-approximant pole locations; boundary values
of two-point and layered problems converge exponentially in the element
count. Submodules: pade_grid (element lengths and orderings), scalar_core
(1D elements, DtN maps, propagators), layered_2d (scalar strip problems),
elastic (in-plane elastodynamics), numerics (shared kernels), bench + cli
(experiment harness).
"""

from .pade_grid import Ordering, PadeGrid, element_lengths, make_grid
from .scalar_core import condense_dtn, element_dtn, exact_dtn, solve_two_point

__all__ = [
    "Ordering",
    "PadeGrid",
    "element_lengths",
    "make_grid",
    "condense_dtn",
    "element_dtn",
    "exact_dtn",
    "solve_two_point",
]

__version__ = "0.1.0"
