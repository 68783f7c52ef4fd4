"""Periodic orbits, thermodynamic formalism and zeta functions for finite subdivision rules."""

__version__ = "0.1.0"

from .subdivision import (Color, SubdivisionRule, ValidationReport, load_rule, parse_rule,  # noqa: E402
                          shipped_rules, validate_rule)
from .shifts import (TransitionSystem, count_fixed, edge_color_shift, edge_shift, higher_block,  # noqa: E402
                     is_mixing, tile_shift, vertex_system)
from .potential import Potential, Weights, induced_weights  # noqa: E402
from .periodic import aggregate_identity, classify_periodic_points, primitive_orbits  # noqa: E402
from .thermo import (boundary_pressures, cohomology_test, equilibrium_measure, eventually_positive,  # noqa: E402
                     pressure, solve_s0, temporal_distance)
from .em import check_Em_bound, enumerate_Em  # noqa: E402
from .zeta import (dirichlet_truncated, euler_product, product_identity_residual,  # noqa: E402
                   zeta_determinant, zeta_truncated)
from .orbitcount import li, pi_T, pot_table  # noqa: E402
