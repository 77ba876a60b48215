"""Rotated-lattice NOMA constellations.

Cyclotomic rotations of Z^n (:mod:`noma_lab.lattice`), two-user
superposition and lattice-partition constellations
(:mod:`noma_lab.constellation`), product-distance and determinant analysis
(:mod:`noma_lab.analysis`) and block-fading Monte Carlo
(:mod:`noma_lab.sim`).
"""

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .lattice import (  # noqa: F401
    NumberField,
    RotatedLattice,
    build_field,
    build_lattice,
    generator_matrix,
    identity_lattice,
    lattice_dpmin,
    shell_dpmin,
    witness_point,
)
from .constellation import (  # noqa: F401
    CompositeScheme,
    UserConstellation,
    alpha_lattice_partition,
    composite_1d,
    coset_leaders,
    lattice_partition_scheme,
    superimpose,
)
from .analysis import (  # noqa: F401
    DistanceReport,
    demin_bruteforce,
    distance_report,
    dpmin_bruteforce,
    dpmin_grid_search,
    dpmin_lattice_partition,
    dpmin_upper_bound,
    min_determinant,
)
from .sim import (  # noqa: F401
    ChannelConfig,
    SerCurve,
    diversity_slope,
    estimate_diversity,
    simulate_ser,
)
