"""
Hele-Shaw
---------
Laplacian growth of smooth domains: truncated Laurent maps evolved by the string equation,
their conserved harmonic moments and quadrature identities.
"""

from loewner_forge.hele_shaw.laurent import (
    LaurentMap,
    LaurentSeries,
    MapVelocity,
    cusp_ratio,
    exterior_map,
    interior_map,
    is_univalent,
    map_area,
    pk_residual,
    poisson_bracket,
    string_bracket,
    winding_number,
)
from loewner_forge.hele_shaw.evolution import FluxProfile, Trajectory, evolve_string, solve_velocity
from loewner_forge.hele_shaw.moments import (
    HarmonicTestFunction,
    MomentVector,
    domain_integral,
    domain_moments,
    dump_moments_csv,
    harmonic_moments,
    interior_moments,
    moments_frame,
    quadrature_check,
    quadrature_coefficients,
    richardson_invariance,
)
