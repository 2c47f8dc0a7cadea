"""
Coulomb Gas
-----------
Metropolis sampling of the normal-matrix eigenvalue gas and the shape of its droplet.
"""

from loewner_forge.coulomb_gas.state import (
    GasKernel,
    GasState,
    admissibility_margin,
    energy,
    harmonic_potential,
    initial_state,
    kp_energy,
    total_energy,
)
from loewner_forge.coulomb_gas.metropolis import GasChain, metropolis_run
from loewner_forge.coulomb_gas.droplet import (
    DropletStats,
    boundary_estimate,
    boundary_harmonic,
    circular_droplet,
    compare_to_hele_shaw,
    droplet_stats,
    predicted_droplet_radius,
)
