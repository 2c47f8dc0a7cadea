"""
Growth
------
The growth models: Hastings--Levitov iterated maps, radial and whole-plane Loewner evolutions
(SLE for Brownian drivers, LLE for Lévy drivers) and lattice DLA with exact boundary charges.
"""

from loewner_forge.growth.lattice import LatticeCluster, boundary_of, box_count_dimension
from loewner_forge.growth.run import GrowthRun, load_map_csv
from loewner_forge.growth.hastings_levitov import grow_hl
from loewner_forge.growth.loewner import (
    grow_driven,
    grow_whole_plane,
    resample_driver,
    slit_angle_jumps,
    trace_points,
)
from loewner_forge.growth.dla import (
    CapacitanceSolver,
    HarmonicField,
    box_centre,
    dla_charges,
    dla_grow,
    dla_harmonic_field,
    exact_charges,
)
