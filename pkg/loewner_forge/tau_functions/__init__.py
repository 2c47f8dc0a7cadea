"""
Tau Functions
-------------
Exactly solvable structures behind Laplacian growth: Hirota N-soliton sums read as lattice
gases, KdV and KP phase shifts, Adler--Moser polynomials and the permeability fields of
integrable elliptic growth.
"""

from loewner_forge.tau_functions.potentials import (
    geometric_momenta,
    halfplane_potential,
    kdv_kernel,
    kp_kernel,
    kp_phase_shift,
    translation_potential,
)
from loewner_forge.tau_functions.hirota import (
    SolitonData,
    configurations,
    kdv_potential,
    kdv_residual,
    kp_tau,
    lattice_gas_energy,
    log_tau,
    tau_hirota,
)
from loewner_forge.tau_functions.adler_moser import (
    AdlerMoserPoly,
    adler_moser,
    am_kdv_residual,
    am_potential,
    bilinear_residual,
)
from loewner_forge.tau_functions.media import coxeter_weight, non_coxeter_weight, stratified_weight
