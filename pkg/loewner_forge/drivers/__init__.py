"""
Drivers
-------
Sample paths of the driving function :math:`L(t)`: Brownian (SLE), symmetric jump Lévy (LLE)
and i.i.d. uniform angle sequences (Hastings--Levitov).
"""

from loewner_forge.drivers.seed import RngSeed
from loewner_forge.drivers.path import DriverKind, DriverPath, JumpAtom
from loewner_forge.drivers.sampling import sample_brownian, sample_levy, sample_uniform_angles, zero_driver
