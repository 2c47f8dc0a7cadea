# -*- coding: utf-8 -*-
"""
Loewner Forge
-------------
Simulation and analysis of deterministic and stochastic Laplacian growth:
conformal-map growth models (Hastings--Levitov, SLE, LLE), lattice DLA with exact boundary charges,
Hele-Shaw string evolution, integrable tau functions, the normal-matrix Coulomb gas and
multifractal spectra.

Subpackages are imported explicitly, e.g. ``from loewner_forge.growth import grow_hl``.
"""
from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("loewner-forge")
except PackageNotFoundError:  # pragma: no cover
    __version__ = "0.0.0"
