# %% [markdown]
"""
# Tau functions: 1. Solitons and rational solutions

The Hirota tau function of the KdV hierarchy is a sum over the occupation
configurations of a lattice gas. Its second logarithmic derivative is the
KdV potential.

This notebook builds a two-soliton potential and an Adler-Moser polynomial.
"""

# %pip install loewner-forge

# %%
import numpy as np

from loewner_forge.tau_functions import (
    SolitonData,
    adler_moser,
    configurations,
    kdv_potential,
    kdv_residual,
    log_tau,
)

# %% [markdown]
"""
With two momenta there are four configurations, from the empty lattice
to the fully occupied one.
"""

# %%
data = SolitonData.kdv([1.0, 2.0], phases=[0.0, 1.0])
print(configurations(data.N))
print(f"log tau at x = 0: {log_tau(data):.6f}")

# %%
x = np.linspace(-10, 10, 201)
potential = kdv_potential(data, x)
print(f"deepest well: {potential.min():.4f}")

# The finite-difference KdV residual shrinks with the grid spacing.
assert kdv_residual(data, 2e-3) < kdv_residual(data, 4e-3)

# %% [markdown]
"""
Adler-Moser polynomials are exact rational objects.
The polynomial of level `l` has degree `l (l + 1) / 2`.
"""

# %%
poly = adler_moser(3, ["1/2", "0"])
print(poly.coeffs)
assert len(poly.coeffs) - 1 == poly.degree == 6
