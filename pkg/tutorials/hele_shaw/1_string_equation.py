# %% [markdown]
"""
# Hele-Shaw: 1. The string equation

This notebook evolves smooth domains by Laplacian growth.
A domain is the image of the exterior of the unit disk under a truncated
Laurent map, and the string equation fixes the velocity of its coefficients.

The simplest case is a circle fed by a unit source: its area grows
linearly, so the conformal radius is `sqrt(1 + t)`.
"""

# %pip install loewner-forge

# %%
import numpy as np

from loewner_forge.core import NumericError
from loewner_forge.hele_shaw import (
    FluxProfile,
    domain_moments,
    evolve_string,
    exterior_map,
    pk_residual,
    solve_velocity,
)

# %%
trajectory = evolve_string(exterior_map(1.0), dt=1e-3, steps=1000)
radii = np.array([f.r for f in trajectory.maps])

assert np.allclose(radii, np.sqrt(1.0 + trajectory.times), rtol=1e-6)

# %% [markdown]
"""
A perturbed circle keeps its harmonic moments while its area grows.
The residual of the string equation stays at rounding level on every step.
"""

# %%
f = exterior_map(1.0, [0.0, 0.1, 0.05])
trajectory = evolve_string(f, dt=1e-3, steps=300)

first = domain_moments(trajectory.maps[0], 3)
last = domain_moments(trajectory.final, 3)
print(f"area / pi: {first.t_area:.6f} -> {last.t_area:.6f}")
print(f"moment drift: {np.max(np.abs(last.moments - first.moments)):.2e}")

velocity = solve_velocity(trajectory.final)
assert pk_residual(trajectory.final, velocity) < 1e-10

# %% [markdown]
"""
Sucking fluid out of the domain drives it towards a cusp.
The evolution stops there and hands back the part that was computed.
Contraction has to be requested explicitly with `unsafe=True`.
A three-fold perturbation sharpens as the domain shrinks.
"""

# %%
try:
    evolve_string(
        exterior_map(1.0, [0.0, 0.0, 0.2]),
        dt=1e-3,
        steps=2000,
        flux=FluxProfile(rate=-1.0),
        unsafe=True,
    )
except NumericError as error:
    # CuspError is the usual outcome; it keeps the accepted states
    steps = len(error.partial.maps)
    print(f"{type(error).__name__} after {steps} steps: {error}")
