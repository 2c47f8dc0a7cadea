# %% [markdown]
"""
# Growth: 1. Hastings-Levitov clusters

This notebook grows a cluster by composing elementary slit maps,
the way the `grow-hl` command does, and inspects the resulting map.

Every particle is a slit map attached at a uniformly random angle.
With `alpha = 0` all particles have the same capacity, so the
conformal radius of the cluster is known in advance.
"""

# %pip install loewner-forge

# %%
import math
import tempfile
from pathlib import Path

from loewner_forge.core import fit_leading_coefficient
from loewner_forge.drivers import RngSeed
from loewner_forge.growth import grow_hl, load_map_csv, trace_points
from loewner_forge.utils.rendering import render_curves

# %% [markdown]
"""
A run is fully determined by its parameters and its seed:
the attachment angles are drawn from stream 0 of seed 1.
"""

# %%
run = grow_hl(alpha=0.0, delta_a=1e-3, n=200, seed=RngSeed(seed=1))
F = run.map

print(f"{len(F)} slits, total capacity {F.total_capacity:.4f}")

# %% [markdown]
"""
The leading coefficient of the composed map is `exp(total capacity)`.
It can also be measured by fitting the map on a large circle.
"""

# %%
fitted = abs(fit_leading_coefficient(F))
assert math.isclose(fitted, math.exp(F.total_capacity), rel_tol=1e-6)
assert math.isclose(F.leading_coefficient, math.exp(200 * 1e-3), rel_tol=1e-12)

# %% [markdown]
"""
Maps are stored as CSV tables of slit angles and capacities.
Reloading one gives back the same map.
"""

# %%
with tempfile.TemporaryDirectory() as directory:
    path = run.dump_map_csv(Path(directory) / "map.csv")
    reloaded = load_map_csv(path)
    assert (reloaded.angles == F.angles).all()
    assert (reloaded.capacities == F.capacities).all()

    # The boundary is the image of a circle just outside the unit disk.
    figure = render_curves(
        [trace_points(F, 1024)], Path(directory) / "trace.svg", title="HL(0)"
    )
    print(f"Figure written to {figure.name}")
