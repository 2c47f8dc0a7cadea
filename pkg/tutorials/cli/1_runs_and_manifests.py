# %% [markdown]
"""
# CLI: 1. Runs and manifests

Every experiment can be started from the command line:

```bash
loewner-forge hele-shaw --set hele-shaw.steps=500 --out runs/circle
loewner-forge verify runs/circle/manifest.json
```

This notebook does the same from Python. A run is described by a validated
configuration, writes its artifacts together with a manifest of checksums,
and can be verified later.
"""

# %pip install loewner-forge

# %%
import tempfile
from pathlib import Path

from loewner_forge.cli import load_config, run, verify
from loewner_forge.core import ConfigError

# %% [markdown]
"""
Configuration errors name the offending key before any work starts.
"""

# %%
try:
    load_config("hele-shaw", overrides=["hele-shaw.stepz=500"])
except ConfigError as error:
    print(f"{error.key}: {error}")

# %%
with tempfile.TemporaryDirectory() as directory:
    config = load_config(
        "hele-shaw",
        overrides=["hele-shaw.steps=500"],
        out=str(Path(directory) / "circle"),
        emit="csv,json",
    )
    manifest = run(config)
    print(sorted(manifest.artifacts))

    report = verify(config.output_dir / "manifest.json")
    print("\n".join(report.lines(color=False)))
    assert report.passed
