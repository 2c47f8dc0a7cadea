"""
CLI
---
Configuration loading, seeded runs of every experiment, run manifests and their verification.
The ``loewner-forge`` console script is :py:func:`loewner_forge.cli.__main__.main`.
"""

from loewner_forge.cli.config import COMMANDS, RunConfig, load_config
from loewner_forge.cli.manifest import MANIFEST_NAME, Manifest, checksum_mismatches
from loewner_forge.cli.commands import run
from loewner_forge.cli.verify import CheckResult, VerificationReport, verify
