"""
Utils
-----
Ambient helpers shared by the toolkit: log formatting, artifact IO, SVG rendering, ensemble pools
and the pydantic/numpy glue in :py:mod:`~loewner_forge.utils.devel`.
Submodules are imported explicitly so that importing the numeric core does not load matplotlib.
"""
