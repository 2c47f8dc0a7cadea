"""
Seeds
-----
Counter-based random number streams.

Every random draw in the toolkit goes through :py:meth:`~.RngSeed.generator`,
so a ``(seed, stream)`` pair fully determines a sample regardless of which worker produces it.
"""

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

UINT64_MAX = 2**64 - 1


class RngSeed(BaseModel):
    """
    Seed and stream number of a Philox generator.
    """

    model_config = ConfigDict(frozen=True)

    seed: int = Field(default=0, ge=0, le=UINT64_MAX)
    """Root entropy of the experiment."""
    stream: int = Field(default=0, ge=0, le=UINT64_MAX)
    """Stream index; worker or ensemble member ``i`` uses stream ``i``."""

    def generator(self, *substream: int) -> np.random.Generator:
        """
        Build the generator for this stream.

        :param substream: Optional further indices, e.g. the ensemble member number.
            Different substreams of the same stream are statistically independent.
        :return: A fresh :py:class:`numpy.random.Generator` backed by Philox.
        """
        sequence = np.random.SeedSequence(self.seed, spawn_key=(self.stream, *substream))
        return np.random.Generator(np.random.Philox(sequence))

    def member(self, index: int) -> "RngSeed":
        """Seed of the ``index``-th member of an ensemble rooted at this seed."""
        return RngSeed(seed=self.seed, stream=index)
