"""
Numeric Guards
--------------
Decorators that run numeric kernels under strict floating-point rules.
"""

import logging

import numpy as np
import wrapt

from loewner_forge.core.errors import NumericError

logger = logging.getLogger(__name__)


@wrapt.decorator
def numeric_guard(wrapped, instance, args, kwargs):
    """
    Run the wrapped function with numpy overflow and invalid-operation errors raised,
    re-raising them as :py:class:`~loewner_forge.core.errors.NumericError`.
    Division by zero is left to the function itself, since several kernels
    detect singular points explicitly.
    """
    with np.errstate(over="raise", invalid="raise"):
        try:
            return wrapped(*args, **kwargs)
        except FloatingPointError as exc:
            logger.error(f"Floating point failure inside {wrapped.__qualname__}", exc_info=exc)
            raise NumericError(f"{wrapped.__qualname__}: {exc}") from exc
