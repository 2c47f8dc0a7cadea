"""
Errors
------
Exception hierarchy shared by every Loewner Forge module.

All exceptions derive from :py:class:`~.LoewnerForgeError` so that callers (and the CLI)
can tell toolkit failures apart from programming errors.
Diagnostics such as a failing slit index, a residual or a CSV row are attached as ``__notes__``.
"""

from typing import Any, List, Optional


class LoewnerForgeError(Exception):
    """Base class for all errors raised by the toolkit."""

    def __init__(self, message: str, *, notes: Optional[List[str]] = None):
        super().__init__(message)
        if notes:
            self.__notes__ = list(notes)

    def with_note(self, note: str) -> "LoewnerForgeError":
        """
        Attach a diagnostic note to the exception and return it.

        :param note: Human-readable diagnostic.
        :return: The exception itself, so it can be re-raised inline.
        """
        self.__notes__ = [*getattr(self, "__notes__", []), note]
        return self


class DomainError(LoewnerForgeError):
    """An argument lies outside the domain of an operation (e.g. a point inside the unit disk)."""


class SingularityError(LoewnerForgeError):
    """Evaluation at (or too close to) a singular point or a singular linear system."""


class NumericError(LoewnerForgeError):
    """
    Non-finite values, failed continuity checks, solver or quadrature non-convergence.

    :param partial: Partial result accumulated before the failure, if any.
    """

    def __init__(self, message: str, *, partial: Any = None, notes: Optional[List[str]] = None):
        super().__init__(message, notes=notes)
        self.partial = partial


class CuspError(NumericError):
    """
    String-equation evolution halted because the boundary approached a cusp.

    :param trajectory: The part of the trajectory accepted before the halt.
    """

    def __init__(self, message: str, *, trajectory: Any = None, notes: Optional[List[str]] = None):
        super().__init__(message, partial=trajectory, notes=notes)
        self.trajectory = trajectory


class ParameterError(LoewnerForgeError, ValueError):
    """Invalid model parameters."""


class ConfigError(LoewnerForgeError):
    """
    Invalid or incomplete run configuration.

    :param key: Dotted name of the offending configuration key, if known.
    """

    def __init__(self, message: str, *, key: Optional[str] = None, notes: Optional[List[str]] = None):
        super().__init__(message, notes=notes)
        self.key = key


class ArtifactError(LoewnerForgeError):
    """A run artifact is missing, unreadable or does not match its manifest."""
