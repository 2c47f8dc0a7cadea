"""
Rendering
---------
SVG figures of growth patterns, droplets and spectra.

Figures are drawn with the object-oriented matplotlib API (no global pyplot state)
under :py:data:`STYLE`; the fixed hash salt and the missing date make reruns byte-identical.
"""

import logging
from pathlib import Path
from typing import Iterable, Optional, Sequence, Tuple, Union

import matplotlib
import numpy as np
from matplotlib.figure import Figure

logger = logging.getLogger(__name__)

STYLE = {
    "svg.hashsalt": "loewner-forge",
    "svg.fonttype": "none",
    "figure.figsize": (5.0, 5.0),
    "font.family": "serif",
    "axes.labelsize": 10,
    "axes.titlesize": 10,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "xtick.major.size": 4,
    "ytick.major.size": 4,
    "legend.fontsize": 8,
    "lines.linewidth": 0.8,
}


def _save(figure: Figure, path: Union[str, Path]) -> Path:
    path = Path(path)
    figure.savefig(path, format="svg", metadata={"Date": None})
    logger.debug(f"Wrote figure {path}")
    return path


def _equal_axes(title: Optional[str]):
    figure = Figure()
    axes = figure.add_subplot()
    axes.set_aspect("equal")
    if title:
        axes.set_title(title)
    return figure, axes


def render_curves(
    curves: Iterable[np.ndarray],
    path: Union[str, Path],
    *,
    labels: Optional[Sequence[str]] = None,
    closed: bool = True,
    title: Optional[str] = None,
) -> Path:
    """
    Draw complex polylines, e.g. traces of conformal maps or Hele-Shaw boundaries.

    :param closed: Join the last point of every curve to its first.
    """
    with matplotlib.rc_context(STYLE):
        figure, axes = _equal_axes(title)
        for index, curve in enumerate(curves):
            curve = np.asarray(curve, dtype=np.complex128)
            if closed and len(curve):
                curve = np.append(curve, curve[0])
            label = labels[index] if labels is not None else None
            axes.plot(curve.real, curve.imag, label=label)
        if labels is not None:
            axes.legend()
        return _save(figure, path)


def render_points(
    points: np.ndarray,
    path: Union[str, Path],
    *,
    overlay: Iterable[np.ndarray] = (),
    marker_size: float = 1.0,
    title: Optional[str] = None,
) -> Path:
    """
    Scatter complex points (gas snapshots, lattice sites) with optional closed boundary overlays.
    """
    with matplotlib.rc_context(STYLE):
        figure, axes = _equal_axes(title)
        points = np.asarray(points, dtype=np.complex128).ravel()
        axes.scatter(points.real, points.imag, s=marker_size, c="black", linewidths=0)
        for curve in overlay:
            curve = np.append(np.asarray(curve, dtype=np.complex128), np.asarray(curve)[:1])
            axes.plot(curve.real, curve.imag, color="tab:red")
        return _save(figure, path)


def render_spectra(
    series: Iterable[Tuple[np.ndarray, np.ndarray, str]],
    path: Union[str, Path],
    *,
    xlabel: str = "q",
    ylabel: str = "value",
    title: Optional[str] = None,
) -> Path:
    """
    Plot ``(x, y, label)`` series on common axes.
    """
    with matplotlib.rc_context(STYLE):
        figure = Figure()
        axes = figure.add_subplot()
        for x, y, label in series:
            axes.plot(x, y, marker=".", label=label)
        axes.set_xlabel(xlabel)
        axes.set_ylabel(ylabel)
        if title:
            axes.set_title(title)
        axes.legend()
        return _save(figure, path)
