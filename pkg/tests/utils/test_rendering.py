import numpy as np
import pytest

from loewner_forge.utils.rendering import render_curves, render_points, render_spectra

circle = np.exp(2j * np.pi * np.arange(64) / 64)


@pytest.mark.parametrize(
    "render",
    [
        lambda path: render_curves([circle, 2 * circle], path, labels=["r = 1", "r = 2"], title="circles"),
        lambda path: render_points(circle, path, overlay=[1.5 * circle], marker_size=2.0),
        lambda path: render_spectra([(np.arange(3), np.arange(3) ** 2, "squares")], path, ylabel="beta(q)"),
    ],
)
def test_figures_are_reproducible(tmp_path, render):
    first, second = render(tmp_path / "first.svg"), render(tmp_path / "second.svg")
    content = first.read_bytes()
    assert content.startswith(b"<?xml")
    assert b"<dc:date>" not in content
    assert content == second.read_bytes()


def test_open_curves(tmp_path):
    path = render_curves([np.linspace(0, 1, 5) + 0j], tmp_path / "segment.svg", closed=False)
    assert path.stat().st_size > 0
