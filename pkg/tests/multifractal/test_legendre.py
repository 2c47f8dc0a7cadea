import logging

import numpy as np
import pytest

from loewner_forge.core import ParameterError
from loewner_forge.multifractal import (
    SpectrumCurve,
    binomial_cascade_tau,
    exact_beta_curve,
    f_to_tau,
    generalized_dimensions,
    legendre_beta_to_f,
    legendre_f_to_beta,
    legendre_tau_f_roundtrip,
    tau_to_f,
)
from loewner_forge.multifractal import legendre


@pytest.fixture
def cascade():
    q = np.arange(-100, 101) / 20.0
    return SpectrumCurve(abscissa=q, values=binomial_cascade_tau(0.3, q), kind="tau")


@pytest.fixture
def legendre_warnings(log_event_catcher):
    return log_event_catcher(logging.getLogger(legendre.__name__), level=logging.WARNING)


def test_trivial_measure_round_trip():
    q = np.linspace(-3.0, 3.0, 13)
    curve = SpectrumCurve(abscissa=q, values=q - 1.0, kind="tau")
    f = tau_to_f(curve)
    assert f.abscissa.tolist() == [1.0]
    assert f.values.tolist() == [1.0]
    assert legendre_tau_f_roundtrip(curve) == 0.0


def test_cascade_round_trip(cascade):
    assert legendre_tau_f_roundtrip(cascade) < 1e-10
    f = tau_to_f(cascade)
    assert not f.hull
    assert f.is_concave(1e-9)
    assert f.values.max() == pytest.approx(1.0, abs=1e-9)
    assert generalized_dimensions(cascade)[100] == pytest.approx(1.0)


def test_f_to_tau_recovers_vertices(cascade):
    back = f_to_tau(tau_to_f(cascade), cascade.abscissa[::10])
    assert back.kind == "tau"
    assert np.allclose(back.values, cascade.values[::10], atol=1e-10)


def test_non_concave_input_is_convexified(legendre_warnings):
    q = np.linspace(-2.0, 2.0, 5)
    curve = SpectrumCurve(abscissa=q, values=q**2, kind="tau")
    f = tau_to_f(curve)
    assert f.hull
    assert len(legendre_warnings) == 1
    assert legendre_tau_f_roundtrip(curve) == pytest.approx(4.0)


def test_explicit_alpha_grid_edge_hits(cascade, legendre_warnings):
    f = tau_to_f(cascade, alpha=np.array([0.0, 1.0, 5.0]))
    assert f.edge_hits == 2
    assert len(legendre_warnings) == 1


def test_smooth_curve_beta():
    q = np.linspace(-3.0, 3.0, 61)
    f = legendre_beta_to_f(SpectrumCurve(abscissa=q, values=np.zeros_like(q), kind="beta"))
    assert f.abscissa.tolist() == [1.0]
    assert f.values.tolist() == [1.0]


def test_affine_beta_is_degenerate():
    q = np.linspace(-3.0, 3.0, 61)
    f = legendre_beta_to_f(SpectrumCurve(abscissa=q, values=0.5 * (q - 1.0), kind="beta"))
    assert len(f) == 1
    assert f.abscissa[0] == pytest.approx(2.0)
    assert f.values[0] == pytest.approx(1.0)


@pytest.fixture
def sle_beta():
    return exact_beta_curve(np.arange(-200, 301) / 200.0, 2.0)


def test_sle_singularity_spectrum(sle_beta):
    f = legendre_beta_to_f(sle_beta)
    assert f.kind == "f"
    assert f.edge_hits == 0
    assert f.is_concave(1e-8)
    peak = int(np.argmax(f.values))
    assert f.values[peak] == pytest.approx(1.25, abs=1e-3)


def test_sle_beta_round_trip(sle_beta):
    back = legendre_f_to_beta(legendre_beta_to_f(sle_beta), sle_beta.abscissa)
    assert back.kind == "beta"
    assert np.max(np.abs(back.values - sle_beta.values)) < 1e-10


def test_beta_edge_hits(sle_beta, legendre_warnings):
    f = legendre_beta_to_f(sle_beta, alpha=np.array([0.1, 1.0, 50.0]))
    assert f.edge_hits == 2
    assert len(legendre_warnings) == 1


def test_non_convex_beta(legendre_warnings):
    q = np.linspace(-1.0, 1.0, 21)
    f = legendre_beta_to_f(SpectrumCurve(abscissa=q, values=-0.1 * q**2, kind="beta"))
    assert f.hull
    assert len(legendre_warnings) == 1


def test_wrong_kinds():
    beta = SpectrumCurve(abscissa=[0.0, 1.0], values=[0.0, 0.0], kind="beta")
    with pytest.raises(ParameterError):
        tau_to_f(beta)
    with pytest.raises(ParameterError):
        legendre_f_to_beta(beta, [0.0])
    with pytest.raises(ParameterError):
        legendre_beta_to_f(SpectrumCurve(abscissa=[0.0], values=[0.0], kind="beta"))
    with pytest.raises(ParameterError):
        legendre_beta_to_f(beta, alpha=np.array([-1.0]))


def test_steep_beta_has_no_f():
    q = np.linspace(0.0, 2.0, 5)
    with pytest.raises(ParameterError):
        legendre_beta_to_f(SpectrumCurve(abscissa=q, values=2.0 * q, kind="beta"))


def test_single_slope_beta():
    f = legendre_beta_to_f(SpectrumCurve(abscissa=[0.0, 1.0], values=[0.0, 0.5], kind="beta"))
    assert f.abscissa.tolist() == [2.0]
    assert f.values.tolist() == [2.0]
