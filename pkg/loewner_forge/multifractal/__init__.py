"""
Multifractal
------------
Multifractal spectroscopy of growth patterns: Monte Carlo integral-means spectra of whole-plane maps,
the exact SLE spectrum, Legendre transforms between :math:`\\beta(q)`, :math:`\\tau(q)` and
:math:`f(\\alpha)`, box-counting spectra of DLA charges, moment stationarity and the LLE generator.
"""

from loewner_forge.multifractal.spectrum import SpectrumCurve, SpectrumKind, generalized_dimensions
from loewner_forge.multifractal.exact import (
    beta_exact_sle,
    binomial_cascade_tau,
    branch_gaps,
    exact_beta_curve,
    gamma_identity_check,
    root_limit,
    sle_breakpoints,
    sle_dimension,
    sle_gamma,
)
from loewner_forge.multifractal.legendre import (
    f_to_tau,
    legendre_beta_to_f,
    legendre_f_to_beta,
    legendre_tau_f_roundtrip,
    tau_to_f,
)
from loewner_forge.multifractal.integral_means import (
    BetaEstimate,
    StationarityReport,
    beta_estimate,
    beta_spectrum,
    derivative_moments,
    moment_stationarity,
)
from loewner_forge.multifractal.boxcount import dyadic_scales, tau_boxcount, tau_from_measure
from loewner_forge.multifractal.generator import (
    GeneratorSpec,
    TestFunction,
    apply_generator,
    eigen_residual,
    eta_hat,
    eta_limit,
    polar_grid,
)
