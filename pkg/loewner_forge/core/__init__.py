"""
Conformal Core
--------------
The numerical kernel shared by all stochastic growth models:
elementary slit maps, their compositions, derivatives and Loewner-equation residuals.
"""

from loewner_forge.core.errors import (
    LoewnerForgeError,
    DomainError,
    SingularityError,
    NumericError,
    CuspError,
    ParameterError,
    ConfigError,
    ArtifactError,
)
from loewner_forge.core.slit_map import (
    ComplexPoint,
    ElementarySlitMap,
    eval_elementary,
    elementary_derivative,
    tip_distance,
    base_half_angle,
)
from loewner_forge.core.composite import (
    CompositeMap,
    InvertedMap,
    eval_composite,
    eval_derivative,
    eval_with_derivative,
    whole_plane_rescale,
    fit_leading_coefficient,
    loewner_rhs,
    loewner_residual,
    invert_unbounded,
    identity_map,
)
