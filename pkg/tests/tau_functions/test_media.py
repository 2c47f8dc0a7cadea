import logging

import pytest

from loewner_forge.core import DomainError, SingularityError
from loewner_forge.tau_functions import coxeter_weight, non_coxeter_weight, stratified_weight


def test_single_mirror():
    kappa, eta = coxeter_weight(1, 1, 0, 0.3 + 0.5j)
    assert kappa == pytest.approx(1.0)
    assert eta == 1.0


def test_reflection_invariance():
    z = 0.7 + 0.4j
    assert coxeter_weight(3, 1, 2, z)[0] == pytest.approx(coxeter_weight(3, 1, 2, z.conjugate())[0])


def test_laplacian_case():
    assert coxeter_weight(4, 0, 0, 0.1 + 0.2j) == (1.0, 1.0)


def test_singular_locus(log_event_catcher):
    logs = log_event_catcher(logging.getLogger("loewner_forge.tau_functions.media"), level=logging.WARNING)
    kappa, _ = coxeter_weight(1, 1, 0, 1.0 + 1e-8j)
    assert kappa > 0
    assert len(logs) == 1
    with pytest.raises(SingularityError):
        coxeter_weight(2, 0, 1, 1.0 + 1.0j)


def test_non_coxeter_weight():
    kappa, eta = non_coxeter_weight(1, 1.0 + 1.0j)
    assert kappa == pytest.approx(0.25)
    assert eta == 1.0
    with pytest.raises(SingularityError):
        non_coxeter_weight(1, 1.0j)


def test_stratified_weight():
    kappa, eta = stratified_weight(2, [1], [1], 2.0)
    assert eta == pytest.approx(2.0)
    assert kappa * eta == pytest.approx((2.0 / 9.0) ** 2)
    with pytest.raises(DomainError):
        stratified_weight(2, [1], [1], -1.0 / 2)
