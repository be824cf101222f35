import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from radialquant import potentials
from radialquant.errors import DomainError
from radialquant.potentials import PotentialKind, potential_value

BUILTINS = [potentials.flat, potentials.simanca, potentials.eguchi_hanson]


def test_examples():
    assert potential_value(potentials.simanca(), 1.0, 0) == 1.0
    assert potential_value(potentials.simanca(), 2.0, 1) == 1.5
    # sqrt(2) - log(1 + sqrt(2)), mpmath at 30 digits
    assert potential_value(potentials.eguchi_hanson(), 1.0, 0) == pytest.approx(
        0.53283997535355202, rel=1e-15)


def test_log_coefficients():
    assert potentials.flat().log_coefficient == 0
    assert potentials.simanca().log_coefficient == 1
    assert potentials.eguchi_hanson().log_coefficient == 1


@pytest.mark.parametrize("factory", BUILTINS)
@pytest.mark.parametrize("order", range(potentials.BUILTIN_MAX_ORDER))
def test_derivatives_consistent(factory, order):
    p = factory()
    for t in np.geomspace(0.1, 10, 50):
        h = 1e-4 * t
        fd = (-p(t + 2 * h, order) + 8 * p(t + h, order) - 8 * p(t - h, order)
              + p(t - 2 * h, order)) / (12 * h)
        exact = p(t, order + 1)
        assert abs(fd - exact) <= 1e-6 * max(abs(exact), 1e-3), (t, order)


@pytest.mark.parametrize("factory", BUILTINS)
def test_high_precision_value_agrees(factory):
    p = factory()
    for t in (0.05, 0.7, 3.0, 40.0):
        assert float(p.value_hp(mpmath.mpf(t))) == pytest.approx(p(t), rel=1e-14)


@pytest.mark.parametrize("factory", [potentials.simanca, potentials.eguchi_hanson])
def test_smooth_part_bounded_near_zero(factory):
    p = factory()
    for t in np.geomspace(1e-8, 1, 40):
        assert p(t) - math.log(t) == pytest.approx(p.smooth(t), abs=1e-12)
        assert abs(p.smooth(t)) < 2


def test_flat_bounded_near_zero():
    p = potentials.flat()
    assert all(abs(p(t)) <= 1 for t in np.geomspace(1e-8, 1, 20))


@given(st.floats(1e-3, 1e3))
def test_eguchi_hanson_ricci_flat_identity(t):
    # Phi'^(n-1) (Phi' + t Phi'') = 1 for n = 2, so log det g vanishes
    p = potentials.eguchi_hanson()
    assert p(t, 1) * (p(t, 1) + t * p(t, 2)) == pytest.approx(1.0, rel=1e-9)


@pytest.mark.parametrize("t", [0, -1.0])
def test_rejects_nonpositive_t(t):
    with pytest.raises(DomainError):
        potentials.simanca()(t)


@pytest.mark.parametrize("order", [-1, 7, 1.5])
def test_rejects_bad_order(order):
    with pytest.raises(DomainError):
        potentials.flat()(1.0, order)


def test_custom_potential():
    def deriv(t, k):
        return [t * t, 2 * t, 2.0, 0.0, 0.0][k]

    p = potentials.custom(deriv, 0.0, label="quadratic")
    assert p.kind is PotentialKind.CUSTOM
    assert p.name == "quadratic"
    assert p(3.0, 1) == 6.0
    assert p.smooth(3.0) == 9.0
    with pytest.raises(DomainError):
        p(1.0, 5)
    with pytest.raises(DomainError):
        potentials.custom(deriv, 0.0, max_order=3)


@pytest.mark.parametrize("name, kind", [
    ("flat", PotentialKind.FLAT), ("Simanca", PotentialKind.SIMANCA),
    ("eguchi-hanson", PotentialKind.EGUCHI_HANSON), ("eh", PotentialKind.EGUCHI_HANSON),
    ("eguchi_hanson", PotentialKind.EGUCHI_HANSON),
])
def test_from_name(name, kind):
    assert potentials.from_name(name).kind is kind


def test_from_name_unknown():
    with pytest.raises(DomainError):
        potentials.from_name("fubini")
