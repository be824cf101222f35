import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from radialquant.errors import DegenerateParameterError, DomainError
from radialquant.specfun import (SpecialValue, angular_beta_integral, gamma_fn,
                                 kummer_truncated, kummer_truncated_exact, log_gamma_fn,
                                 radial_gaussian_moment, tricomi_u_estimate,
                                 tricomi_u_integral)


@pytest.mark.parametrize("x, expected", [(1, 1.0), (5, 24.0), (0.5, 1.7724538509055160)])
def test_gamma_examples(x, expected):
    assert gamma_fn(x) == pytest.approx(expected, rel=1e-15)


def test_gamma_integers_exact():
    for x in range(1, 21):
        assert gamma_fn(x) == math.factorial(x - 1)


@given(st.floats(min_value=1e-3, max_value=150.0))
def test_gamma_matches_mpmath(x):
    assert gamma_fn(x) == pytest.approx(float(mpmath.gamma(x)), rel=1e-13)
    assert log_gamma_fn(x) == pytest.approx(float(mpmath.loggamma(x)), rel=1e-13, abs=1e-14)


@pytest.mark.parametrize("x", [0, -1, -0.5])
def test_gamma_rejects_nonpositive(x):
    with pytest.raises(DomainError):
        gamma_fn(x)
    with pytest.raises(DomainError):
        log_gamma_fn(x)


@pytest.mark.parametrize("n, b, z, expected", [
    (2, -3, 1, 4 / 3),
    (1, -7.5, 3.2, 1.0),
    (3, -3, 1, 11 / 6),
])
def test_kummer_examples(n, b, z, expected):
    assert kummer_truncated(n, b, z) == pytest.approx(expected, rel=1e-15)


def test_kummer_n2_closed_form_exact():
    for k in range(51):
        for m in range(1, 11):
            exact = Fraction(k + m + 1, k + 1)
            assert kummer_truncated_exact(2, -1 - k, m) == exact
            assert kummer_truncated(2, -1 - k, m) == float(exact)


def test_kummer_equal_parameters():
    # a = b = 1 - n: every Pochhammer ratio is 1, so the sum is a truncated exponential
    for n in range(1, 6):
        expected = sum(Fraction(2) ** s / math.factorial(s) for s in range(n))
        assert kummer_truncated_exact(n, 1 - n, 2) == expected


@given(st.integers(1, 6), st.floats(-40.5, -5.5), st.floats(0.0, 10.0))
def test_kummer_matches_mpmath(n, b, z):
    ref = float(mpmath.hyp1f1(1 - n, b, z))
    assert kummer_truncated(n, b, z) == pytest.approx(ref, rel=1e-12, abs=1e-12)


@pytest.mark.parametrize("n, b", [(2, 0), (3, -1), (4, -2)])
def test_kummer_degenerate(n, b):
    with pytest.raises(DegenerateParameterError):
        kummer_truncated(n, b, 1.0)


def test_kummer_rejects_bad_order():
    with pytest.raises(DomainError):
        kummer_truncated(0, -3, 1)


@pytest.mark.parametrize("a, b, z, expected", [
    (1, 1, 1, 0.5963473623231940),
    (1, 2, 2, 0.5),
    # U(2, 4, 3) = 5/27 (integer b; value from mpmath.hyperu at 30 digits)
    (2, 4, 3, 5 / 27),
])
def test_tricomi_examples(a, b, z, expected):
    assert tricomi_u_integral(a, b, z) == pytest.approx(expected, rel=1e-9)


def _u_from_kummer(a, b, z):
    with mpmath.workdps(40):
        first = mpmath.gamma(1 - b) / mpmath.gamma(a + 1 - b) * mpmath.hyp1f1(a, b, z)
        second = (mpmath.gamma(b - 1) / mpmath.gamma(a) * mpmath.power(z, 1 - b)
                  * mpmath.hyp1f1(a + 1 - b, 2 - b, z))
        return float(first + second)


@pytest.mark.parametrize("a", [1, 2, 3])
@pytest.mark.parametrize("b", [-2.5, 0.5])
@pytest.mark.parametrize("z", [0.5, 1, 3])
def test_tricomi_matches_kummer_relation(a, b, z):
    assert tricomi_u_integral(a, b, z) == pytest.approx(_u_from_kummer(a, b, z), rel=1e-8)


def test_tricomi_integer_b_near_relation():
    # the relation has Gamma poles at integer b; approach b = 4 from one side
    with mpmath.workdps(60):
        b = mpmath.mpf(4) + mpmath.mpf("1e-30")
        ref = (mpmath.gamma(1 - b) / mpmath.gamma(3 - b) * mpmath.hyp1f1(2, b, 3)
               + mpmath.gamma(b - 1) / mpmath.gamma(2) * mpmath.power(3, 1 - b)
               * mpmath.hyp1f1(3 - b, 2 - b, 3))
    assert tricomi_u_integral(2, 4, 3) == pytest.approx(float(ref), rel=1e-8)


def test_tricomi_error_bound_reported():
    val = tricomi_u_estimate(2, 0.5, 1.0)
    assert isinstance(val, SpecialValue)
    assert 0 <= val.abs_error_bound <= 1e-9 * abs(val.value)
    assert float(val) == val.value


@pytest.mark.parametrize("a, z", [(0, 1), (-1, 1), (1, 0), (1, -2)])
def test_tricomi_domain(a, z):
    with pytest.raises(DomainError):
        tricomi_u_integral(a, 1, z)


def test_special_value_rejects_nonfinite():
    with pytest.raises(DomainError):
        SpecialValue(math.inf, 0.0)
    with pytest.raises(ValueError):
        SpecialValue(1.0, -1.0)


@pytest.mark.parametrize("j, k, expected", [(0, 0, 0.5), (1, 0, 0.25), (2, 3, 1 / 120)])
def test_angular_beta_examples(j, k, expected):
    assert angular_beta_integral(j, k) == pytest.approx(expected, rel=1e-15)


def test_angular_beta_symmetric():
    for j in range(31):
        for k in range(31):
            assert angular_beta_integral(j, k) == angular_beta_integral(k, j)


@given(st.integers(0, 12), st.integers(0, 12))
def test_angular_beta_quadrature(j, k):
    ref, _ = integrate.quad(lambda th: math.cos(th) ** (2 * j + 1) * math.sin(th) ** (2 * k + 1),
                            0, math.pi / 2, epsabs=0, epsrel=1e-13)
    assert angular_beta_integral(j, k) == pytest.approx(ref, rel=1e-10)


@pytest.mark.parametrize("s, m, expected", [(1, 1, 0.5), (0, 1, 0.8862269254527580),
                                            (3, 2, 0.125)])
def test_gaussian_moment_examples(s, m, expected):
    assert radial_gaussian_moment(s, m) == pytest.approx(expected, rel=1e-14)


@given(st.integers(0, 60), st.integers(1, 10))
def test_gaussian_moment_quadrature(s, m):
    peak = math.sqrt(s / (2 * m)) if s else 0.0
    f = lambda r: r ** s * math.exp(-m * r * r)
    ref = sum(integrate.quad(f, a, b, epsabs=0, epsrel=1e-13, limit=200)[0]
              for a, b in ((0, peak), (peak, math.inf)))
    assert radial_gaussian_moment(s, m) == pytest.approx(ref, rel=1e-10)


def test_gaussian_moment_domain():
    with pytest.raises(DomainError):
        radial_gaussian_moment(-1, 1)
    with pytest.raises(DomainError):
        radial_gaussian_moment(1, 0)
