"""Special functions behind the closed-form norms.

Only positive real arguments are ever needed for the Gamma function, and the
Kummer function only appears with a nonpositive integer numerator parameter,
where it is a polynomial.  The Tricomi function is evaluated from its integral
representation and is used purely as an independent check.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

from scipy import integrate

from .errors import DegenerateParameterError, DomainError, PrecisionError

__all__ = [
    "SpecialValue",
    "gamma_fn",
    "log_gamma_fn",
    "kummer_truncated",
    "kummer_truncated_exact",
    "tricomi_u_estimate",
    "tricomi_u_integral",
    "angular_beta_integral",
    "radial_gaussian_moment",
]

# math.gamma overflows past this argument
_FACTORIAL_FAST_PATH_MAX = 171


@dataclass(frozen=True)
class SpecialValue:
    """A function value together with an absolute error bound."""

    value: float
    abs_error_bound: float

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise DomainError(f"non-finite special function value {self.value!r}")
        if not self.abs_error_bound >= 0:
            raise ValueError("abs_error_bound must be nonnegative")

    def __float__(self):
        return self.value


def gamma_fn(x) -> float:
    """Gamma function for positive real ``x``.

    Positive integers up to 171 go through an exact factorial before the final
    rounding to float.
    """
    if not x > 0:
        raise DomainError(f"gamma_fn requires x > 0, got {x!r}")
    if float(x).is_integer() and x <= _FACTORIAL_FAST_PATH_MAX:
        return float(math.factorial(int(x) - 1))
    return math.gamma(float(x))


def log_gamma_fn(x) -> float:
    """log Gamma(x) for x > 0."""
    if not x > 0:
        raise DomainError(f"log_gamma_fn requires x > 0, got {x!r}")
    return math.lgamma(float(x))


def _kummer_sum(n, b, z):
    # (a)_s/(b)_s z^s/s! built incrementally with a = 1 - n; works over any field
    a = 1 - n
    term = b - b + 1  # multiplicative identity of b's type
    total = term
    for s in range(n - 1):
        if b + s == 0:
            raise DegenerateParameterError(
                f"(b)_{s + 1} vanishes for b={b!r}; 1F1({a},{b},z) is undefined"
            )
        term = term * (a + s) / (b + s) * z / (s + 1)
        total = total + term
    return total


def _check_kummer_args(n):
    if int(n) != n or n < 1:
        raise DomainError(f"kummer_truncated requires an integer n >= 1, got {n!r}")


def kummer_truncated(n: int, b, z) -> float:
    """``1F1(1 - n, b, z)`` as the terminating polynomial of degree ``n - 1``.

    Rational ``b`` and ``z`` are summed exactly and rounded once at the end.

    Parameters
    ----------
    n : int
        Fixes the numerator parameter ``a = 1 - n``.
    b : float or Rational
        Denominator parameter. ``(b)_s`` must be nonzero for ``s <= n - 1``.
    z : float or Rational
        Argument.

    Raises
    ------
    DegenerateParameterError
        If a Pochhammer factor ``(b)_s`` with ``s <= n - 1`` vanishes.
    """
    _check_kummer_args(n)
    if isinstance(b, Rational) and isinstance(z, Rational):
        return float(_kummer_sum(int(n), Fraction(b), Fraction(z)))
    return float(_kummer_sum(int(n), float(b), float(z)))


def kummer_truncated_exact(n: int, b: Rational, z: Rational) -> Fraction:
    """Exact rational value of :func:`kummer_truncated`."""
    _check_kummer_args(n)
    return _kummer_sum(int(n), Fraction(b), Fraction(z))


def tricomi_u_estimate(a, b, z, epsrel=1e-12) -> SpecialValue:
    """Tricomi ``U(a, b, z)`` by adaptive quadrature of its Laplace integral.

    The integral is split at t = 1; the ``t**(a-1)`` endpoint behaviour on the
    first piece is handled by an algebraic quadrature weight.
    """
    if not a > 0 or not z > 0:
        raise DomainError(
            f"integral representation needs a > 0 and z > 0, got a={a!r}, z={z!r}"
        )
    a, b, z = float(a), float(b), float(z)

    def smooth(t):
        return math.exp(-z * t) * (1.0 + t) ** (b - a - 1.0)

    head, head_err = integrate.quad(
        smooth, 0.0, 1.0, weight="alg", wvar=(a - 1.0, 0.0),
        epsabs=0.0, epsrel=epsrel, limit=200,
    )
    tail, tail_err = integrate.quad(
        lambda t: smooth(t) * t ** (a - 1.0), 1.0, math.inf,
        epsabs=0.0, epsrel=epsrel, limit=200,
    )
    scale = math.exp(-math.lgamma(a))
    value = (head + tail) * scale
    err = (head_err + tail_err) * scale
    if not err <= 1e-9 * abs(value):
        raise PrecisionError(
            f"U({a},{b},{z}) quadrature error {err:.3g} above tolerance",
            partial=value,
        )
    return SpecialValue(value, err)


def tricomi_u_integral(a, b, z) -> float:
    """Tricomi ``U(a, b, z)`` for ``a > 0``, ``z > 0`` (relative error <= 1e-9)."""
    return tricomi_u_estimate(a, b, z).value


def angular_beta_integral(j: int, k: int) -> float:
    """``int_0^{pi/2} cos^(2j+1) sin^(2k+1) dtheta = j! k! / (2 (j+k+1)!)``."""
    if j < 0 or k < 0 or int(j) != j or int(k) != k:
        raise DomainError(f"angular_beta_integral needs integers j, k >= 0, got {j}, {k}")
    j, k = int(j), int(k)
    return float(Fraction(math.factorial(j) * math.factorial(k),
                          2 * math.factorial(j + k + 1)))


def radial_gaussian_moment(s, m) -> float:
    """``int_0^inf r^s exp(-m r^2) dr = Gamma((s+1)/2) / (2 m^((s+1)/2))``."""
    if not s >= 0 or not m > 0:
        raise DomainError(f"radial_gaussian_moment needs s >= 0, m > 0, got {s}, {m}")
    h = 0.5 * (float(s) + 1.0)
    return 0.5 * math.exp(math.lgamma(h) - h * math.log(m))
