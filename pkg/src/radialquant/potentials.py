"""Radial Kähler potentials ``Phi(t)`` of ``t = |z|^2``.

Every potential is split as ``Phi(t) = smooth(t) + c * log(t)`` where ``c`` is
the log-pole coefficient.  Keeping ``c`` separate lets quantization weights
``exp(-m Phi) = t**(-m c) * exp(-m smooth)`` be formed without cancellation
close to the exceptional divisor.

Derivatives are hand-derived closed forms.  The built-in potentials supply
orders 0 through :data:`BUILTIN_MAX_ORDER`; the curvature code needs order 4
and the Laplacian of the scalar curvature needs order 6.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import mpmath

from .errors import DomainError

__all__ = [
    "PotentialKind",
    "RadialPotential",
    "flat",
    "simanca",
    "eguchi_hanson",
    "custom",
    "from_name",
    "potential_value",
    "BUILTIN_MAX_ORDER",
]

BUILTIN_MAX_ORDER = 6


class PotentialKind(enum.Enum):
    FLAT = "flat"
    SIMANCA = "simanca"
    EGUCHI_HANSON = "eguchi-hanson"
    CUSTOM = "custom"


@dataclass(frozen=True)
class RadialPotential:
    """A radial potential with exact derivatives.

    Attributes
    ----------
    kind : PotentialKind
    derivative : callable
        ``derivative(t, order)`` returns ``Phi^(order)(t)`` for ``t > 0``.
    log_coefficient : float
        Coefficient ``c`` of ``log t`` in ``Phi``.
    smooth : callable
        ``Phi(t) - c log t``, evaluated without forming ``log t``.
    max_order : int
        Highest derivative order ``derivative`` supports.
    value_hp : callable, optional
        ``Phi(t)`` for ``mpmath`` arguments, used by high-precision oracles.
    """

    kind: PotentialKind
    derivative: Callable[[float, int], float] = field(compare=False)
    log_coefficient: float
    smooth: Callable[[float], float] = field(compare=False)
    max_order: int = 4
    value_hp: Optional[Callable] = field(default=None, compare=False)
    label: str = ""

    def __call__(self, t, order=0):
        return potential_value(self, t, order)

    @property
    def name(self):
        return self.label or self.kind.value


def potential_value(p: RadialPotential, t, order: int = 0) -> float:
    """``Phi^(order)(t)`` of the potential ``p``."""
    if not t > 0:
        raise DomainError(f"radial potentials are defined for t > 0, got t={t!r}")
    if int(order) != order or not 0 <= order <= p.max_order:
        raise DomainError(f"derivative order must be in 0..{p.max_order}, got {order!r}")
    return p.derivative(t, int(order))


# -- flat: Phi = t ---------------------------------------------------------

def _flat_derivative(t, order):
    if order == 0:
        return float(t)
    return 1.0 if order == 1 else 0.0


def _flat_smooth(t):
    return float(t)


def _flat_hp(t):
    return mpmath.mpf(t)


# -- Simanca: Phi = t + log t ----------------------------------------------

def _simanca_derivative(t, order):
    if order == 0:
        return t + math.log(t)
    # d^k/dt^k log t = (-1)^(k-1) (k-1)! t^-k
    d = (-1) ** (order - 1) * math.factorial(order - 1) / t ** order
    return 1.0 + d if order == 1 else d


def _simanca_smooth(t):
    return float(t)


def _simanca_hp(t):
    return t + mpmath.log(t)


# -- Eguchi-Hanson: Phi = s + log t - log(1 + s), s = sqrt(t^2 + 1) ---------
#
# With u = Phi' = s/t we have u^2 = 1 + t^-2, hence u u' = -t^-3.  Applying
# Leibniz' rule p times gives the recurrence used below.

def _eh_first_derivatives(t, count):
    s = math.sqrt(t * t + 1.0)
    u = [s / t]
    for p in range(count - 1):
        rhs = (-1) ** (p + 1) * math.factorial(p + 2) / 2 * t ** (-3 - p)
        acc = sum(math.comb(p, i) * u[i] * u[p + 1 - i] for i in range(1, p + 1))
        u.append((rhs - acc) / u[0])
    return u


def _eh_derivative(t, order):
    if order == 0:
        s = math.sqrt(t * t + 1.0)
        return s + math.log(t) - math.log1p(s)
    return _eh_first_derivatives(t, order)[order - 1]


def _eh_smooth(t):
    s = math.sqrt(t * t + 1.0)
    return s - math.log1p(s)


def _eh_hp(t):
    s = mpmath.sqrt(t * t + 1)
    return s + mpmath.log(t) - mpmath.log(1 + s)


def flat() -> RadialPotential:
    """Euclidean potential ``Phi(t) = t``."""
    return RadialPotential(PotentialKind.FLAT, _flat_derivative, 0.0, _flat_smooth,
                           BUILTIN_MAX_ORDER, _flat_hp)


def simanca() -> RadialPotential:
    """(Generalized) Simanca potential ``Phi(t) = t + log t`` in any dimension."""
    return RadialPotential(PotentialKind.SIMANCA, _simanca_derivative, 1.0,
                           _simanca_smooth, BUILTIN_MAX_ORDER, _simanca_hp)


def eguchi_hanson() -> RadialPotential:
    """Eguchi-Hanson potential ``sqrt(t^2+1) + log t - log(1 + sqrt(t^2+1))``."""
    return RadialPotential(PotentialKind.EGUCHI_HANSON, _eh_derivative, 1.0,
                           _eh_smooth, BUILTIN_MAX_ORDER, _eh_hp)


def custom(derivative, log_coefficient, max_order=4, smooth=None, value_hp=None,
           label="custom") -> RadialPotential:
    """Wrap user supplied derivatives.

    ``derivative(t, order)`` must handle at least orders 0 through 4.  Without
    an explicit ``smooth`` the smooth part is formed as ``Phi(t) - c log t``.
    """
    if max_order < 4:
        raise DomainError("custom potentials must supply derivatives up to order 4")
    if smooth is None:
        def smooth(t):
            return derivative(t, 0) - log_coefficient * math.log(t)
    return RadialPotential(PotentialKind.CUSTOM, derivative, float(log_coefficient),
                           smooth, int(max_order), value_hp, label)


_BY_NAME = {
    "flat": flat,
    "simanca": simanca,
    "eguchi-hanson": eguchi_hanson,
    "eguchihanson": eguchi_hanson,
    "eh": eguchi_hanson,
}


def from_name(name: str) -> RadialPotential:
    """Built-in potential by CLI name (``flat``, ``simanca``, ``eguchi-hanson``)."""
    try:
        return _BY_NAME[name.strip().lower().replace("_", "-")]()
    except KeyError:
        raise DomainError(f"unknown metric {name!r}; expected one of "
                          "flat, simanca, eguchi-hanson") from None
