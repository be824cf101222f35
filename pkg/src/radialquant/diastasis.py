"""Calabi's diastasis and the two sufficient conditions for Berezin quantization.

For a radial potential ``Phi(|z|^2)`` with sesquianalytic extension
``Phi(x, ybar) = F(<x, y>)``, ``<x, y> = sum x_i conj(y_i)``, the diastasis is

    D(x, y) = F(|x|^2) + F(|y|^2) - 2 Re F(<x, y>).

Only ``Re log <x, y> = log |<x, y>|`` enters, so no branch of the logarithm
has to be chosen.  Where ``<x, y> = 0`` the diastasis is infinite.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import DomainError, NoClosedFormError
from .potentials import PotentialKind, RadialPotential
from .quantization import QuantizationSetup, balanced_check

__all__ = [
    "DiastasisValue",
    "BerezinReport",
    "diastasis_eval",
    "fubini_study_embedding_check",
    "berezin_condition_check",
    "COINCIDENCE_TOL",
    "BALANCE_THRESHOLD",
]

COINCIDENCE_TOL = 1e-12
BALANCE_THRESHOLD = 1e-9


@dataclass(frozen=True)
class DiastasisValue:
    d: float
    exp_neg_d: float

    def __post_init__(self):
        if not self.d >= 0:
            raise ValueError(f"diastasis must be nonnegative, got {self.d}")
        if not 0.0 <= self.exp_neg_d <= 1.0:
            raise ValueError(f"exp(-D) must lie in [0, 1], got {self.exp_neg_d}")


def _vector(v):
    a = np.atleast_1d(np.asarray(v, dtype=complex))
    if a.ndim != 1:
        raise DomainError("points must be complex vectors")
    return a


def _key(v):
    return tuple(itertools.chain.from_iterable((c.real, c.imag) for c in v))


def _cross_norm(x, y):
    # |x|^2 |y|^2 - |<x,y>|^2 as a sum of squares (Lagrange identity)
    n = len(x)
    total = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            w = x[i] * y[j] - x[j] * y[i]
            total += w.real * w.real + w.imag * w.imag
    return total


def diastasis_eval(p: RadialPotential, x, y) -> DiastasisValue:
    """Diastasis of the flat or Simanca potential between ``x`` and ``y``.

    Simanca: ``D = |x - y|^2 + log(|x|^2 |y|^2 / |<x, y>|^2)``, the second
    term computed as ``log1p`` of a sum of squares so that it stays accurate
    when ``x`` and ``y`` are nearly parallel.  The pair is put in a canonical
    order first, so ``D(x, y) == D(y, x)`` holds exactly in floating point.
    """
    x, y = _vector(x), _vector(y)
    if x.shape != y.shape:
        raise DomainError("x and y must have the same dimension")
    if not np.any(x) or not np.any(y):
        raise DomainError("diastasis is evaluated away from the origin")
    if _key(y) < _key(x):
        x, y = y, x
    diff = x - y
    dist = float(np.sum(diff.real ** 2 + diff.imag ** 2))
    if p.kind is PotentialKind.FLAT:
        return DiastasisValue(dist, math.exp(-dist))
    if p.kind is not PotentialKind.SIMANCA:
        raise NoClosedFormError(f"no sesquianalytic extension for the {p.name} potential")
    inner = complex(np.sum(x * np.conj(y)))
    inner_sq = inner.real ** 2 + inner.imag ** 2
    if inner_sq == 0.0:
        return DiastasisValue(math.inf, 0.0)
    d = dist + math.log1p(_cross_norm(x, y) / inner_sq)
    return DiastasisValue(d, math.exp(-d))


def _embedding_degree(s, tol):
    # smallest N with sum_{J>N} J s^J / J! <= tol * s e^s
    if s == 0:
        return 1
    log_total = math.log(s) + s
    n = max(1, int(s))
    while True:
        # terms past the peak decrease geometrically with ratio s / J
        log_term = math.log(n + 1) + (n + 1) * math.log(s) - math.lgamma(n + 2)
        ratio = s / (n + 1)
        if ratio < 0.5 and log_term - math.log1p(-ratio) <= math.log(tol) + log_total:
            return n
        n += 1


def _embedding(z, degree):
    # coordinates sqrt(J / (j! k!)) z1^j z2^k for 1 <= J = j + k <= degree
    z1, z2 = complex(z[0]), complex(z[1])
    out = []
    for total in range(1, degree + 1):
        for j in range(total + 1):
            k = total - j
            coef = math.exp(0.5 * (math.log(total) - math.lgamma(j + 1) - math.lgamma(k + 1)))
            out.append(coef * z1 ** j * z2 ** k)
    return np.array(out)


def fubini_study_embedding_check(x, y, tol: float = 1e-12) -> float:
    """``exp(-D_FS)`` between the truncated embedded images of ``x, y`` in C^2.

    The map ``z -> [sqrt((j+k)/(j!k!)) z1^j z2^k]`` pulls the Fubini-Study
    potential back to ``log(|z|^2 e^(|z|^2))``.  The truncation degree keeps
    the dropped tail of every inner product below ``tol`` relative.
    """
    x, y = _vector(x), _vector(y)
    if x.shape != (2,) or y.shape != (2,):
        raise DomainError("the embedding check is implemented for n = 2")
    s = max(float(np.vdot(x, x).real), float(np.vdot(y, y).real))
    degree = _embedding_degree(s, tol)
    u, v = _embedding(x, degree), _embedding(y, degree)
    uv = np.vdot(v, u)
    return float(abs(uv) ** 2 / (np.vdot(u, u).real * np.vdot(v, v).real))


@dataclass(frozen=True)
class BerezinReport:
    """Outcome of the two sufficient conditions.

    ``cond1_deviation`` is the worst relative deviation of epsilon from its
    mean over all levels.  ``cond2_max_exp`` is the largest ``exp(-D)`` seen
    on non-coincident pairs.
    """

    cond1_deviation: float
    cond1_pass: bool
    cond2_max_exp: float
    cond2_violations: int
    cond2_pass: bool
    pairs: int
    levels: tuple

    @property
    def passed(self):
        return self.cond1_pass and self.cond2_pass


def berezin_condition_check(setup: QuantizationSetup, sample_pairs: Sequence,
                            t_grid: Sequence[float],
                            m_values: Optional[Sequence[int]] = None) -> BerezinReport:
    """Check constancy of epsilon and the global bound ``0 <= exp(-D) <= 1``.

    Condition 2 also requires ``exp(-D) = 1`` (equivalently ``D = 0``) only
    for pairs within :data:`COINCIDENCE_TOL` of each other.
    """
    pairs = list(sample_pairs)
    if not pairs:
        raise DomainError("sample_pairs must be nonempty")
    levels = tuple(int(m) for m in m_values) if m_values else (setup.m,)
    dev = max(balanced_check(setup.with_level(m), t_grid).max_rel_deviation for m in levels)
    worst = 0.0
    bad = 0
    for x, y in pairs:
        val = diastasis_eval(setup.potential, x, y)
        coincident = np.linalg.norm(_vector(x) - _vector(y)) <= COINCIDENCE_TOL
        if not 0.0 <= val.exp_neg_d <= 1.0:
            bad += 1
        elif not coincident:
            worst = max(worst, val.exp_neg_d)
            if val.d <= 0.0:
                bad += 1
    return BerezinReport(dev, dev <= BALANCE_THRESHOLD, worst, bad, bad == 0,
                         len(pairs), levels)
