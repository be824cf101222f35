"""Holomorphic sections, monomial norms and the Rawnsley epsilon function.

The line bundle ``L^m`` is modelled by its weight: a section is a holomorphic
function ``f`` on C^n vanishing to order ``>= min_order`` at 0, with

    ||f||^2 = int |f|^2 exp(-m Phi(|z|^2)) det g  d mu,
    d mu = (i/2pi)^n dz_1 ^ dzbar_1 ^ ... ^ dz_n ^ dzbar_n.

For a radial potential the monomials are orthogonal and

    ||z^j||^2 = prod(j_i!) / Gamma(J + n) * R(J),
    R(J)      = int_0^inf t^(J+n-1) exp(-m Phi(t)) det g(t) dt,

where ``J = |j|``.  Summing over ``|j| = J`` with the multinomial identity
collapses the epsilon function to a single series in J.
"""
from __future__ import annotations

import dataclasses
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np
from scipy import integrate

from .errors import (DivergenceError, DomainError, NoClosedFormError,
                     NotASectionError, PrecisionError)
from .potentials import PotentialKind, RadialPotential, from_name
from .specfun import (SpecialValue, angular_beta_integral, kummer_truncated,
                      kummer_truncated_exact, log_gamma_fn)

__all__ = [
    "MultiIndex",
    "QuantizationSetup",
    "EpsilonResult",
    "BalanceReport",
    "TyzFit",
    "monomial_norm_closed",
    "monomial_norm_quadrature",
    "radial_moment",
    "epsilon",
    "epsilon_partial",
    "epsilon_series_terms",
    "balanced_check",
    "e13_ratio",
    "asymptotic_ratio_fit",
    "tyz_fit",
    "coherent_pullback_check",
    "embedding_series_check",
]


@dataclass(frozen=True)
class MultiIndex:
    exponents: tuple

    def __post_init__(self):
        exps = tuple(int(e) for e in self.exponents)
        if any(e < 0 for e in exps) or not exps:
            raise DomainError(f"exponents must be a nonempty vector of integers >= 0, got {exps}")
        object.__setattr__(self, "exponents", exps)

    @property
    def total(self) -> int:
        return sum(self.exponents)

    @property
    def n(self) -> int:
        return len(self.exponents)


def _as_index(idx) -> MultiIndex:
    return idx if isinstance(idx, MultiIndex) else MultiIndex(tuple(idx))


@dataclass(frozen=True)
class QuantizationSetup:
    """Dimension ``n``, quantum level ``m`` (so hbar = 1/m) and the potential.

    ``min_order`` defaults to ``m * log_coefficient``: ``m`` for the blow-up
    models, 0 for C^n with the flat metric.  ``tail_tol`` is relative to the
    epsilon value; ``max_terms`` caps the series length.  The Hilbert space is
    infinite dimensional here and is never materialized.
    """

    n: int
    m: int
    potential: RadialPotential
    min_order: Optional[int] = None
    max_terms: int = 20000
    tail_tol: float = 1e-15
    quad_epsrel: float = 1e-12
    quad_limit: int = 400

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise DomainError(f"n must be an integer >= 1, got {self.n!r}")
        if int(self.m) != self.m or self.m < 1:
            raise DomainError(f"m must be an integer >= 1, got {self.m!r}")
        order = self.m * self.potential.log_coefficient
        if self.min_order is None:
            if order != int(order):
                raise DomainError("m * log_coefficient must be an integer")
            object.__setattr__(self, "min_order", int(order))
        if self.min_order not in (0, self.m):
            raise DomainError(f"min_order must be 0 or m, got {self.min_order!r}")
        if self.min_order < order:
            raise DomainError("min_order below the log pole order gives divergent norms")
        if not self.tail_tol > 0 or not self.quad_epsrel > 0:
            raise DomainError("tolerances must be positive")
        if self.max_terms < 1:
            raise DomainError("max_terms must be positive")

    def with_level(self, m):
        return dataclasses.replace(self, m=int(m), min_order=None)


@dataclass(frozen=True)
class EpsilonResult:
    value: float
    terms_used: int
    tail_bound: float


# -- norms -------------------------------------------------------------------

def _require_section(setup, idx):
    if idx.n != setup.n:
        raise DomainError(f"multi-index has {idx.n} entries, setup has n={setup.n}")
    if idx.total < setup.min_order:
        raise NotASectionError(
            f"z^{idx.exponents} vanishes to order {idx.total} < {setup.min_order}; "
            "not a section")


def _log_radial_closed(setup, total):
    """log R(J) for potentials with a closed form."""
    n, m = setup.n, setup.m
    kind = setup.potential.kind
    if kind is PotentialKind.SIMANCA and setup.min_order == m:
        k = total - m
        fk = kummer_truncated(n, 1 + m - n - total, m)
        return (m - n - total) * math.log(m) + log_gamma_fn(k + n) + math.log(fk)
    if kind is PotentialKind.FLAT:
        return log_gamma_fn(total + n) - (total + n) * math.log(m)
    raise NoClosedFormError(f"no closed-form norm for the {setup.potential.name} potential")


def _has_closed_form(setup):
    kind = setup.potential.kind
    return kind is PotentialKind.FLAT or (kind is PotentialKind.SIMANCA
                                          and setup.min_order == setup.m)


def monomial_norm_closed(setup: QuantizationSetup, idx) -> float:
    """Squared norm of ``z^idx`` from the Gamma/Kummer closed form.

    Simanca:  m^(m-n-J) prod(j!) Gamma(J-m+n)/Gamma(J+n) 1F1(1-n, 1+m-n-J, m).
    Flat:     prod(j!) / m^(J+n).
    """
    idx = _as_index(idx)
    _require_section(setup, idx)
    log_fact = sum(math.lgamma(j + 1) for j in idx.exponents)
    log_r = _log_radial_closed(setup, idx.total)
    return math.exp(log_fact - log_gamma_fn(idx.total + setup.n) + log_r)


def _log_integrand(potential, n, m, shift):
    # log of r^(2 shift + 1) (t Phi')^(n-1) (Phi' + t Phi'') exp(-m smooth(t)), t = r^2
    def f(r):
        t = r * r
        d1 = potential(t, 1)
        vol = (t * d1) ** (n - 1) * (d1 + t * potential(t, 2))
        if vol <= 0:
            # the log pole cancels in Phi' + t Phi''; below t ~ 1e-6 the
            # remainder is rounding noise and the region carries no weight
            if t < 1e-6:
                return -math.inf
            raise DomainError(f"metric is not positive at t={t}")
        return (2 * shift + 1) * math.log(r) + math.log(vol) - m * potential.smooth(t)
    return f


def _radial_moment(potential, n, m, total, epsrel, limit) -> SpecialValue:
    shift = total - m * potential.log_coefficient
    if shift < 0:
        raise DivergenceError("norm integral diverges at the origin")
    logf = _log_integrand(potential, n, m, shift)
    grid = np.geomspace(1e-4, 1e3, 281)
    logs = np.array([logf(r) for r in grid])
    top = int(np.argmax(logs))
    peak = logs[top]
    below = np.nonzero(logs[top:] < peak - 80.0)[0]
    if below.size == 0:
        raise DivergenceError(f"integrand for J={total} does not decay; the norm diverges")
    cut = float(grid[top + below[0]])

    def scaled(r):
        if r <= 0:
            return 0.0
        v = logf(r)
        return math.exp(v - peak) if v > -math.inf else 0.0

    rpk = float(grid[top])
    parts = [(0.0, rpk), (rpk, cut)]
    value = err = 0.0
    for lo, hi in parts:
        v, e = integrate.quad(scaled, lo, hi, epsabs=0.0, epsrel=epsrel, limit=limit)
        value += v
        err += e
    # log-concave tail beyond the cut: int_cut^inf f <= f(cut) / |(log f)'(cut)|
    h = 1e-6 * cut
    slope = (logf(cut + h) - logf(cut - h)) / (2 * h)
    if slope >= 0:
        raise DivergenceError("integrand is not decaying past the quadrature cutoff")
    err += scaled(cut) / -slope
    scale = math.exp(peak)
    if not math.isfinite(scale * value):
        raise PrecisionError(f"radial moment for J={total} overflows")
    return SpecialValue(2.0 * value * scale, 2.0 * err * scale)


@lru_cache(maxsize=None)
def _radial_moment_builtin(kind_value, n, m, total, epsrel, limit):
    return _radial_moment(from_name(kind_value), n, m, total, epsrel, limit)


def radial_moment(setup: QuantizationSetup, total: int) -> SpecialValue:
    """``R(J)`` by adaptive Gauss-Kronrod quadrature in ``r = sqrt(t)``."""
    p = setup.potential
    if p.kind is PotentialKind.CUSTOM:
        return _radial_moment(p, setup.n, setup.m, total, setup.quad_epsrel, setup.quad_limit)
    return _radial_moment_builtin(p.kind.value, setup.n, setup.m, int(total),
                                  setup.quad_epsrel, setup.quad_limit)


def monomial_norm_quadrature(setup: QuantizationSetup, idx) -> float:
    """Squared norm of ``z^idx`` from exact angular factors and radial quadrature.

    Hyperspherical coordinates split the integral into n - 1 angular Beta
    integrals times one radial integral; only the latter is numerical.
    Works for any radial potential.
    """
    idx = _as_index(idx)
    _require_section(setup, idx)
    n, exps = setup.n, idx.exponents
    angular = 1.0
    for i in range(n - 1):
        rest = sum(exps[i + 1:]) + (n - 2 - i)
        angular *= angular_beta_integral(exps[i], rest)
    # 2^n angular * int r^(2J+2n-1) ... dr, and R(J) = 2 int ... dr
    return 2 ** (n - 1) * angular * radial_moment(setup, idx.total).value


# -- epsilon -------------------------------------------------------------------

def e13_ratio(n: int, m: int, k: int) -> Fraction:
    """``k!(k+m+n-1)! / ((k+m)!(k+n-1)! 1F1(1-n, 1-k-n, m))`` exactly."""
    num = math.prod(k + m + i for i in range(1, n))
    den = math.prod(k + i for i in range(1, n))
    return Fraction(num, den) / kummer_truncated_exact(n, 1 - k - n, m)


def _ratio_float(n, m, k):
    num = math.prod(k + m + i for i in range(1, n))
    den = math.prod(k + i for i in range(1, n))
    return num / (den * kummer_truncated(n, 1 - k - n, m))


def _ratio_bound(setup):
    # the ratio is a weighted mean of m^(s rising)/m^s, s <= n-1
    if setup.potential.kind is PotentialKind.FLAT:
        return 1.0
    m = setup.m
    return math.prod((m + s) / m for s in range(setup.n - 1))


def _log_poisson(x, k):
    if x == 0.0:
        return 0.0 if k == 0 else -math.inf
    return -x + k * math.log(x) - math.lgamma(k + 1)


def _poisson_tail_bound(x, k_last):
    """Upper bound for sum_{k > k_last} exp(-x) x^k / k!."""
    nxt = k_last + 1
    if nxt + 1 <= x:
        return 1.0
    bound = math.exp(_log_poisson(x, nxt)) / (1.0 - x / (nxt + 1))
    return min(1.0, bound)


class _Series:
    """Terms of epsilon(t) indexed by k = J - min_order."""

    def __init__(self, setup, t):
        if not t > 0:
            raise DomainError(f"epsilon is defined for t > 0, got t={t!r}")
        self.setup = setup
        self.t = float(t)
        self.closed = _has_closed_form(setup)
        p = setup.potential
        m, n = setup.m, setup.n
        self.x = m * self.t
        if self.closed:
            self.scale = float(m) ** n
            self.ratio_max = _ratio_bound(setup)
        else:
            self.log_weight = -m * p.smooth(self.t)
            self.log_t = math.log(self.t)
        self._prev = None

    def term(self, k):
        s = self.setup
        if self.closed:
            pois = math.exp(_log_poisson(self.x, k))
            if s.potential.kind is PotentialKind.FLAT:
                return self.scale * pois
            return self.scale * pois * _ratio_float(s.n, s.m, k)
        total = s.min_order + k
        # weight t^(-m c) and t^J combined before exponentiating
        power = total - s.m * s.potential.log_coefficient
        log_r = math.log(radial_moment(s, total).value)
        return math.exp(self.log_weight + power * self.log_t + math.lgamma(total + s.n)
                        - math.lgamma(total + 1) - log_r)

    def tail_bound(self, k_last, last_terms):
        if self.closed:
            return self.scale * self.ratio_max * _poisson_tail_bound(self.x, k_last)
        # no closed form: geometric extrapolation of the last term ratio
        a, b = last_terms
        if a <= 0 or b >= a:
            return math.inf
        q = b / a
        return b * q / (1 - q)


def epsilon_series_terms(setup: QuantizationSetup, t: float, count: int) -> list:
    """The first ``count`` summands of epsilon(t), indexed by ``J - min_order``."""
    series = _Series(setup, t)
    return [series.term(k) for k in range(count)]


def epsilon_partial(setup: QuantizationSetup, t: float, terms: int) -> EpsilonResult:
    """Epsilon truncated after exactly ``terms`` summands, with its tail bound."""
    if terms < 1:
        raise DomainError("at least one term is required")
    series = _Series(setup, t)
    vals = [series.term(k) for k in range(terms)]
    last = (vals[-2], vals[-1]) if terms >= 2 else (math.inf, vals[-1])
    return EpsilonResult(math.fsum(vals), terms, series.tail_bound(terms - 1, last))


def epsilon(setup: QuantizationSetup, t: float) -> EpsilonResult:
    """Rawnsley's epsilon function at ``|z|^2 = t``.

    Summation stops once the tail bound drops below ``tail_tol * value``.
    For the Simanca and flat potentials the bound is rigorous (a Poisson
    remainder times a uniform bound on the Kummer ratio); for other
    potentials it extrapolates the decay of the last two terms.

    Raises
    ------
    PrecisionError
        If ``max_terms`` is exhausted first; ``partial`` holds the result so far.
    """
    series = _Series(setup, t)
    vals = []
    prev = math.inf
    bound = math.inf
    for k in range(setup.max_terms):
        term = series.term(k)
        vals.append(term)
        # cheap rejection before the past-the-mode region
        if k + 2 <= series.x if series.closed else k < 2:
            prev = term
            continue
        total = math.fsum(vals)
        bound = series.tail_bound(k, (prev, term))
        prev = term
        if bound <= setup.tail_tol * total:
            return EpsilonResult(total, k + 1, bound)
    partial = EpsilonResult(math.fsum(vals), len(vals), bound)
    raise PrecisionError(
        f"epsilon at t={t} did not converge in {setup.max_terms} terms "
        f"(tail bound {bound:.3g})", partial=partial)


@dataclass(frozen=True)
class BalanceReport:
    max_rel_deviation: float
    mean: float
    t_grid: tuple
    values: tuple

    def passed(self, threshold):
        return self.max_rel_deviation <= threshold


def balanced_check(setup: QuantizationSetup, t_grid: Sequence[float]) -> BalanceReport:
    """Max relative deviation of epsilon from its mean over ``t_grid``."""
    grid = tuple(float(t) for t in t_grid)
    if not grid:
        raise DomainError("t_grid must be nonempty")
    values = tuple(epsilon(setup, t).value for t in grid)
    mean = math.fsum(values) / len(values)
    dev = max(abs(v - mean) for v in values) / mean
    return BalanceReport(dev, mean, grid, values)


# -- asymptotics and TYZ -------------------------------------------------------

def asymptotic_ratio_fit(setup: QuantizationSetup, k_range: Sequence[int]) -> float:
    """Fit ``c`` in ``ratio_k ~ 1 + c / k^2`` over the upper half of ``k_range``.

    The ratio is evaluated in exact rational arithmetic, so ``ratio_k - 1``
    carries no cancellation even at k ~ 10^4.
    """
    if setup.potential.kind is not PotentialKind.SIMANCA:
        raise DomainError("the large-k ratio is defined for the Simanca family")
    ks = sorted(int(k) for k in k_range)
    if not ks or ks[-1] < 100:
        raise DomainError("k_range must reach at least k = 100")
    upper = ks[len(ks) // 2:]
    excess = np.array([float(e13_ratio(setup.n, setup.m, k) - 1) for k in upper])
    inv_sq = 1.0 / np.array(upper, dtype=float) ** 2
    return float(np.dot(excess, inv_sq) / np.dot(inv_sq, inv_sq))


@dataclass(frozen=True)
class TyzFit:
    """Coefficients of epsilon ~ sum_j a_j m^(n-j) fitted over ``m_range``.

    ``residual`` is the RMS misfit of epsilon / m^n.
    """

    coefficients: tuple
    residual: float
    m_range: tuple
    condition_number: float
    ill_conditioned: bool = False
    note: str = ""


TYZ_CONDITION_LIMIT = 1e10


def tyz_fit(setup: QuantizationSetup, t: float, m_range: Sequence[int], K: int) -> TyzFit:
    """Least-squares TYZ coefficients ``a_0 .. a_K`` at ``|z|^2 = t``.

    The model is fitted to ``epsilon / m^n = sum_j a_j m^-j`` with equal
    weights.  For noncompact metrics without a constant epsilon the
    expansion is an assumption, which the returned ``note`` records.
    """
    ms = tuple(int(m) for m in m_range)
    if len(ms) < K + 3:
        raise DomainError(f"need at least K + 3 = {K + 3} levels, got {len(ms)}")
    n = setup.n
    y = np.array([epsilon(setup.with_level(m), t).value / float(m) ** n for m in ms])
    mm = np.array(ms, dtype=float)
    design = np.stack([mm ** -j for j in range(K + 1)], axis=1)
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = float(np.sqrt(np.mean((design @ coef - y) ** 2)))
    cond = float(np.linalg.cond(design))
    bad = cond > TYZ_CONDITION_LIMIT
    if bad:
        warnings.warn(f"TYZ design matrix is ill-conditioned (cond={cond:.3g})",
                      RuntimeWarning, stacklevel=2)
    note = ""
    if setup.potential.kind is not PotentialKind.FLAT and not (
            setup.potential.kind is PotentialKind.SIMANCA and n == 2):
        note = "TYZ expansion assumed, not established, for this noncompact metric"
    return TyzFit(tuple(float(c) for c in coef), resid, ms, cond, bad, note)


# -- coherent states map -------------------------------------------------------

def _pullback_log_derivatives(setup, t):
    """(P', P'') of P(t) = log sum_J |s_J|^2, summed termwise."""
    series = _Series(setup, t)
    eps = epsilon(setup, t)
    count = eps.terms_used + 40
    logs = []
    for k in range(count):
        term = series.term(k)
        logs.append(math.log(term) if term > 0 else -math.inf)
    logs = np.array(logs)
    w = np.exp(logs - logs.max())
    w /= w.sum()
    j = setup.min_order + np.arange(count, dtype=float)
    d1 = float(np.dot(w, j)) / t
    d2 = float(np.dot(w, j * (j - 1))) / t ** 2 - d1 ** 2
    return d1, d2


def _log_epsilon_derivatives(setup, t):
    def f(s):
        return math.log(epsilon(setup, s).value)

    def central(h):
        fp, fm, f0 = f(t + h), f(t - h), f(t)
        return (fp - fm) / (2 * h), (fp - 2 * f0 + fm) / (h * h)

    h = 1e-3 * t
    (a1, a2), (b1, b2), (c1, c2) = central(h), central(h / 2), central(h / 4)
    # two Richardson levels for O(h^2) central differences
    r1 = ((4 * b1 - a1) / 3, (4 * b2 - a2) / 3)
    r2 = ((4 * c1 - b1) / 3, (4 * c2 - b2) / 3)
    return (16 * r2[0] - r1[0]) / 15, (16 * r2[1] - r1[1]) / 15


def coherent_pullback_check(setup: QuantizationSetup, t: float) -> float:
    """Residual of ``phi_m^* omega_FS = m omega + i/2pi ddbar log epsilon``.

    The left side comes from the pulled-back potential ``log sum |s_J|^2``
    differentiated termwise; the right side from exact derivatives of ``Phi``
    plus finite differences of ``log epsilon``.  Both are compared through
    the two eigenvalues of a radial metric, ``f'`` and ``(t f')'``.
    """
    if not t > 0:
        raise DomainError(f"t must be positive, got {t!r}")
    p, m = setup.potential, setup.m
    pd1, pd2 = _pullback_log_derivatives(setup, t)
    ed1, ed2 = _log_epsilon_derivatives(setup, t)
    rd1 = m * p(t, 1) + ed1
    rd2 = m * p(t, 2) + ed2
    tangential = abs(pd1 - rd1)
    radial = abs((pd1 + t * pd2) - (rd1 + t * rd2))
    return max(tangential, radial)


def embedding_series_check(a: float, b: float, N: int) -> float:
    """``sum_{1 <= j+k <= N} (j+k)/(j! k!) a^j b^k``; tends to ``(a+b) e^(a+b)``."""
    if N < 1:
        raise DomainError("N must be >= 1")
    if a < 0 or b < 0:
        raise DomainError("a and b must be nonnegative")
    terms = []
    for total in range(1, N + 1):
        for j in range(total + 1):
            k = total - j
            terms.append(total / (math.factorial(j) * math.factorial(k)) * a ** j * b ** k)
    return math.fsum(terms)
