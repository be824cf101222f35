"""Curvature of radial Kähler metrics and blow-up chart checks.

Conventions
-----------
For a potential ``Phi(t)``, ``t = |z|^2``, the metric is

    g_{i jbar} = Phi'(t) delta_ij + Phi''(t) conj(z_i) z_j,

with ``det g = Phi'^(n-1) (Phi' + t Phi'')``.  The curvature tensor is

    R_{i jbar k lbar} = -d_k dbar_l g_{i jbar}
                        + g^{p qbar} (d_k g_{i qbar}) (dbar_l g_{p jbar}),

its trace is ``Ric_{i jbar} = -d_i dbar_j log det g`` and the scalar curvature
is ``rho = g^{i jbar} Ric_{i jbar}``.  With these signs the complex projective
line ``Phi = log(1 + t)`` has ``rho = 2`` and Lu's coefficient ``a1 = rho/2``
matches the Bergman density ``m + 1``.  Note that this is the opposite sign of
``rho = -g^{i jbar} Ric_{i jbar}``, which makes ``a1 = -rho/2``.

Norms are taken in a unitary frame, and the Laplacian is
``LAPLACIAN_SCALE * g^{i jbar} d_i dbar_j``.

Radial metrics are unitarily invariant, so every pointwise invariant is
evaluated at ``(r, 0, ..., 0)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np

from . import fd
from ._jets import Jet
from .errors import DomainError
from .potentials import RadialPotential

__all__ = [
    "LAPLACIAN_SCALE",
    "CurvatureReport",
    "metric_at",
    "radial_determinant",
    "scalar_curvature_at",
    "curvature_invariants_at",
    "curvature_fd_oracle",
    "reports_agree",
    "chart_pullback_potential",
    "chart_metric",
    "chart_transition_check",
]

LAPLACIAN_SCALE = 1.0


@dataclass(frozen=True)
class CurvatureReport:
    r: float
    rho: float
    norm_R_sq: float
    norm_Ric_sq: float
    laplacian_rho: float
    a1: float
    a2: float

    @classmethod
    def assemble(cls, r, rho, norm_R_sq, norm_Ric_sq, laplacian_rho):
        a1 = rho / 2
        a2 = laplacian_rho / 3 + (norm_R_sq - 4 * norm_Ric_sq + 3 * rho ** 2) / 24
        return cls(float(r), float(rho), float(norm_R_sq), float(norm_Ric_sq),
                   float(laplacian_rho), float(a1), float(a2))

    def as_dict(self):
        return {
            "r": self.r,
            "rho": self.rho,
            "norm_R_sq": self.norm_R_sq,
            "norm_Ric_sq": self.norm_Ric_sq,
            "laplacian_rho": self.laplacian_rho,
            "a1": self.a1,
            "a2": self.a2,
        }


def _check_radius(r):
    if not r > 0:
        raise DomainError(f"curvature is evaluated at (r, 0, ..., 0) with r > 0, got {r!r}")


def _check_dim(n):
    if int(n) != n or n < 1:
        raise DomainError(f"dimension must be a positive integer, got {n!r}")


def metric_at(p: RadialPotential, n: int, z) -> np.ndarray:
    """Hermitian matrix ``G[i, j] = g_{i jbar}`` at ``z`` in C^n."""
    _check_dim(n)
    z = np.asarray(z, dtype=complex).reshape(-1)
    if z.shape != (n,):
        raise DomainError(f"expected a point of C^{n}, got shape {z.shape}")
    t = float(np.vdot(z, z).real)
    if t == 0.0:
        raise DomainError("radial potentials are singular at the origin")
    return p(t, 1) * np.eye(n) + p(t, 2) * np.outer(z.conj(), z)


def radial_determinant(p: RadialPotential, n: int, t: float) -> float:
    """``det g = Phi'(t)^(n-1) (Phi'(t) + t Phi''(t))``."""
    return p(t, 1) ** (n - 1) * (p(t, 1) + t * p(t, 2))


def _rho_jet(p, n, t, order):
    """Scalar curvature at radius^2 ``t`` as a jet in t.

    rho = -[(t L')' / G1 + (n - 1) L' / A], with A = Phi', G1 = (t Phi')'
    and L = log det g.
    """
    derivs = [p(t, k) for k in range(1, order + 5)]
    a = Jet.from_derivatives(derivs)           # Phi'
    tt = Jet.variable(t, a.order)
    g1 = a + tt * a.d()                         # radial eigenvalue
    logdet = (n - 1) * a.log() + g1.log()
    dl = logdet.d()
    tdl = Jet.variable(t, dl.order) * dl
    return -(tdl.d() / g1 + (n - 1) * dl / a)


def scalar_curvature_at(p: RadialPotential, n: int, r: float) -> float:
    """Scalar curvature ``g^{i jbar} Ric_{i jbar}`` at ``(r, 0, ..., 0)``."""
    _check_dim(n)
    _check_radius(r)
    return float(_rho_jet(p, n, r * r, 0).c[0])


def _laplacian_radial(p, n, t, f, df, d2f):
    # at (sqrt t, 0..0): d1 dbar1 f = f' + t f'', d_i dbar_i f = f' (i >= 2)
    g_radial = p(t, 1) + t * p(t, 2)
    g_tangent = p(t, 1)
    return LAPLACIAN_SCALE * ((df + t * d2f) / g_radial + (n - 1) * df / g_tangent)


def _rho_t_derivatives(p, n, t):
    if p.max_order >= 6:
        rho, d1, d2 = _rho_jet(p, n, t, 2).derivative_values()
        return rho, d1, d2
    # custom potentials without orders 5, 6: Richardson-extrapolated differences
    def rho_of(s):
        return float(_rho_jet(p, n, s, 0).c[0])

    def central(h):
        f_p, f_m, f_0 = rho_of(t + h), rho_of(t - h), rho_of(t)
        return (f_p - f_m) / (2 * h), (f_p - 2 * f_0 + f_m) / (h * h)

    h = 1e-3 * t
    (d1a, d2a), (d1b, d2b) = central(h), central(h / 2)
    return rho_of(t), (4 * d1b - d1a) / 3, (4 * d2b - d2a) / 3


def _metric_derivatives(p, n, z):
    """Exact ``d_k g_{i jbar}`` and ``d_k dbar_l g_{i jbar}`` at z."""
    zb = z.conj()
    t = float(np.vdot(z, z).real)
    f2, f3, f4 = p(t, 2), p(t, 3), p(t, 4)
    eye = np.eye(n)
    # dg[k, i, j]
    dg = (f2 * (np.einsum("k,ij->kij", zb, eye) + np.einsum("i,jk->kij", zb, eye))
          + f3 * np.einsum("i,k,j->kij", zb, zb, z))
    # ddg[k, l, i, j]
    ddg = (f3 * (np.einsum("l,k,ij->klij", z, zb, eye)
                 + np.einsum("l,i,jk->klij", z, zb, eye)
                 + np.einsum("il,k,j->klij", eye, zb, z)
                 + np.einsum("kl,i,j->klij", eye, zb, z))
           + f2 * (np.einsum("kl,ij->klij", eye, eye) + np.einsum("il,jk->klij", eye, eye))
           + f4 * np.einsum("l,i,k,j->klij", z, zb, zb, z))
    return dg, ddg


def _unitary_frame(g):
    # rows of w span a g-orthonormal frame: w g w^H = I
    return np.linalg.inv(np.linalg.cholesky(g))


def curvature_tensor_at(p: RadialPotential, n: int, z):
    """Metric ``G`` and curvature tensor ``R[i, j, k, l] = R_{i jbar k lbar}`` at z."""
    z = np.asarray(z, dtype=complex)
    g = metric_at(p, n, z)
    ginv = np.linalg.inv(g)
    dg, ddg = _metric_derivatives(p, n, z)
    # g^{p qbar} = ginv[q, p];  dbar_l g_{p jbar} = conj(d_l g_{j pbar})
    quad = np.einsum("qp,kiq,ljp->ijkl", ginv, dg, dg.conj())
    r = -np.einsum("klij->ijkl", ddg) + quad
    return g, r


def curvature_invariants_at(p: RadialPotential, n: int, r: float) -> CurvatureReport:
    """Scalar curvature, |R|^2, |Ric|^2, Laplacian of rho and Lu's a1, a2."""
    _check_dim(n)
    _check_radius(r)
    z = np.zeros(n, dtype=complex)
    z[0] = r
    g, rt = curvature_tensor_at(p, n, z)
    w = _unitary_frame(g)
    wc = w.conj()
    r_frame = np.einsum("ai,bj,ck,dl,ijkl->abcd", w, wc, w, wc, rt)
    ric_frame = np.einsum("abcc->ab", r_frame)
    rho = float(np.trace(ric_frame).real)
    norm_r = float(np.sum(np.abs(r_frame) ** 2))
    norm_ric = float(np.sum(np.abs(ric_frame) ** 2))
    t = r * r
    _, d1, d2 = _rho_t_derivatives(p, n, t)
    lap = _laplacian_radial(p, n, t, rho, d1, d2)
    return CurvatureReport.assemble(r, rho, norm_r, norm_ric, lap)


# -- finite-difference oracle ----------------------------------------------

def _hp_potential(p):
    if p.value_hp is not None:
        return p.value_hp
    return lambda t: p(t, 0)


def curvature_fd_oracle(p: RadialPotential, n: int, r: float) -> CurvatureReport:
    """Recompute :func:`curvature_invariants_at` from ``Phi`` values alone.

    All derivatives come from nested central differences in complex
    coordinates around ``(r, 0, ..., 0)``, carried out at ``fd.DPS`` digits.
    Ricci is formed as ``-d dbar log det g`` (not as a trace of R), and norms
    are contracted with the inverse metric rather than in a frame.
    """
    _check_dim(n)
    _check_radius(r)
    phi = _hp_potential(p)
    with fd.precision():
        h = fd.step_for(r)

        def kahler(w):
            return phi(fd.norm_sq(w))

        def metric(w):
            return fd.complex_hessian(kahler, w, h)

        def logdet(w):
            return fd.mp_logdet(metric(w))

        def ricci(w):
            return -fd.complex_hessian(logdet, w, h)

        def scalar(w):
            ginv = fd.mp_inverse(metric(w))
            return mpmath.re(np.sum(ginv.T * ricci(w)))

        z0 = fd.as_point([r] + [0] * (n - 1))
        g0 = metric(z0)
        ginv0 = fd.mp_inverse(g0)
        ric0 = ricci(z0)
        rho = mpmath.re(np.sum(ginv0.T * ric0))

        # off-diagonal inverse metric entries at the level of the step
        # truncation error contribute nothing measurable to the Laplacian
        tiny = mpmath.mpf(1e-9) * max(abs(ginv0[i, i]) for i in range(n))
        if all(abs(ginv0[i, j]) < tiny for i in range(n) for j in range(n) if i != j):
            lap = mpmath.mpf(0)
            for i in range(n):
                e = [mpmath.mpc(0)] * n
                e[i] = mpmath.mpc(1)
                lap += ginv0[i, i] * mpmath.re(fd._levi_quadratic(scalar, z0, e, h, scalar(z0)))
        else:
            hess = fd.complex_hessian(scalar, z0, h)
            lap = mpmath.re(np.sum(ginv0.T * hess))
        lap = mpmath.re(lap) * LAPLACIAN_SCALE

        dg = fd.holomorphic_gradient(metric, z0, h)      # [k, i, j]
        ddg = fd.complex_hessian(metric, z0, h)          # [k, l, i, j]

        ginv_c = fd.to_complex(ginv0)
        dg_c, ddg_c, ric_c = fd.to_complex(dg), fd.to_complex(ddg), fd.to_complex(ric0)

    quad = np.einsum("qp,kiq,ljp->ijkl", ginv_c, dg_c, dg_c.conj())
    rt = -np.einsum("klij->ijkl", ddg_c) + quad
    # g^{i jbar} = ginv[j, i]
    hinv = ginv_c
    norm_r = np.einsum("ijkl,abcd,ai,jb,ck,ld->", rt, rt.conj(), hinv, hinv, hinv, hinv)
    norm_ric = np.einsum("ij,ab,ai,jb->", ric_c, ric_c.conj(), hinv, hinv)
    return CurvatureReport.assemble(r, float(rho), float(norm_r.real), float(norm_ric.real),
                                    float(lap))


def reports_agree(exact: CurvatureReport, oracle: CurvatureReport, rel=1e-6, zero_abs=1e-8):
    """Field-by-field comparison; returns ``(ok, worst_field, worst_error)``.

    A field whose exact value is below ``zero_abs`` in magnitude is compared
    in absolute terms, every other field relatively.
    """
    errors = {}
    failed = {}
    for key, ev in exact.as_dict().items():
        diff = abs(getattr(oracle, key) - ev)
        if abs(ev) < zero_abs:
            errors[key], ok = diff, diff <= zero_abs
        else:
            errors[key], ok = diff / abs(ev), diff <= rel * abs(ev)
        if not ok:
            failed[key] = errors[key]
    pool = failed or errors
    key = max(pool, key=pool.get)
    return not failed, key, pool[key]


# -- blow-up of C^2 ----------------------------------------------------------

def _chart_potential(chart, w1, w2, log1p):
    a, b = abs(w1) ** 2, abs(w2) ** 2
    if chart == 1:
        return a * (1 + b) + log1p(b)
    if chart == 2:
        return b * (1 + a) + log1p(a)
    raise DomainError(f"chart must be 1 or 2, got {chart!r}")


def chart_pullback_potential(chart: int, w) -> float:
    """Local potential of the Simanca form on the blow-up of C^2.

    Chart 1 parametrizes ``(w1, w1 w2, [1, w2])`` and chart 2
    ``(w1 w2, w2, [w1, 1])``.  Both are smooth across the exceptional divisor.
    """
    w1, w2 = complex(w[0]), complex(w[1])
    return float(_chart_potential(chart, w1, w2, math.log1p))


def _chart_hp(chart):
    return lambda w: _chart_potential(chart, w[0], w[1], mpmath.log1p)


def chart_metric(chart: int, w) -> np.ndarray:
    """Metric of the chart potential at ``w`` by high-precision differences."""
    with fd.precision():
        pt = fd.as_point(w)
        scale = max(1.0, *(abs(complex(v)) for v in w))
        g = fd.complex_hessian(_chart_hp(chart), pt, fd.step_for(scale))
        return fd.to_complex(g)


def chart_transition_check(w) -> float:
    """Largest entry of ``G1 - J^T G2 conj(J)`` on the chart overlap.

    ``w`` is a chart-1 point; it is mapped to chart 2 by
    ``(w1, w2) -> (1/w2, w1 w2)`` with holomorphic Jacobian ``J``.
    """
    w1, w2 = complex(w[0]), complex(w[1])
    if w1 == 0 or w2 == 0:
        raise DomainError("point is not in the chart overlap (underlying point of C^2 "
                          "must have both coordinates nonzero)")
    v = (1 / w2, w1 * w2)
    g1 = chart_metric(1, (w1, w2))
    g2 = chart_metric(2, v)
    # jac[a, i] = d v_a / d w_i
    jac = np.array([[0.0, -1 / w2 ** 2], [w2, w1]], dtype=complex)
    pulled = jac.T @ g2 @ jac.conj()
    return float(np.max(np.abs(g1 - pulled)))
