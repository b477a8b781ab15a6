"""Positive orthant probabilities of zero-mean multivariate normal vectors
in dimensions 2-4.

The quadrivariate case is reduced to three 1-D arcsine integrals; each is
evaluated by adaptive Gauss-Kronrod quadrature. Near-singular correlation
matrices (needed at the correlation-one anchor points) are handled by a
sine substitution that removes the endpoint singularity and by guarded
evaluation of the arcsine argument.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .quadrature import QuadratureSettings, integrate_adaptive

_PSD_TOL = -1e-10
_SINGULAR_SWITCH = 1e-8  # use the sine substitution when |rho_1l| > 1 - this
_BG_FLOOR = 1e-14


@dataclass(frozen=True)
class CorrelationMatrix4:
    """Symmetric 4x4 unit-diagonal correlation matrix, PSD within tolerance."""

    rho: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.rho, dtype=float)
        object.__setattr__(self, "rho", r)
        if r.shape != (4, 4):
            raise DomainError("correlation matrix must be 4x4")
        if not np.allclose(r, r.T, atol=1e-12):
            raise DomainError("correlation matrix must be symmetric")
        if not np.allclose(np.diag(r), 1.0, atol=1e-12):
            raise DomainError("correlation matrix must have unit diagonal")
        if np.abs(r).max() > 1 + 1e-12:
            raise DomainError("correlations must lie in [-1, 1]")
        if np.linalg.eigvalsh(r).min() < _PSD_TOL:
            raise DomainError("correlation matrix is not positive semidefinite")

    @classmethod
    def from_upper(cls, r12, r13, r14, r23, r24, r34) -> "CorrelationMatrix4":
        m = np.array([
            [1.0, r12, r13, r14],
            [r12, 1.0, r23, r24],
            [r13, r23, 1.0, r34],
            [r14, r24, r34, 1.0],
        ])
        return cls(rho=m)


def orthant_p2(rho12: float, settings: QuadratureSettings | None = None) -> float:
    """P(Z1 > 0, Z2 > 0) for a standard bivariate normal pair."""
    clamp = (settings or QuadratureSettings()).clamp_eps
    if abs(rho12) > 1 + clamp:
        raise DomainError(f"|rho12| = {abs(rho12)} exceeds 1")
    r = min(1.0, max(-1.0, rho12))
    return 0.25 * (1 + 2 / math.pi * math.asin(r))


def orthant_p3(rho12: float, rho13: float, rho23: float,
               settings: QuadratureSettings | None = None) -> float:
    """Trivariate positive orthant probability (closed form)."""
    m = np.array([[1, rho12, rho13], [rho12, 1, rho23], [rho13, rho23, 1.0]])
    if np.linalg.eigvalsh(m).min() < _PSD_TOL:
        raise DomainError("3x3 correlation matrix is not positive semidefinite")
    s = sum(math.asin(min(1.0, max(-1.0, v))) for v in (rho12, rho13, rho23))
    return 0.125 * (1 + 2 / math.pi * s)


def _abg_coeffs(r: np.ndarray, ell: int):
    """Polynomial coefficients of alpha/beta/gamma in u^2 for leg ell in {1,2,3}
    (0-based index of the partner variable)."""
    r12, r13, r14 = r[0, 1], r[0, 2], r[0, 3]
    r23, r24, r34 = r[1, 2], r[1, 3], r[2, 3]
    if ell == 1:
        a0 = r34 - r23 * r24
        a2 = r13 * r14 + r12 * (r12 * r34 - r14 * r23 - r13 * r24)
        b0, b2 = 1 - r23 ** 2, r12 ** 2 + r13 ** 2 - 2 * r12 * r13 * r23
        g0, g2 = 1 - r24 ** 2, r12 ** 2 + r14 ** 2 - 2 * r12 * r14 * r24
    elif ell == 2:
        a0 = r24 - r23 * r34
        a2 = r12 * r14 + r13 * (r13 * r24 - r14 * r23 - r12 * r34)
        b0, b2 = 1 - r23 ** 2, r12 ** 2 + r13 ** 2 - 2 * r12 * r13 * r23
        g0, g2 = 1 - r34 ** 2, r13 ** 2 + r14 ** 2 - 2 * r13 * r14 * r34
    else:
        a0 = r23 - r24 * r34
        a2 = r12 * r13 + r14 * (r14 * r23 - r13 * r24 - r12 * r34)
        b0, b2 = 1 - r24 ** 2, r12 ** 2 + r14 ** 2 - 2 * r12 * r14 * r24
        g0, g2 = 1 - r34 ** 2, r13 ** 2 + r14 ** 2 - 2 * r13 * r14 * r34
    return a0, a2, b0, b2, g0, g2


@dataclass(frozen=True)
class WIntegrandTerms:
    """The three factors of one arcsine-integrand leg, as functions of
    u in [0, 1]: the integrand's arcsine argument is alpha/(beta*gamma)."""

    ell: int
    alpha_l: "callable"
    beta_l: "callable"
    gamma_l: "callable"


def w_integrand_terms(r: CorrelationMatrix4, ell: int) -> WIntegrandTerms:
    """Build the alpha/beta/gamma factor functions for leg ell in {2, 3, 4}."""
    if ell not in (2, 3, 4):
        raise DomainError(f"leg index must be 2, 3 or 4, got {ell}")
    a0, a2, b0, b2, g0, g2 = _abg_coeffs(r.rho, ell - 1)

    def alpha(u):
        return a0 - a2 * u * u

    def beta(u):
        return math.sqrt(max(b0 - b2 * u * u, 0.0))

    def gamma(u):
        return math.sqrt(max(g0 - g2 * u * u, 0.0))

    return WIntegrandTerms(ell=ell, alpha_l=alpha, beta_l=beta, gamma_l=gamma)


def _arcsine_ratio(u2: np.ndarray, coeffs, clamp_eps: float) -> np.ndarray:
    """arcsin(alpha / (beta*gamma)) with degenerate-limit guards."""
    a0, a2, b0, b2, g0, g2 = coeffs
    alpha = a0 - a2 * u2
    beta2 = np.maximum(b0 - b2 * u2, 0.0)
    gamma2 = np.maximum(g0 - g2 * u2, 0.0)
    bg = np.sqrt(beta2 * gamma2)
    out = np.empty_like(alpha)
    tiny = bg < _BG_FLOOR
    if tiny.any():
        # 0/0 limit at a degenerate matrix; approach along decreasing u
        for i in np.flatnonzero(tiny):
            if abs(alpha[i]) < _BG_FLOOR:
                out[i] = _ratio_limit(u2[i], coeffs, clamp_eps)
            else:
                raise DomainError("arcsine argument diverges: beta*gamma -> 0 "
                                  "with nonvanishing alpha")
    ok = ~tiny
    ratio = np.zeros_like(alpha)
    np.divide(alpha, bg, out=ratio, where=ok)
    over = ok & (np.abs(ratio) > 1)
    if over.any():
        if np.abs(ratio[over]).max() > 1 + clamp_eps:
            raise DomainError("arcsine argument exceeds 1 beyond the clamp margin")
        ratio[over] = np.sign(ratio[over])
    out[ok] = np.arcsin(ratio[ok])
    return out


def _ratio_limit(u2: float, coeffs, clamp_eps: float) -> float:
    """One-sided limit of arcsin(alpha/(beta*gamma)) by step halving in u."""
    a0, a2, b0, b2, g0, g2 = coeffs
    u = math.sqrt(max(u2, 0.0))
    h = max(1e-4, 1e-4 * u)
    prev = None
    for _ in range(40):
        uu = max(u - h, 0.0)
        v2 = uu * uu
        alpha = a0 - a2 * v2
        bg = math.sqrt(max(b0 - b2 * v2, 0.0) * max(g0 - g2 * v2, 0.0))
        if bg >= _BG_FLOOR:
            ratio = min(1.0, max(-1.0, alpha / bg))
            val = math.asin(ratio)
            if prev is not None and abs(val - prev) < 1e-12:
                return val
            prev = val
        h *= 0.5
    return prev if prev is not None else 0.0


def w_integral(r: CorrelationMatrix4,
               settings: QuadratureSettings | None = None) -> float:
    """Quadrivariate coupling term: sum of three 1-D arcsine integrals."""
    settings = settings or QuadratureSettings()
    m = r.rho
    legs = [ell for ell in (1, 2, 3) if m[0, ell] != 0.0]
    if not legs:
        return 0.0
    tol_leg = settings.abs_tol / 3
    total = 0.0
    for ell in legs:
        r1l = m[0, ell]
        coeffs = _abg_coeffs(m, ell)
        if abs(r1l) > 1 - _SINGULAR_SWITCH:
            # u = sin(theta) removes the inverse-square-root endpoint
            # singularity when |r1l| ~ 1
            def f(theta, r1l=r1l, coeffs=coeffs):
                u = np.sin(theta)
                u2 = u * u
                denom = np.sqrt(np.maximum(1 - r1l * r1l * u2, 1e-300))
                return (r1l * np.cos(theta) / denom
                        * _arcsine_ratio(u2, coeffs, settings.clamp_eps))
            val = integrate_adaptive(f, 0.0, math.pi / 2, tol_leg,
                                     settings.max_subdivisions)
        else:
            def f(u, r1l=r1l, coeffs=coeffs):
                u2 = u * u
                denom = np.sqrt(1 - r1l * r1l * u2)
                return r1l / denom * _arcsine_ratio(u2, coeffs, settings.clamp_eps)
            val = integrate_adaptive(f, 0.0, 1.0, tol_leg,
                                     settings.max_subdivisions)
        total += 4 / math.pi ** 2 * val
    return total


def _arcsin_sum(m: np.ndarray) -> float:
    return sum(math.asin(min(1.0, max(-1.0, m[i, j])))
               for i in range(3) for j in range(i + 1, 4))


def orthant_p4(r: CorrelationMatrix4,
               settings: QuadratureSettings | None = None) -> float:
    """Quadrivariate positive orthant probability."""
    w = w_integral(r, settings)
    p = (1 + 2 / math.pi * _arcsin_sum(r.rho) + w) / 16
    return min(1.0, max(0.0, p))


def w_from_p4(p4: float, r: CorrelationMatrix4) -> float:
    """Recover the coupling term from an orthant probability."""
    return 16 * p4 - 1 - 2 / math.pi * _arcsin_sum(r.rho)
