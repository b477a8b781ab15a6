"""Moments of the rank coefficients under a two-component normal mixture.

Each observation pair independently comes from the nominal component
N(mu, sigma^2) with correlation rho (probability 1 - epsilon) or from an
inflated component with scale multipliers lambda_x, lambda_y and its own
correlation rho_prime (probability epsilon).

Because ranks are invariant to the common location and scale, the
expectations depend only on the correlations of differences of mixture
draws. Those correlations take twelve distinct values indexed by which
component each of the two (or three) contributing observations came from.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .correlation import PairedSample
from .errors import DomainError, SeedError


@dataclass(frozen=True)
class ContaminationParams:
    """Mixture description: nominal correlation, contamination fraction,
    scale inflations, and the contaminant's own correlation."""

    rho: float
    epsilon: float
    lambda_x: float
    lambda_y: float
    rho_prime: float
    mu_x: float = 0.0
    mu_y: float = 0.0
    sigma_x: float = 1.0
    sigma_y: float = 1.0

    def __post_init__(self):
        if not abs(self.rho) <= 1:
            raise DomainError(f"|rho| must be <= 1, got {self.rho}")
        if not abs(self.rho_prime) <= 1:
            raise DomainError(f"|rho_prime| must be <= 1, got {self.rho_prime}")
        if not 0 <= self.epsilon <= 1:
            raise DomainError(f"epsilon must be in [0, 1], got {self.epsilon}")
        if self.lambda_x <= 0 or self.lambda_y <= 0:
            raise DomainError("scale multipliers must be positive")
        if self.sigma_x <= 0 or self.sigma_y <= 0:
            raise DomainError("sigmas must be positive")


@dataclass(frozen=True)
class MixtureCorrelations:
    """Correlations of standardized differences, by component pattern.

    pair_* refer to differences of two observations (four patterns,
    weighted by which component each observation came from); triple_*
    refer to the two differences sharing one observation out of three.
    """

    pair: tuple          # rho_1..rho_4, weights (1-e)^2, e(1-e), e(1-e), e^2
    triple: tuple        # rho_5..rho_12 with their multiplicities
    pair_weights: tuple
    triple_weights: tuple


def mixture_correlations(params: ContaminationParams) -> MixtureCorrelations:
    """Correlations of difference pairs for every component pattern."""
    rho, eps = params.rho, params.epsilon
    lx, ly, rp = params.lambda_x, params.lambda_y, params.rho_prime
    cx = math.sqrt(1 + lx * lx)
    cy = math.sqrt(1 + ly * ly)
    r2 = math.sqrt(2)

    rho1 = rho
    rho2 = (rho + lx * ly * rp) / (cx * cy)
    rho3 = rho2
    rho4 = rp
    pair = (rho1, rho2, rho3, rho4)
    eb = 1 - eps
    pair_w = (eb * eb, eps * eb, eps * eb, eps * eps)

    rho5 = rho / 2
    rho6 = rho / (r2 * cy)
    rho7 = rho / (r2 * cx)
    rho8 = lx * ly * rp / (cx * cy)
    rho9 = rho / (cx * cy)
    rho10 = lx * rp / (r2 * cx)
    rho11 = ly * rp / (r2 * cy)
    rho12 = rp / 2
    triple = (rho5, rho6, rho7, rho8, rho9, rho10, rho11, rho12)
    triple_w = (eb ** 3,
                eps * eb * eb, eps * eb * eb, eps * eb * eb,
                eps * eps * eb, eps * eps * eb, eps * eps * eb,
                eps ** 3)
    return MixtureCorrelations(pair=pair, triple=triple,
                               pair_weights=pair_w, triple_weights=triple_w)


def _orthant2(r: float) -> float:
    # P(Z1 > 0, Z2 > 0) for standard bivariate normal with correlation r
    return 0.25 + math.asin(r) / (2 * math.pi)


def expected_rk_contaminated(params: ContaminationParams, n: int | None = None,
                             limit: bool = False) -> float:
    """Expected concordance coefficient under the mixture.

    The exact value does not depend on n (for n >= 2). With limit=True the
    small-epsilon linearization is returned instead.
    """
    if n is not None and n < 2:
        raise DomainError("need n >= 2")
    if limit:
        eps = params.epsilon
        return 2 / math.pi * ((1 - 2 * eps) * math.asin(params.rho)
                              + 2 * eps * math.asin(params.rho_prime))
    mc = mixture_correlations(params)
    acc = 0.0
    for r, w in zip(mc.pair, mc.pair_weights):
        acc += w * math.asin(r)
    return 2 / math.pi * acc


def expected_rs_contaminated(params: ContaminationParams, n: int,
                             limit: bool = False) -> float:
    """Expected rank correlation under the mixture, exact in n."""
    if n < 2:
        raise DomainError("need n >= 2")
    if limit:
        eps = params.epsilon
        return 6 / math.pi * ((1 - 3 * eps) * math.asin(params.rho / 2)
                              + eps * math.asin(params.rho_prime))
    mc = mixture_correlations(params)
    # E1: orthant probability of two differences built from the same pair
    e1 = sum(w * _orthant2(r) for r, w in zip(mc.pair, mc.pair_weights))
    # E2: orthant probability of two differences sharing one observation
    e2 = sum(w * _orthant2(r) for r, w in zip(mc.triple, mc.triple_weights))
    es = n * (n - 1) * e1 + n * (n - 1) * (n - 2) * e2
    return 12 * (es - n * (n - 1) ** 2 / 4) / (n * (n * n - 1))


def rival_formula_star(params: ContaminationParams) -> float:
    """A plausible but incorrect limiting mean for the rank correlation.

    Kept as a reference point: it halves the contaminant correlation the
    same way the nominal one is halved, which double-counts the mixing.
    """
    eps = params.epsilon
    return 6 / math.pi * ((1 - eps) * math.asin(params.rho / 2)
                          + eps * math.asin(params.rho_prime / 2))


def sample_contaminated(params: ContaminationParams, n: int,
                        seed=None) -> PairedSample:
    """Draw one sample of n pairs from the mixture."""
    x, y = sample_contaminated_block(params, n, 1, seed=seed)
    return PairedSample(x=x[0], y=y[0])


def sample_contaminated_block(params: ContaminationParams, n: int, size: int,
                              seed=None) -> tuple[np.ndarray, np.ndarray]:
    """Draw `size` samples of n pairs from the mixture.

    Returns (x, y) arrays of shape (size, n). Each pair independently
    picks its component; location and scale are applied per component.
    """
    if n < 1 or size < 1:
        raise DomainError("n and size must be positive")
    try:
        rng = np.random.default_rng(seed)
    except (TypeError, ValueError) as exc:
        raise SeedError(f"bad seed {seed!r}: {exc}") from None

    def cholesky_pair(r):
        return r, math.sqrt(max(1 - r * r, 0.0))

    u = rng.standard_normal((size, n))
    v = rng.standard_normal((size, n))
    contaminated = rng.random((size, n)) < params.epsilon

    a0, b0 = cholesky_pair(params.rho)
    a1, b1 = cholesky_pair(params.rho_prime)
    x_std = np.where(contaminated, params.lambda_x * u, u)
    y_core = np.where(contaminated, a1 * u + b1 * v, a0 * u + b0 * v)
    y_std = np.where(contaminated, params.lambda_y * y_core, y_core)
    x = params.mu_x + params.sigma_x * x_std
    y = params.mu_y + params.sigma_y * y_std
    return x, y
