"""Exact and asymptotic moments of the three correlation coefficients
under the bivariate normal model.

The non-elementary ingredients are the coupling terms W of twelve 4x4
correlation matrices. Those matrices are not hardcoded: each one is
derived from an index-sharing template of the two indicator triples that
arise when squaring (or cross-multiplying) the integer rank statistics,
using the covariance rule for differences of i.i.d. coordinates,

    cov(X_a - X_b, X_c - X_d) = d_ac - d_ad - d_bc + d_bd   (variance 2)
    cov(X_a - X_b, Y_c - Y_d) = rho * (d_ac - d_ad - d_bc + d_bd)

The derived matrices are validated once against exact anchor values at
rho = 0 and rho = 1 and against four internal W-identities; failure
raises DerivationError.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DerivationError, DomainError, NegativeVarianceError
from .orthant import CorrelationMatrix4, orthant_p4, w_integral
from .quadrature import QuadratureSettings, integrate_adaptive

_NEG_CLAMP = -1e-10


@dataclass(frozen=True)
class BinormalParams:
    """Population correlation with its two derived arcsines."""

    rho: float

    def __post_init__(self):
        if not abs(self.rho) <= 1:
            raise DomainError(f"|rho| must be <= 1, got {self.rho}")

    @property
    def s1(self) -> float:
        return math.asin(self.rho)

    @property
    def s2(self) -> float:
        return math.asin(self.rho / 2)


@dataclass(frozen=True)
class OmegaValues:
    omega1: float
    omega2: float
    omega3: float
    omega4: float


# ---------------------------------------------------------------------------
# Pattern matrices.
#
# Each Z is a standardized difference of one coordinate: ("x", a, b) means
# (X_a - X_b)/sqrt(2). A pattern is a quadruple (Z1, Z2, Z3, Z4) built from
# two indicator triples sharing some indices. The letters i,j,k,m,p,l are
# free index symbols; equal letters denote the same sample index.
# ---------------------------------------------------------------------------

_PATTERN_TEMPLATES = {
    # triple-triple products, one shared index (the five-index group)
    "c": (("x", "i", "j"), ("y", "i", "k"), ("x", "i", "m"), ("y", "i", "p")),
    "d": (("x", "i", "j"), ("y", "i", "k"), ("x", "l", "i"), ("y", "l", "p")),
    "e": (("x", "i", "j"), ("y", "i", "k"), ("x", "l", "j"), ("y", "l", "p")),
    "f": (("x", "i", "j"), ("y", "i", "k"), ("x", "l", "m"), ("y", "l", "j")),
    # triple-triple products, two shared indices (the four-index group)
    "g": (("x", "i", "j"), ("y", "i", "k"), ("x", "i", "m"), ("y", "i", "j")),
    "p": (("x", "i", "j"), ("y", "i", "k"), ("x", "i", "k"), ("y", "i", "p")),
    "l": (("x", "i", "j"), ("y", "i", "k"), ("x", "l", "i"), ("y", "l", "k")),
    "n": (("x", "i", "j"), ("y", "i", "k"), ("x", "j", "m"), ("y", "j", "i")),
    "m": (("x", "i", "j"), ("y", "i", "k"), ("x", "l", "j"), ("y", "l", "k")),
    "o": (("x", "i", "j"), ("y", "i", "k"), ("x", "l", "k"), ("y", "l", "j")),
    # pair-triple cross products, one shared index
    "h": (("x", "i", "j"), ("y", "i", "j"), ("x", "l", "i"), ("y", "l", "p")),
    "q": (("x", "i", "j"), ("y", "i", "j"), ("x", "l", "m"), ("y", "l", "i")),
}

# exact anchors: positive-orthant probability at rho=0, W value at rho=1
_ANCHORS_P4_RHO0 = {
    "c": Fraction(1, 9), "d": Fraction(1, 24), "f": Fraction(1, 16),
    "g": Fraction(1, 9), "h": Fraction(1, 24), "l": Fraction(1, 18),
    "n": Fraction(1, 36), "o": Fraction(1, 16),
}
_ANCHORS_W_RHO1 = {
    "c": Fraction(1, 5), "d": Fraction(1, 15), "f": Fraction(2, 15),
    "g": Fraction(1, 3), "h": Fraction(1, 3), "l": Fraction(0),
    "m": Fraction(1, 3), "n": Fraction(0), "o": Fraction(1, 3),
}
_PATTERN_LABELS = tuple(_PATTERN_TEMPLATES)


def _pattern_matrix(template, rho: float) -> CorrelationMatrix4:
    def corr(z_r, z_s):
        var_r, pr, mr = z_r
        var_s, ps, ms = z_s
        coef = 1.0 if var_r == var_s else rho
        delta = ((pr == ps) - (pr == ms) - (mr == ps) + (mr == ms))
        return coef * delta / 2.0

    m = np.eye(4)
    for r in range(4):
        for s in range(r + 1, 4):
            m[r, s] = m[s, r] = corr(template[r], template[s])
    return CorrelationMatrix4(rho=m)


@dataclass(frozen=True)
class PatternMatrixTable:
    """The twelve pattern matrices and their W values at one rho."""

    rho: float
    matrices: dict
    w_values: dict


_validation_done = False
_validation_lock = threading.Lock()


def _validate_patterns(settings: QuadratureSettings):
    """Anchor checks at rho = 0 and rho = 1, plus the W-identities."""
    tol = 1e-9
    for rho, anchors, kind in ((0.0, _ANCHORS_P4_RHO0, "P4"),
                               (1.0, _ANCHORS_W_RHO1, "W")):
        w = {}
        for label in _PATTERN_LABELS:
            mat = _pattern_matrix(_PATTERN_TEMPLATES[label], rho)
            w[label] = w_integral(mat, settings)
            if label in anchors:
                if kind == "P4":
                    got = orthant_p4(mat, settings)
                else:
                    got = w[label]
                if abs(got - float(anchors[label])) > tol:
                    raise DerivationError(
                        f"pattern {label} fails its rho={rho} anchor: "
                        f"{kind}={got!r}, expected {float(anchors[label])!r}")
        checks = (w["e"] - 2 * w["d"], w["g"] - w["p"], w["h"] - w["q"],
                  w["m"] - 2 * w["l"] - 1 / 3)
        if max(abs(v) for v in checks) > 1e-10:
            raise DerivationError(f"W-identities violated at rho={rho}: {checks}")


def derive_pattern_matrices(rho: float,
                            settings: QuadratureSettings | None = None
                            ) -> PatternMatrixTable:
    """Build all twelve pattern matrices at rho and evaluate their W terms.

    The first call validates the whole template set against the exact
    anchors; later calls skip the (expensive) validation.
    """
    if not abs(rho) <= 1:
        raise DomainError(f"|rho| must be <= 1, got {rho}")
    settings = settings or QuadratureSettings()
    global _validation_done
    with _validation_lock:
        if not _validation_done:
            _validate_patterns(settings)
            _validation_done = True
    matrices = {label: _pattern_matrix(_PATTERN_TEMPLATES[label], rho)
                for label in _PATTERN_LABELS}
    w_values = {label: w_integral(m, settings) for label, m in matrices.items()}
    return PatternMatrixTable(rho=rho, matrices=matrices, w_values=w_values)


# ---------------------------------------------------------------------------
# Omega functions (memoized per (rho, abs_tol)).
# ---------------------------------------------------------------------------

_omega_cache: dict = {}
_omega_lock = threading.Lock()

_OMEGA_AT_1 = (1.0, 16 / 3, 0.5)


def omegas(rho: float, settings: QuadratureSettings | None = None) -> OmegaValues:
    """The three quadrature-valued moment ingredients plus the integral form."""
    settings = settings or QuadratureSettings()
    key = (rho, settings.abs_tol)
    with _omega_lock:
        hit = _omega_cache.get(key)
    if hit is not None:
        return hit
    if abs(rho) == 1.0:
        # pattern matrices are exactly singular here; use the exact values
        o1, o2, o3 = _OMEGA_AT_1
        val = OmegaValues(o1, o2, o3, omega4(rho, settings))
    else:
        table = derive_pattern_matrices(rho, settings)
        w = table.w_values
        o1 = w["c"] + 8 * w["d"] + 2 * w["f"]
        o2 = 6 * w["g"] + 8 * w["h"] + 6 * w["l"] + 2 * w["n"] + w["o"] + 1 / 3
        o3 = 0.5 * w["g"] + w["h"]
        val = OmegaValues(o1, o2, o3, omega4(rho, settings))
    with _omega_lock:
        _omega_cache[key] = val
    return val


def omega4(rho: float, settings: QuadratureSettings | None = None) -> float:
    """Integral form of the covariance ingredient, as five 1-D integrals."""
    if not abs(rho) <= 1:
        raise DomainError(f"|rho| must be <= 1, got {rho}")
    if rho == 0.0:
        return 0.0
    settings = settings or QuadratureSettings()
    tol = settings.abs_tol / 5
    sub = settings.max_subdivisions

    # first integrand carries a 1/sqrt(1-x^2) factor; x = sin(t) removes it
    def f1(t):
        x = np.sin(t)
        return np.arcsin(x / 3) + 2 * np.arcsin(x / np.sqrt(3))

    def f2(x):
        return -2 * np.arcsin(x / 2 * np.sqrt((1 - x * x) / (9 - 3 * x * x))) \
            / np.sqrt(4 - x * x)

    def f3(x):
        return np.arcsin(x / 2 * (5 - x * x) / (3 - x * x)) / np.sqrt(4 - x * x)

    def f4(x):
        return -2 * np.arcsin(x * np.sqrt((1 - x * x) / (12 - 6 * x * x))) \
            / np.sqrt(4 - x * x)

    def f5(x):
        return 2 * np.arcsin(x * np.sqrt((3 - x * x) / (4 - 2 * x * x))) \
            / np.sqrt(4 - x * x)

    total = integrate_adaptive(f1, 0.0, math.asin(rho) if rho >= 0
                               else -math.asin(-rho), tol, sub)
    # f1 was substituted; the others integrate over [0, rho] directly
    for f in (f2, f3, f4, f5):
        total += integrate_adaptive(f, 0.0, rho, tol, sub)
    return total


# ---------------------------------------------------------------------------
# Closed-form moments.
# ---------------------------------------------------------------------------

def lemma2_moments(rho: float, n: int) -> dict:
    """Known closed-form moments of the three coefficients."""
    if not abs(rho) <= 1:
        raise DomainError(f"|rho| must be <= 1, got {rho}")
    if n < 2:
        raise DomainError("need n >= 2")
    p = BinormalParams(rho)
    s1, s2 = p.s1, p.s2
    pi2 = math.pi ** 2
    mean_rp = rho * (1 - (1 - rho * rho) / (2 * n))
    var_rp = (1 - rho * rho) ** 2 / (n - 1)
    mean_rs = 6 / (math.pi * (n + 1)) * (s1 + (n - 2) * s2)
    mean_rs_asymp = 6 / math.pi * s2
    mean_rk = 2 / math.pi * s1
    var_rk = 2 / (n * (n - 1)) * (1 - 4 * s1 * s1 / pi2
                                  + 2 * (n - 2) * (1 / 9 - 4 * s2 * s2 / pi2))
    return {
        "mean_rp": mean_rp,
        "var_rp": var_rp,
        "mean_rs": mean_rs,
        "mean_rs_asymp": mean_rs_asymp,
        "mean_rk": mean_rk,
        "var_rk": var_rk,
    }


def _clamp_variance(v: float, what: str) -> float:
    if v < _NEG_CLAMP:
        raise NegativeVarianceError(f"{what} evaluated to {v}; quadrature failure")
    return max(v, 0.0)


def var_rs_exact(rho: float, n: int,
                 settings: QuadratureSettings | None = None) -> float:
    """Exact finite-n variance of the rank correlation."""
    if n < 4:
        raise DomainError("exact variance requires n >= 4")
    om = omegas(rho, settings)
    p = BinormalParams(rho)
    s1, s2 = p.s1, p.s2
    pi2 = math.pi ** 2
    v = (6 / (n * (n + 1))
         + 9 * (n - 2) * (n - 3) * ((n - 4) * om.omega1 + om.omega2)
         / (n * (n * n - 1) * (n + 1))
         - 36 / (pi2 * n * (n * n - 1) * (n + 1))
         * (3 * (n - 2) * (3 * n * n - 15 * n + 22) * s2 * s2
            + 12 * (n - 2) ** 2 * s1 * s2
            - 2 * (n - 3) * s1 * s1))
    return _clamp_variance(v, "var(r_S)")


def var_rs_asymptotic(rho: float, n: int,
                      settings: QuadratureSettings | None = None) -> float:
    """Leading-order variance of the rank correlation."""
    if n < 1:
        raise DomainError("need n >= 1")
    om = omegas(rho, settings)
    s2 = BinormalParams(rho).s2
    v = (9 * om.omega1 - 324 * s2 * s2 / math.pi ** 2) / n
    return _clamp_variance(v, "asymptotic var(r_S)")


_COROLLARY_TOL = 1e-9


def cov_rs_rk_exact(rho: float, n: int,
                    settings: QuadratureSettings | None = None) -> float:
    """Exact finite-n covariance between the two rank coefficients.

    Evaluated from the orthant-quadrature ingredient and cross-checked
    against the independent integral form; disagreement beyond 1e-9
    signals a quadrature failure.
    """
    if n < 4:
        raise DomainError("exact covariance requires n >= 4")
    om = omegas(rho, settings)
    thm = _cov_from_omega3(rho, n, om.omega3)
    cor = _cov_from_omega4(rho, n, om.omega4)
    if abs(thm - cor) > _COROLLARY_TOL:
        raise NegativeVarianceError(
            f"covariance cross-check failed at rho={rho}, n={n}: "
            f"{thm} vs {cor}")
    return thm


def _cov_from_omega3(rho: float, n: int, omega3: float) -> float:
    p = BinormalParams(rho)
    s1, s2 = p.s1, p.s2
    pi2 = math.pi ** 2
    return 12 / (n * (n * n - 1)) * (
        (7 * n - 5) / 18
        + (n - 4) * s1 * s1 / pi2
        - 5 * (n - 2) * s2 * s2 / pi2
        - 6 * (n - 2) ** 2 * s1 * s2 / pi2
        + (n - 2) * (n - 3) * omega3)


def _cov_from_omega4(rho: float, n: int, omega4_val: float) -> float:
    p = BinormalParams(rho)
    s1, s2 = p.s1, p.s2
    pi2 = math.pi ** 2
    return 12 / (n * (n * n - 1)) * (
        (n + 1) ** 2 / 18
        + (n - 4) * s1 * s1 / pi2
        - 5 * (n - 2) * s2 * s2 / pi2
        - 6 * (n - 2) ** 2 * s1 * s2 / pi2
        + 2 * (n - 2) * (n - 3) * omega4_val / pi2)


def cov_rs_rk_asymptotic(rho: float, n: int,
                         settings: QuadratureSettings | None = None) -> float:
    """Leading-order covariance between the two rank coefficients."""
    om = omegas(rho, settings)
    p = BinormalParams(rho)
    return 12 / n * (om.omega3 - 6 * p.s1 * p.s2 / math.pi ** 2)


_SERIES_COEFFS = (1.0, -1.24858961, 0.06830496, 0.07280482,
                  0.04025528, 0.02189277)


def cov_series_asymptotic(rho: float, n: int) -> float:
    """Even power series for the asymptotic covariance, through rho^10.

    Useful only for small |rho|; retained for cross-validation of the
    integral forms.
    """
    if n < 1:
        raise DomainError("need n >= 1")
    acc = 0.0
    for k, c in enumerate(_SERIES_COEFFS):
        acc += c * rho ** (2 * k)
    return 2 / (3 * n) * acc


@dataclass(frozen=True)
class OmegaRow:
    rho: float
    omega1: float
    omega2: float
    omega3: float
    error: str | None = None


def tabulate_omegas(rho_grid, settings: QuadratureSettings | None = None
                    ) -> list[OmegaRow]:
    """One row of (rho, omega1, omega2, omega3) per grid value.

    A quadrature failure annotates the row instead of dropping it.
    """
    rows = []
    for rho in rho_grid:
        try:
            om = omegas(float(rho), settings)
            rows.append(OmegaRow(float(rho), om.omega1, om.omega2, om.omega3))
        except Exception as exc:  # noqa: BLE001 - annotated per row
            rows.append(OmegaRow(float(rho), math.nan, math.nan, math.nan,
                                 error=str(exc)))
    return rows


def format_omega_csv(rows: list[OmegaRow], precision: int = 10) -> str:
    """Fixed-point CSV rendering with LF endings."""
    from .formatting import format_fixed

    out = ["rho,omega1,omega2,omega3"]
    for row in rows:
        out.append(",".join([
            format_fixed(row.rho, 2),
            format_fixed(row.omega1, precision),
            format_fixed(row.omega2, precision),
            format_fixed(row.omega3, precision),
        ]))
    return "\n".join(out) + "\n"
