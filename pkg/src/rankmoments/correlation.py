"""Ranks, the three classical correlation coefficients, and the
generalized score-based coefficient, plus an integer-statistic route to
the rank correlation used as an exact cross-check."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DegenerateError, SizeError, TieError


@dataclass(frozen=True)
class PairedSample:
    """n paired observations with finite real values."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y, dtype=float)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        if x.ndim != 1 or y.ndim != 1 or len(x) != len(y):
            raise SizeError("x and y must be 1-D vectors of equal length")
        if len(x) < 2:
            raise SizeError(f"need n >= 2, got n={len(x)}")
        if not (np.isfinite(x).all() and np.isfinite(y).all()):
            raise ValueError("sample values must be finite")

    @property
    def n(self) -> int:
        return len(self.x)


@dataclass(frozen=True)
class RankVector:
    """Integer ranks of x and y; each a permutation of 1..n."""

    p: np.ndarray
    q: np.ndarray


@dataclass(frozen=True)
class ScoreSystem:
    """Antisymmetric pairwise score matrices a_ij, b_ij."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        b = np.asarray(self.b, dtype=float)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        for name, m in (("a", a), ("b", b)):
            if m.ndim != 2 or m.shape[0] != m.shape[1]:
                raise ValueError(f"{name} must be square")
            if not np.allclose(m, -m.T, atol=1e-12):
                raise ValueError(f"{name} must be antisymmetric with zero diagonal")


@dataclass(frozen=True)
class SStatistic:
    """Integer decomposition of the triple-indicator sum.

    s_value = i_term + j_term, and the pair-sign numerator satisfies
    t_value = 4*i_term - 2*k_term - 2*l_term + n(n-1).
    """

    s_value: int
    t_value: int
    i_term: int
    j_term: int
    k_term: int
    l_term: int


def _check_ties(values: np.ndarray, name: str):
    uniq, counts = np.unique(values, return_counts=True)
    if (counts > 1).any():
        raise TieError(name, tuple(float(v) for v in uniq[counts > 1]))


def compute_ranks(sample: PairedSample) -> RankVector:
    """Ranks by position in the sorted sequence, via argsort-of-argsort."""
    _check_ties(sample.x, "x")
    _check_ties(sample.y, "y")
    p = np.empty(sample.n, dtype=np.int64)
    q = np.empty(sample.n, dtype=np.int64)
    p[np.argsort(sample.x, kind="stable")] = np.arange(1, sample.n + 1)
    q[np.argsort(sample.y, kind="stable")] = np.arange(1, sample.n + 1)
    return RankVector(p=p, q=q)


def pearson(sample: PairedSample) -> float:
    """Product-moment correlation of the raw values."""
    x = sample.x - sample.x.mean()
    y = sample.y - sample.y.mean()
    sxx = float(x @ x)
    syy = float(y @ y)
    if sxx == 0.0 or syy == 0.0:
        raise DegenerateError("constant coordinate has zero variance")
    return float(x @ y) / np.sqrt(sxx * syy)


def spearman(sample: PairedSample) -> float:
    """Rank correlation from squared rank differences.

    Computed through exact rational arithmetic so that the value is the
    correctly-rounded double of 1 - 6*sum(d^2)/(n(n^2-1)).
    """
    ranks = compute_ranks(sample)
    n = sample.n
    d2 = int(((ranks.p - ranks.q) ** 2).sum())
    return float(1 - Fraction(6 * d2, n * (n * n - 1)))


def kendall(sample: PairedSample) -> float:
    """Pair-sign correlation, O(n^2) reference implementation."""
    _check_ties(sample.x, "x")
    _check_ties(sample.y, "y")
    x, y = sample.x, sample.y
    sx = np.sign(x[:, None] - x[None, :])
    sy = np.sign(y[:, None] - y[None, :])
    n = sample.n
    t = int((sx * sy).sum())
    return float(Fraction(t, n * (n - 1)))


def _merge_count(a: np.ndarray) -> int:
    """Number of inversions in a, by bottom-up merge counting."""
    a = a.copy()
    n = len(a)
    buf = np.empty_like(a)
    inv = 0
    width = 1
    while width < n:
        for lo in range(0, n, 2 * width):
            mid = min(lo + width, n)
            hi = min(lo + 2 * width, n)
            if mid == hi:
                continue
            i, j, k = lo, mid, lo
            while i < mid and j < hi:
                if a[i] <= a[j]:
                    buf[k] = a[i]
                    i += 1
                else:
                    buf[k] = a[j]
                    inv += mid - i
                    j += 1
                k += 1
            while i < mid:
                buf[k] = a[i]
                i += 1
                k += 1
            while j < hi:
                buf[k] = a[j]
                j += 1
                k += 1
            a[lo:hi] = buf[lo:hi]
        width *= 2
    return inv


try:  # jit-compiled inversion counter; falls back to the python loop
    from numba import njit

    _merge_count_fast = njit(cache=True)(_merge_count)
except ImportError:  # pragma: no cover
    _merge_count_fast = _merge_count


def count_inversions(a: np.ndarray) -> int:
    return int(_merge_count_fast(np.ascontiguousarray(a, dtype=np.int64)))


def kendall_fast(sample: PairedSample) -> float:
    """O(n log n) pair-sign correlation via inversion counting."""
    ranks = compute_ranks(sample)
    return kendall_from_ranks(ranks.p, ranks.q)


def kendall_from_ranks(p: np.ndarray, q: np.ndarray) -> float:
    """Pair-sign correlation of two tie-free rank vectors."""
    n = len(p)
    order = np.argsort(p)
    discordant = count_inversions(q[order])
    return float(1 - Fraction(4 * discordant, n * (n - 1)))


def daniels_gamma(scores: ScoreSystem) -> float:
    """Generalized score-product coefficient sum(ab)/sqrt(sum(a^2)sum(b^2))."""
    a, b = scores.a, scores.b
    saa = float((a * a).sum())
    sbb = float((b * b).sum())
    if saa == 0.0 or sbb == 0.0:
        raise DegenerateError("score matrix is identically zero")
    return float((a * b).sum()) / np.sqrt(saa * sbb)


def scores_pearson(sample: PairedSample) -> ScoreSystem:
    return ScoreSystem(a=sample.x[None, :] - sample.x[:, None],
                       b=sample.y[None, :] - sample.y[:, None])


def scores_kendall(sample: PairedSample) -> ScoreSystem:
    return ScoreSystem(a=np.sign(sample.x[None, :] - sample.x[:, None]),
                       b=np.sign(sample.y[None, :] - sample.y[:, None]))


def scores_spearman(sample: PairedSample) -> ScoreSystem:
    r = compute_ranks(sample)
    p = r.p.astype(float)
    q = r.q.astype(float)
    return ScoreSystem(a=p[None, :] - p[:, None], b=q[None, :] - q[:, None])


def spearman_via_s(sample: PairedSample) -> tuple[float, SStatistic]:
    """Rank correlation recovered from the integer triple-indicator sum.

    All counting is done in exact integer arithmetic, so the returned
    value is bit-identical to spearman(sample).
    """
    ranks = compute_ranks(sample)
    n = sample.n
    p, q = ranks.p, ranks.q
    # sum over j of H(x_i - x_j) is rank minus one
    s = int(((p - 1) * (q - 1)).sum())
    # i_term counts ordered pairs with both differences positive, i.e.
    # concordant unordered pairs
    sx = np.sign(sample.x[:, None] - sample.x[None, :])
    sy = np.sign(sample.y[:, None] - sample.y[None, :])
    i_term = int(((sx > 0) & (sy > 0)).sum())
    k_term = n * (n - 1) // 2
    l_term = k_term
    j_term = s - i_term
    t = 4 * i_term - 2 * k_term - 2 * l_term + n * (n - 1)
    stat = SStatistic(s_value=s, t_value=t, i_term=i_term, j_term=j_term,
                      k_term=k_term, l_term=l_term)
    r = float(Fraction(12, 1) * (Fraction(s) - Fraction(n * (n - 1) ** 2, 4))
              / (n * (n * n - 1)))
    return r, stat


def inequality_check(rs: float, rk: float, n: int) -> tuple[bool, bool]:
    """Evaluate the two classical sample bounds linking the coefficients.

    Returns (within the linear-combination bound, within the quadratic
    upper bound on rs). A tiny roundoff slack keeps exact equality cases
    from flipping.
    """
    if n < 3:
        raise SizeError("bounds require n >= 3")
    slack = 1e-12
    # sharp constant n + 4 verified by enumerating all permutations for
    # n in 3..8; equality holds at perfect agreement and perfect reversal
    combo = (3 * (n + 2) * rk - 2 * (n + 1) * rs) / (n + 4)
    daniel_ok = -1 - slack <= combo <= 1 + slack
    bound = 1 - (1 - rk) * ((n - 1) * (1 - rk) + 4) / (2 * (n + 1))
    durbin_stuart_ok = rs <= bound + slack
    return daniel_ok, durbin_stuart_ok
