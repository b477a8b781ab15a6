"""Seedable Monte Carlo engine for verifying the moment theory.

Determinism contract: every (rho-index, n-index, block-index) cell gets
its own counter-based Philox stream derived from the experiment seed, and
block results are reduced in block order. The output is therefore
bit-identical for a given (config, seed) regardless of how many worker
threads computed the blocks.

Per-block statistics are raw power sums shifted by the first block's
means, so the final reduction reproduces two-pass central moments to
near machine precision while remaining a fixed-order sum of
per-block contributions.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .binormal import cov_rs_rk_exact, lemma2_moments, var_rs_exact
from .contaminated import (ContaminationParams, expected_rk_contaminated,
                           expected_rs_contaminated, rival_formula_star,
                           sample_contaminated_block)
from .correlation import PairedSample, count_inversions
from .errors import DomainError, ResourceError
from .estimators import EstimatorKind, bias_theoretical, variance_theoretical

_DEFAULT_BLOCK = 4096
_PAIRWISE_LIMIT = 64          # n above this switches Kendall to inversion counting
_DEFAULT_BUDGET = 10 ** 9     # cap on trials * n per cell

_ALL_KINDS = frozenset(EstimatorKind)


@dataclass(frozen=True)
class ExperimentConfig:
    """One verification campaign: a grid of (rho, n) cells."""

    model: str                                   # "binormal" or "contaminated"
    rho_grid: tuple
    n_list: tuple
    trials: int
    seed: int
    estimators: frozenset = _ALL_KINDS
    contamination: ContaminationParams | None = None
    block_size: int = _DEFAULT_BLOCK
    budget: int = _DEFAULT_BUDGET

    def __post_init__(self):
        if self.model not in ("binormal", "contaminated"):
            raise DomainError(f"unknown model {self.model!r}")
        if self.model == "contaminated" and self.contamination is None:
            raise DomainError("contaminated model needs ContaminationParams")
        if self.trials < 1:
            raise DomainError("trials must be >= 1")
        if any(n < 4 for n in self.n_list):
            raise DomainError("every n must be >= 4")
        if any(not abs(r) <= 1 for r in self.rho_grid):
            raise DomainError("rho values must lie in [-1, 1]")
        if not 0 <= self.seed < 2 ** 64:
            raise DomainError("seed must be a 64-bit unsigned integer")
        if self.block_size < 1:
            raise DomainError("block_size must be >= 1")


@dataclass(frozen=True)
class SeriesStats:
    """Moments of one scalar series over all trials."""

    count: int
    mean: float
    var: float          # population (divide by count) central second moment
    mu3: float
    mu4: float

    @property
    def se_mean(self) -> float:
        return math.sqrt(max(self.var, 0.0) / self.count)

    @property
    def se_var(self) -> float:
        return math.sqrt(max(self.mu4 - self.var ** 2, 0.0) / self.count)


@dataclass(frozen=True)
class CellResult:
    """All accumulated statistics for one (rho, n) cell."""

    rho: float
    n: int
    trials: int
    series: dict                 # name -> SeriesStats
    cov_rs_rk: float
    se_cov_rs_rk: float

    def bias(self, name: str, target: float) -> float:
        return self.series[name].mean - target

    def mse(self, name: str, target: float) -> float:
        s = self.series[name]
        return s.var + (s.mean - target) ** 2

    def se_mse(self, name: str, target: float) -> float:
        # delta-method SE of mean((x - target)^2) from central moments
        s = self.series[name]
        b = s.mean - target
        nu4 = s.mu4 + 4 * b * s.mu3 + 6 * b * b * s.var + b ** 4
        nu2 = s.var + b * b
        return math.sqrt(max(nu4 - nu2 * nu2, 0.0) / s.count)


@dataclass(frozen=True)
class ReportRow:
    model: str
    rho: float
    n: int
    kind: str
    metric: str
    empirical: float
    theory: float | None
    se: float
    verdict: str = ""


@dataclass
class TrialReport:
    config: ExperimentConfig
    cells: list = field(default_factory=list)
    rows: list = field(default_factory=list)


def threads_limit() -> int:
    """Worker thread count, capped by the RANKMOMENTS_THREADS variable."""
    cap = os.environ.get("RANKMOMENTS_THREADS")
    avail = os.cpu_count() or 1
    if cap is None:
        return min(avail, 8)
    try:
        value = int(cap)
    except ValueError:
        raise DomainError(f"RANKMOMENTS_THREADS={cap!r} is not an integer")
    if value < 1:
        raise DomainError("RANKMOMENTS_THREADS must be >= 1")
    return min(value, avail)


def sample_binormal(rho: float, n: int,
                    stream: np.random.Generator) -> PairedSample:
    """Draw one sample of n standard-marginal correlated pairs."""
    x, y = sample_binormal_block(rho, n, stream, size=1)
    return PairedSample(x=x[0], y=y[0])


def sample_binormal_block(rho: float, n: int, stream: np.random.Generator,
                          size: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """Standard-marginal correlated pairs, shape (size, n) each."""
    if not abs(rho) <= 1:
        raise DomainError(f"|rho| must be <= 1, got {rho}")
    if n < 1:
        raise DomainError("n must be >= 1")
    u = stream.standard_normal((size, n))
    v = stream.standard_normal((size, n))
    return u, rho * u + math.sqrt(1 - rho * rho) * v


def _ranks_rows(x: np.ndarray) -> np.ndarray:
    order = np.argsort(x, axis=1, kind="stable")
    ranks = np.empty_like(order)
    rows = np.arange(x.shape[0])[:, None]
    ranks[rows, order] = np.arange(1, x.shape[1] + 1)
    return ranks


def _coefficients_block(x: np.ndarray, y: np.ndarray
                        ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-trial (r_P, r_S, r_K) for a block of samples."""
    b, n = x.shape
    xc = x - x.mean(axis=1, keepdims=True)
    yc = y - y.mean(axis=1, keepdims=True)
    denom = np.sqrt((xc * xc).sum(axis=1) * (yc * yc).sum(axis=1))
    r_p = np.where(denom > 0, (xc * yc).sum(axis=1) / np.maximum(denom, 1e-300),
                   0.0)

    rx = _ranks_rows(x)
    ry = _ranks_rows(y)
    d2 = ((rx - ry) ** 2).sum(axis=1)
    r_s = 1 - 6.0 * d2 / (n * (n * n - 1))

    if n <= _PAIRWISE_LIMIT:
        sx = np.sign(x[:, :, None] - x[:, None, :])
        sy = np.sign(y[:, :, None] - y[:, None, :])
        t = (sx * sy).sum(axis=(1, 2)) / 2
        r_k = t / (n * (n - 1) / 2)
    else:
        order = np.argsort(x, axis=1, kind="stable")
        y_in_x_order = np.take_along_axis(ry, order, axis=1)
        inv = np.empty(b, dtype=np.int64)
        for i in range(b):
            inv[i] = count_inversions(y_in_x_order[i])
        r_k = 1 - 4.0 * inv / (n * (n - 1))
    return r_p, r_s, r_k


_POWER_KEYS = ("s1", "s2", "s3", "s4")


def _block_sums(values: dict, shifts: dict) -> dict:
    """Shifted raw power sums for every series, plus the rank cross terms."""
    out = {}
    for name, arr in values.items():
        u = arr - shifts[name]
        u2 = u * u
        out[name] = (len(arr), u.sum(), u2.sum(), (u2 * u).sum(), (u2 * u2).sum())
    us = values["r_s"] - shifts["r_s"]
    uk = values["r_k"] - shifts["r_k"]
    out["__cross__"] = ((us * uk).sum(), (us * us * uk).sum(),
                        (us * uk * uk).sum(), (us * us * uk * uk).sum())
    return out


def _finalize(total_sums: dict, trials: int, shifts: dict
              ) -> tuple[dict, float, float]:
    series = {}
    raw = {}
    for name, sums in total_sums.items():
        if name == "__cross__":
            continue
        _, s1, s2, s3, s4 = sums
        r1, r2, r3, r4 = s1 / trials, s2 / trials, s3 / trials, s4 / trials
        mu2 = r2 - r1 * r1
        mu3 = r3 - 3 * r1 * r2 + 2 * r1 ** 3
        mu4 = r4 - 4 * r1 * r3 + 6 * r1 * r1 * r2 - 3 * r1 ** 4
        series[name] = SeriesStats(count=trials, mean=shifts[name] + r1,
                                   var=mu2, mu3=mu3, mu4=mu4)
        raw[name] = (r1, r2)
    c11, c21, c12, c22 = (v / trials for v in total_sums["__cross__"])
    us_m, us_r2 = raw["r_s"]
    uk_m, uk_r2 = raw["r_k"]
    cov = c11 - us_m * uk_m
    mu22 = (c22 - 2 * uk_m * c21 - 2 * us_m * c12
            + uk_m ** 2 * us_r2 + us_m ** 2 * uk_r2
            + 4 * us_m * uk_m * c11 - 3 * us_m ** 2 * uk_m ** 2)
    se_cov = math.sqrt(max(mu22 - cov * cov, 0.0) / trials)
    return series, cov, se_cov


def _cell_block(config: ExperimentConfig, rho: float, n: int,
                rho_idx: int, n_idx: int, block_idx: int, size: int) -> dict:
    seq = np.random.SeedSequence(entropy=config.seed,
                                 spawn_key=(rho_idx, n_idx, block_idx))
    stream = np.random.Generator(np.random.Philox(seq))
    if config.model == "binormal":
        x, y = sample_binormal_block(rho, n, stream, size=size)
    else:
        base = config.contamination
        params = ContaminationParams(
            rho=rho, epsilon=base.epsilon, lambda_x=base.lambda_x,
            lambda_y=base.lambda_y, rho_prime=base.rho_prime,
            mu_x=base.mu_x, mu_y=base.mu_y,
            sigma_x=base.sigma_x, sigma_y=base.sigma_y)
        x, y = sample_contaminated_block(params, n, size, seed=stream)
    r_p, r_s, r_k = _coefficients_block(x, y)
    values = {"r_s": r_s, "r_k": r_k}
    if EstimatorKind.PEARSON in config.estimators:
        values["pearson"] = np.clip(r_p, -1.0, 1.0)
    if EstimatorKind.SPEARMAN in config.estimators:
        values["spearman"] = np.clip(2 * np.sin(np.pi * r_s / 6), -1.0, 1.0)
    if EstimatorKind.KENDALL in config.estimators:
        values["kendall"] = np.clip(np.sin(np.pi * r_k / 2), -1.0, 1.0)
    if EstimatorKind.MIXED in config.estimators:
        arg = np.pi * r_s / 6 - np.pi / 2 * (r_k - r_s) / (n - 2)
        values["mixed"] = np.clip(2 * np.sin(arg), -1.0, 1.0)
    return values


def _run_cell(config: ExperimentConfig, rho: float, n: int,
              rho_idx: int, n_idx: int, pool) -> CellResult:
    trials = config.trials
    block = config.block_size
    n_blocks = (trials + block - 1) // block
    sizes = [block] * (n_blocks - 1) + [trials - block * (n_blocks - 1)]

    first = _cell_block(config, rho, n, rho_idx, n_idx, 0, sizes[0])
    shifts = {name: float(arr.mean()) for name, arr in first.items()}
    total = _block_sums(first, shifts)

    def job(idx):
        vals = _cell_block(config, rho, n, rho_idx, n_idx, idx, sizes[idx])
        return _block_sums(vals, shifts)

    if n_blocks > 1:
        results = pool.map(job, range(1, n_blocks)) if pool is not None \
            else map(job, range(1, n_blocks))
        # fixed reduction order: map preserves block-index order
        for sums in results:
            for key, vals in sums.items():
                total[key] = tuple(a + b for a, b in zip(total[key], vals))

    series, cov, se_cov = _finalize(total, trials, shifts)
    return CellResult(rho=rho, n=n, trials=trials, series=series,
                      cov_rs_rk=cov, se_cov_rs_rk=se_cov)


def run_experiment(config: ExperimentConfig) -> TrialReport:
    """Run the whole grid and attach theory values to every cell."""
    for n in config.n_list:
        if config.trials * n > config.budget:
            raise ResourceError(
                f"cell budget exceeded: trials*n = {config.trials * n} "
                f"> {config.budget}")
    workers = threads_limit()
    report = TrialReport(config=config)
    pool = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        for i, rho in enumerate(config.rho_grid):
            for j, n in enumerate(config.n_list):
                cell = _run_cell(config, float(rho), int(n), i, j, pool)
                report.cells.append(cell)
                report.rows.extend(_theory_rows(config, cell))
    finally:
        if pool is not None:
            pool.shutdown()
    return report


def _theory_rows(config: ExperimentConfig, cell: CellResult) -> list:
    rho, n = cell.rho, cell.n
    model = config.model
    rows = []

    def add(kind, metric, empirical, theory, se):
        rows.append(ReportRow(model=model, rho=rho, n=n, kind=kind,
                              metric=metric, empirical=empirical,
                              theory=theory, se=se))

    rs, rk = cell.series["r_s"], cell.series["r_k"]
    if model == "binormal":
        lm = lemma2_moments(rho, n)
        add("r_s", "mean", rs.mean, lm["mean_rs"], rs.se_mean)
        add("r_s", "var", rs.var, var_rs_exact(rho, n), rs.se_var)
        add("r_k", "mean", rk.mean, lm["mean_rk"], rk.se_mean)
        add("r_k", "var", rk.var, lm["var_rk"], rk.se_var)
        add("joint", "cov_rs_rk", cell.cov_rs_rk, cov_rs_rk_exact(rho, n),
            cell.se_cov_rs_rk)
        target = rho
        theory_fns = (bias_theoretical, variance_theoretical)
    else:
        params = ContaminationParams(
            rho=rho, epsilon=config.contamination.epsilon,
            lambda_x=config.contamination.lambda_x,
            lambda_y=config.contamination.lambda_y,
            rho_prime=config.contamination.rho_prime)
        add("r_s", "mean", rs.mean, expected_rs_contaminated(params, n),
            rs.se_mean)
        add("r_s", "mean_rival", rs.mean, rival_formula_star(params),
            rs.se_mean)
        add("r_k", "mean", rk.mean, expected_rk_contaminated(params), rk.se_mean)
        add("r_s", "var", rs.var, None, rs.se_var)
        add("r_k", "var", rk.var, None, rk.se_var)
        add("joint", "cov_rs_rk", cell.cov_rs_rk, None, cell.se_cov_rs_rk)
        target = rho
        theory_fns = None

    for kind in sorted(config.estimators, key=lambda k: k.value):
        name = kind.value
        if name not in cell.series:
            continue
        s = cell.series[name]
        if theory_fns is not None:
            tb = bias_theoretical(kind, rho, n)
            tv = variance_theoretical(kind, rho, n)
            tm = tv + tb * tb
        else:
            tb = tv = tm = None
        add(name, "bias", cell.bias(name, target), tb, s.se_mean)
        add(name, "var", s.var, tv, s.se_var)
        add(name, "mse", cell.mse(name, target), tm, cell.se_mse(name, target))
    return rows


@dataclass(frozen=True)
class ComparisonSummary:
    passed: int
    failed: int
    skipped: int
    rows: tuple


def compare_report(report: TrialReport, tol_sigmas: float) -> ComparisonSummary:
    """Attach PASS/FAIL verdicts at the given sigma tolerance."""
    if not report.rows:
        raise DomainError("empty report")
    if not tol_sigmas > 0:
        raise DomainError("tol_sigmas must be > 0")
    out = []
    counts = {"PASS": 0, "FAIL": 0, "SKIP": 0}
    for row in report.rows:
        if row.theory is None:
            verdict = "SKIP"
        elif abs(row.empirical - row.theory) <= tol_sigmas * row.se:
            verdict = "PASS"
        else:
            verdict = "FAIL"
        counts[verdict] += 1
        out.append(ReportRow(model=row.model, rho=row.rho, n=row.n,
                             kind=row.kind, metric=row.metric,
                             empirical=row.empirical, theory=row.theory,
                             se=row.se, verdict=verdict))
    return ComparisonSummary(passed=counts["PASS"], failed=counts["FAIL"],
                             skipped=counts["SKIP"], rows=tuple(out))


def format_report_csv(rows, precision: int = 10) -> str:
    from .formatting import format_fixed

    out = ["model,rho,n,kind,metric,empirical,theory,se,verdict"]
    for r in rows:
        theory = "" if r.theory is None else format_fixed(r.theory, precision)
        out.append(",".join([
            r.model, format_fixed(r.rho, 4), str(r.n), r.kind, r.metric,
            format_fixed(r.empirical, precision), theory,
            format_fixed(r.se, precision), r.verdict,
        ]))
    return "\n".join(out) + "\n"
