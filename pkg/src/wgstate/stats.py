"""Bin-bootstrap statistics for coincidence data, fringe contrast and
cosine fitting.

Counts for one measurement setting come in L acquisition bins of four
outcome-pair counts each. A bootstrap replicate redraws L bins with
replacement, pools them, and evaluates the weighted-count estimator
E = sum_k w_k N_k / sum_k N_k. Point estimates are replicate means and
confidence intervals are empirical percentiles.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import least_squares

from .measurement import OUTCOME_PAIRS, CountRecord

REDRAW_CAP = 100


class DegenerateDataError(ValueError):
    """Input counts cannot support the requested statistic."""


class CosineFitError(RuntimeError):
    """The cosine fit did not converge."""


@dataclass(frozen=True)
class BinnedCounts:
    """L acquisition bins of one measurement setting."""

    records: tuple

    def __post_init__(self):
        records = tuple(self.records)
        if len(records) < 2:
            raise ValueError("need at least two acquisition bins")
        if not all(isinstance(r, CountRecord) for r in records):
            raise TypeError("records must be CountRecord instances")
        object.__setattr__(self, "records", records)

    @property
    def counts(self) -> np.ndarray:
        """(L, 4) array of per-bin outcome counts."""
        return np.array([r.counts for r in self.records], dtype=np.int64)

    @property
    def total(self) -> int:
        return int(self.counts.sum())


@dataclass(frozen=True)
class BootstrapConfig:
    mu: int = 10000
    epsilon: float = 1e-12
    seed: int = 0
    ci_level: float = 0.95

    def __post_init__(self):
        if self.mu < 100:
            raise ValueError("mu must be >= 100")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be > 0")
        if not 0 < self.ci_level < 1:
            raise ValueError("ci_level must lie in (0, 1)")


@dataclass(frozen=True, eq=False)
class BootstrapResult:
    samples: np.ndarray
    mean: float
    ci_low: float
    ci_high: float
    n_clamped: int = 0

    @property
    def ci(self) -> tuple[float, float]:
        return self.ci_low, self.ci_high


@dataclass(frozen=True)
class FitResult:
    a: float
    b: float
    c: float
    d: float
    residual: float


def _weight_vector(weights) -> np.ndarray:
    if isinstance(weights, dict):
        return np.array([weights[o] for o in OUTCOME_PAIRS], dtype=float)
    w = np.asarray(weights, dtype=float).reshape(4)
    return w


def _resampled_estimators(counts: np.ndarray, w: np.ndarray,
                          mu: int, rng) -> np.ndarray:
    """mu replicates of the pooled weighted-count estimator.

    Replicates whose resampled total is zero are redrawn, up to
    REDRAW_CAP passes; persistent zero totals raise DegenerateDataError.
    """
    n_bins = counts.shape[0]
    idx = rng.integers(0, n_bins, size=(mu, n_bins))
    totals = counts[idx].sum(axis=1)
    nu = totals.sum(axis=1)
    redraws = 0
    while (nu == 0).any():
        if redraws >= REDRAW_CAP:
            raise DegenerateDataError("resampled totals stayed zero after redraw cap")
        bad = nu == 0
        redraw = rng.integers(0, n_bins, size=(int(bad.sum()), n_bins))
        totals[bad] = counts[redraw].sum(axis=1)
        nu = totals.sum(axis=1)
        redraws += 1
    return (totals @ w) / nu


def _summarize(samples: np.ndarray, ci_level: float,
               n_clamped: int = 0) -> BootstrapResult:
    samples = np.sort(samples)
    tail = 100 * (1 - ci_level) / 2
    lo, hi = np.percentile(samples, [tail, 100 - tail])
    return BootstrapResult(samples=samples, mean=float(samples.mean()),
                           ci_low=float(lo), ci_high=float(hi),
                           n_clamped=n_clamped)


def _spawn_rngs(seed: int, n: int):
    """Independent child generators, split from the master seed in order."""
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(n)]


def bootstrap_expectation(bins: BinnedCounts, weights,
                          cfg: BootstrapConfig) -> BootstrapResult:
    """Bin bootstrap of the expectation-value estimator."""
    counts = bins.counts
    if counts.sum() == 0:
        raise DegenerateDataError("no counts recorded")
    w = _weight_vector(weights)
    (rng,) = _spawn_rngs(cfg.seed, 1)
    samples = _resampled_estimators(counts, w, cfg.mu, rng)
    return _summarize(samples, cfg.ci_level)


def bootstrap_variance(bins: BinnedCounts, weights,
                       cfg: BootstrapConfig) -> BootstrapResult:
    """Bin bootstrap of the single-shot variance 1 - E^2."""
    counts = bins.counts
    if counts.sum() == 0:
        raise DegenerateDataError("no counts recorded")
    w = _weight_vector(weights)
    (rng,) = _spawn_rngs(cfg.seed, 1)
    samples = 1.0 - _resampled_estimators(counts, w, cfg.mu, rng) ** 2
    return _summarize(samples, cfg.ci_level)


def bootstrap_derivative(bins_plus: BinnedCounts, bins_minus: BinnedCounts,
                         h: float, weights,
                         cfg: BootstrapConfig) -> BootstrapResult:
    """Bin bootstrap of the two-point slope [E(+h) - E(-h)] / (2h).

    The two settings are resampled independently; replicate b pairs the
    b-th resample of each.
    """
    if h <= 0:
        raise ValueError("shift h must be > 0")
    if bins_plus.total == 0 or bins_minus.total == 0:
        raise DegenerateDataError("a shifted setting has no counts")
    w = _weight_vector(weights)
    rng_p, rng_m = _spawn_rngs(cfg.seed, 2)
    e_plus = _resampled_estimators(bins_plus.counts, w, cfg.mu, rng_p)
    e_minus = _resampled_estimators(bins_minus.counts, w, cfg.mu, rng_m)
    return _summarize((e_plus - e_minus) / (2 * h), cfg.ci_level)


def bootstrap_ratio(bins_center: BinnedCounts, bins_plus: BinnedCounts,
                    bins_minus: BinnedCounts, h: float, weights,
                    cfg: BootstrapConfig) -> BootstrapResult:
    """Bin bootstrap of the estimator variance (1 - E^2) / |slope|^2.

    Per replicate the three settings are resampled independently; the
    squared slope in the denominator is clamped from below by
    ``cfg.epsilon`` and the number of clamped replicates is reported.
    """
    if h <= 0:
        raise ValueError("shift h must be > 0")
    for b in (bins_center, bins_plus, bins_minus):
        if b.total == 0:
            raise DegenerateDataError("a setting has no counts")
    w = _weight_vector(weights)
    rng_c, rng_p, rng_m = _spawn_rngs(cfg.seed, 3)
    e_center = _resampled_estimators(bins_center.counts, w, cfg.mu, rng_c)
    e_plus = _resampled_estimators(bins_plus.counts, w, cfg.mu, rng_p)
    e_minus = _resampled_estimators(bins_minus.counts, w, cfg.mu, rng_m)
    slope_sq = ((e_plus - e_minus) / (2 * h)) ** 2
    clamped = slope_sq < cfg.epsilon
    samples = (1.0 - e_center ** 2) / np.maximum(slope_sq, cfg.epsilon)
    return _summarize(samples, cfg.ci_level, n_clamped=int(clamped.sum()))


def visibility(n_max: float, n_min: float) -> float:
    """Fringe contrast (N_max - N_min) / (N_max + N_min)."""
    if n_min < 0 or n_max < n_min:
        raise ValueError("need n_max >= n_min >= 0")
    if n_max <= 0:
        raise DegenerateDataError("no counts: visibility undefined")
    return float((n_max - n_min) / (n_max + n_min))


def _cosine(x, a, b, c, d):
    return a * np.cos(b * x + c) + d


def cosine_fit(xs, ys) -> FitResult:
    """Least-squares fit of a cos(b x + c) + d to fringe data.

    Initial values come from the dominant discrete-Fourier component of
    the detrended data (assuming uniform spacing), which makes the fit
    deterministic. The output is canonical: b >= 0 and a <= 0, with c
    wrapped to (-pi, pi].
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.shape != ys.shape or xs.ndim != 1:
        raise ValueError("xs and ys must be 1-d arrays of equal length")
    if len(xs) < 4:
        raise ValueError("need at least four points to fit four parameters")

    dx = xs[1] - xs[0] if len(xs) > 1 else 1.0
    detrended = ys - ys.mean()
    spectrum = np.fft.rfft(detrended)
    if len(spectrum) > 1 and np.abs(spectrum[1:]).max() > 0:
        k = int(np.argmax(np.abs(spectrum[1:]))) + 1
        b0 = 2 * np.pi * k / (len(xs) * dx)
        a0 = 2 * np.abs(spectrum[k]) / len(xs)
        c0 = float(np.angle(spectrum[k]) - b0 * xs[0])
    else:
        b0, a0, c0 = 1.0, 0.0, 0.0

    def residuals(p):
        return _cosine(xs, *p) - ys

    fit = least_squares(residuals, x0=[a0, b0, c0, ys.mean()], method="lm",
                        max_nfev=20000)
    if not fit.success:
        raise CosineFitError(
            f"cosine fit did not converge; best residual "
            f"{np.sqrt(np.mean(fit.fun ** 2)):.3e}")
    a, b, c, d = fit.x
    if b < 0:
        b, c = -b, -c
    if a > 0:
        a, c = -a, c + np.pi
    c = -((-c + np.pi) % (2 * np.pi) - np.pi)
    rms = float(np.sqrt(np.mean(residuals((a, b, c, d)) ** 2)))
    return FitResult(a=float(a), b=float(b), c=float(c), d=float(d), residual=rms)
