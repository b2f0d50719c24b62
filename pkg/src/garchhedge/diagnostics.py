"""Distributional summary and misspecification tests for return series.

Estimator conventions, spelled out because textbook variants differ:

  * stdev: sample standard deviation with ddof = 1
  * skewness S (bias-adjusted sample form):
        S = n / ((n-1)(n-2)) * sum(((x - xbar) / s)^3)
  * excess kurtosis K (bias-adjusted sample form):
        K = n(n+1) / ((n-1)(n-2)(n-3)) * sum(((x - xbar) / s)^4)
            - 3 (n-1)^2 / ((n-2)(n-3))
  * normality statistic: n/6 * (S^2 + K^2/4), chi-square with 2 df
  * ARCH LM statistic: m * R^2 from regressing squared demeaned returns on
    ``lags`` of themselves plus a constant, where m is the number of
    regression observations; chi-square with ``lags`` df

Chi-square p-values come from the regularized incomplete gamma function
(scipy's survival function).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import chi2

from .errors import DegenerateInputError, InsufficientDataError

_MIN_OBSERVATIONS = 8


@dataclass(frozen=True)
class SummaryStats:
    mean: float
    stdev: float
    minimum: float
    maximum: float
    skewness: float
    excess_kurtosis: float
    bj_stat: float
    bj_p: float
    lm_stat: float
    lm_p: float


def _as_values(r) -> np.ndarray:
    return np.asarray(getattr(r, "values", r), dtype=float)


def summarize(r, lags: int = 4) -> SummaryStats:
    """Sample moments plus normality and ARCH tests for one series."""
    x = _as_values(r)
    n = len(x)
    if n < _MIN_OBSERVATIONS:
        raise InsufficientDataError(f"need at least {_MIN_OBSERVATIONS} observations, got {n}")
    mean = float(np.mean(x))
    s = float(np.std(x, ddof=1))
    if s == 0.0:
        raise DegenerateInputError("constant series: dispersion statistics undefined")

    z = (x - mean) / s
    skew = n / ((n - 1) * (n - 2)) * float(np.sum(z**3))
    kurt = (
        n * (n + 1) / ((n - 1) * (n - 2) * (n - 3)) * float(np.sum(z**4))
        - 3 * (n - 1) ** 2 / ((n - 2) * (n - 3))
    )
    bj = n / 6.0 * (skew**2 + kurt**2 / 4.0)
    bj_p = float(chi2.sf(bj, 2))
    lm_stat, lm_p = lm_arch(x, lags=lags)
    return SummaryStats(
        mean=mean,
        stdev=s,
        minimum=float(np.min(x)),
        maximum=float(np.max(x)),
        skewness=skew,
        excess_kurtosis=kurt,
        bj_stat=bj,
        bj_p=bj_p,
        lm_stat=lm_stat,
        lm_p=lm_p,
    )


def lm_arch(r, lags: int = 4) -> tuple[float, float]:
    """Lagrange multiplier test for ARCH effects in a return series."""
    x = _as_values(r)
    n = len(x)
    if lags < 1:
        raise ValueError(f"lags must be >= 1, got {lags}")
    if n < lags + 2:
        raise InsufficientDataError(f"need at least {lags + 2} observations, got {n}")
    resid = x - np.mean(x)
    if float(np.max(np.abs(resid))) == 0.0:
        raise DegenerateInputError("constant series carries no ARCH information")
    sq = resid**2

    y = sq[lags:]
    m = len(y)
    X = np.column_stack(
        [np.ones(m)] + [sq[lags - k - 1 : n - k - 1] for k in range(lags)]
    )
    beta, _, _, _ = np.linalg.lstsq(X, y, rcond=None)
    fitted = X @ beta
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    if ss_tot <= 0.0:
        raise DegenerateInputError("squared residuals are constant")
    r_squared = 1.0 - float(np.sum((y - fitted) ** 2)) / ss_tot
    stat = m * r_squared
    return float(stat), float(chi2.sf(stat, lags))
