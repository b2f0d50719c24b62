"""Seeded simulation of GARCH(1,1) / GARCH(1,1)-in-mean return processes.

Draws come from numpy's PCG64 generator seeded explicitly, so fixtures are
bit-reproducible.  A correlated companion series (futures against spot)
shares the conditional volatility path and mixes standard normal
innovations as ``z_f = rho * z_s + sqrt(1 - rho^2) * w`` to hit the
requested population correlation.  The first ``BURN_IN`` draws are
discarded to remove initialization transients.
"""

from __future__ import annotations

import calendar
import datetime as dt
from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import ValidationError
from .garch import GarchParams
from .market_data import FREQUENCIES, MONTHLY, WEEKLY, ReturnSeries

BURN_IN = 500

DEFAULT_START = dt.date(2000, 1, 5)


@dataclass(frozen=True)
class SimSpec:
    n: int
    mu: float = 0.0
    lam: float = 0.0
    params: GarchParams = GarchParams(c=1e-5, a=0.05, b=0.90)
    seed: int = 0
    pair_correlation: float | None = None
    drift_f: float | None = None

    def __post_init__(self):
        if self.n < 1:
            raise ValidationError(f"n must be >= 1, got {self.n}")
        if self.pair_correlation is not None and not abs(self.pair_correlation) < 1:
            raise ValidationError(
                f"pair correlation must lie in (-1, 1), got {self.pair_correlation}"
            )


@njit(cache=True)
def _simulate_kernel(z, mu, lam, c, a, b):
    n = z.shape[0]
    returns = np.empty(n)
    sigma2 = np.empty(n)
    s2 = c / (1.0 - a - b)
    eps = 0.0
    for t in range(n):
        if t > 0:
            s2 = c + a * eps * eps + b * s2
        eps = np.sqrt(s2) * z[t]
        returns[t] = mu + lam * s2 + eps
        sigma2[t] = s2
    return returns, sigma2


def synthetic_calendar(frequency: str, n: int, start: dt.date = DEFAULT_START) -> tuple[dt.date, ...]:
    """Consecutive weekly dates (7-day steps) or calendar month ends."""
    if frequency not in FREQUENCIES:
        raise ValidationError(f"unknown frequency {frequency!r}")
    if frequency == WEEKLY:
        return tuple(start + dt.timedelta(days=7 * k) for k in range(n))
    dates = []
    year, month = start.year, start.month
    for _ in range(n):
        dates.append(dt.date(year, month, calendar.monthrange(year, month)[1]))
        month += 1
        if month > 12:
            month = 1
            year += 1
    return tuple(dates)


def simulate(
    spec: SimSpec,
    frequency: str = WEEKLY,
    start: dt.date = DEFAULT_START,
) -> ReturnSeries | tuple[ReturnSeries, ReturnSeries]:
    """Generate one return series, or an aligned (spot, futures) pair.

    Without ``pair_correlation`` the single in-mean series is returned.
    With it, the primary series plays the spot role and the companion the
    futures role, with optional drift ``drift_f``.
    """
    rng = np.random.default_rng(spec.seed)
    total = spec.n + BURN_IN
    z = rng.standard_normal(total)
    returns, sigma2 = _simulate_kernel(
        z, spec.mu, spec.lam, spec.params.c, spec.params.a, spec.params.b
    )
    dates = synthetic_calendar(frequency, spec.n, start)
    primary = ReturnSeries(frequency, dates, returns[BURN_IN:])
    if spec.pair_correlation is None:
        return primary

    rho = spec.pair_correlation
    w = rng.standard_normal(total)
    z_f = rho * z + np.sqrt(1.0 - rho * rho) * w
    drift = spec.drift_f if spec.drift_f is not None else 0.0
    companion_values = drift + np.sqrt(sigma2) * z_f
    companion = ReturnSeries(frequency, dates, companion_values[BURN_IN:])
    return primary, companion


def prices_from_returns(returns: ReturnSeries, p0: float = 100.0, start: dt.date | None = None):
    """Price path implied by a return series: one extra leading date at p0."""
    if p0 <= 0:
        raise ValidationError(f"initial price must be positive, got {p0}")
    if start is None:
        first = returns.dates[0]
        if returns.frequency == WEEKLY:
            start = first - dt.timedelta(days=7)
        else:
            year, month = first.year, first.month
            month -= 1
            if month == 0:
                month = 12
                year -= 1
            start = dt.date(year, month, calendar.monthrange(year, month)[1])
    dates = (start,) + returns.dates
    prices = p0 * np.exp(np.concatenate([[0.0], np.cumsum(returns.values)]))
    return dates, prices
