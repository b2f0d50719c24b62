"""Hedged-portfolio returns and optimal hedge ratios.

A short hedger owns the commodity and sells futures; a long hedger has the
opposite exposure and buys futures:

    short:  R_p =  r_s - beta * r_f
    long:   R_p = -r_s + beta * r_f

Minimum-variance ratio:     beta = cov(r_s, r_f) / var(r_f)

Utility-maximizing ratio for mean-variance preferences with risk aversion
``lam`` (first-order conditions of the two portfolios above):

    short:  beta = -E(r_f) / (2 * lam * var_f) + cov_sf / var_f
    long:   beta = +E(r_f) / (2 * lam * var_f) + cov_sf / var_f

The first term speculates on the futures drift; it vanishes as risk
aversion grows or when the expected futures return is zero, leaving the
variance-minimizing component.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import AlignmentError, DegenerateInputError, DomainError, InsufficientDataError, ValidationError
from .market_data import ReturnSeries

RAHR = "RAHR"
MVHR = "MVHR"


class HedgerSide(str, Enum):
    SHORT = "short"
    LONG = "long"


@dataclass(frozen=True)
class MomentSet:
    """Window moments feeding the hedge ratios."""

    e_rf: float
    var_f: float
    cov_sf: float
    var_s: float | None = None

    def __post_init__(self):
        if not self.var_f > 0:
            raise ValidationError(f"futures variance must be positive, got {self.var_f}")
        if self.var_s is not None:
            bound = math.sqrt(self.var_f) * math.sqrt(self.var_s)
            if abs(self.cov_sf) > bound * (1.0 + 1e-9):
                raise ValidationError("covariance violates the Cauchy-Schwarz bound")


@dataclass(frozen=True)
class HedgeRatio:
    beta: float
    kind: str

    def __post_init__(self):
        if not math.isfinite(self.beta):
            raise ValidationError(f"hedge ratio must be finite, got {self.beta}")
        if self.kind not in (RAHR, MVHR):
            raise ValidationError(f"unknown hedge ratio kind {self.kind!r}")


def _check_aligned(spot: ReturnSeries, futures: ReturnSeries):
    if spot.frequency != futures.frequency or spot.dates != futures.dates:
        raise AlignmentError("series must share frequency and dates")


def portfolio_returns(
    spot: ReturnSeries, futures: ReturnSeries, beta: float, side: HedgerSide
) -> ReturnSeries:
    """Hedged-portfolio return series for a fixed hedge ratio."""
    _check_aligned(spot, futures)
    if side == HedgerSide.SHORT:
        values = spot.values - beta * futures.values
    else:
        values = -spot.values + beta * futures.values
    return ReturnSeries(spot.frequency, spot.dates, values)


def sample_moments(spot: ReturnSeries, futures: ReturnSeries) -> MomentSet:
    """Sample moments (ddof = 1) over an aligned window."""
    _check_aligned(spot, futures)
    if len(spot) < 3:
        raise InsufficientDataError(f"need at least 3 observations, got {len(spot)}")
    var_f = float(np.var(futures.values, ddof=1))
    if var_f <= 0:
        raise DegenerateInputError("futures variance is zero")
    cov = float(np.cov(spot.values, futures.values, ddof=1)[0, 1])
    return MomentSet(
        e_rf=float(np.mean(futures.values)),
        var_f=var_f,
        cov_sf=cov,
        var_s=float(np.var(spot.values, ddof=1)),
    )


def mvhr(spot: ReturnSeries, futures: ReturnSeries) -> HedgeRatio:
    """Minimum-variance hedge ratio from sample moments."""
    m = sample_moments(spot, futures)
    return HedgeRatio(beta=m.cov_sf / m.var_f, kind=MVHR)


def rahr(moments: MomentSet, lam: float, side: HedgerSide) -> HedgeRatio:
    """Utility-maximizing hedge ratio for the given risk aversion and side."""
    if not lam > 0:
        raise DomainError(f"risk aversion must be positive, got {lam}")
    if not moments.var_f > 0:
        raise DegenerateInputError("futures variance must be positive")
    speculative = moments.e_rf / (2.0 * lam * moments.var_f)
    hedge = moments.cov_sf / moments.var_f
    if side == HedgerSide.SHORT:
        return HedgeRatio(beta=-speculative + hedge, kind=RAHR)
    return HedgeRatio(beta=speculative + hedge, kind=RAHR)
