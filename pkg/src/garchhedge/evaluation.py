"""Strategy scoring by expected utility and hedging effectiveness.

Expected utility of a hedged return series under mean-variance
preferences with risk aversion ``lam``:

    EU = mean(R_p) - 0.5 * lam * var(R_p)

Hedging effectiveness is the expected-utility gain over the unhedged
position; the evaluation risk aversion is the mean fitted value over the
scored span unless given explicitly.  A hedge decided at date t applies to
the return realized over the following interval, for in-sample and
forecast paths alike.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass

import numpy as np
from scipy.stats import ttest_ind

from .errors import (
    AlignmentError,
    DegenerateInputError,
    DomainError,
    InsufficientDataError,
)
from .hedging import HedgerSide
from .market_data import ReturnSeries, align
from .rolling import HedgePath, HedgeRecord

RAHR = "RAHR"
MVHR = "MVHR"
NO_HEDGE = "NO_HEDGE"
STRATEGIES = (RAHR, MVHR, NO_HEDGE)


@dataclass(frozen=True)
class StrategyResult:
    strategy: str
    side: HedgerSide
    mean: float
    sd: float
    eu: float
    he: float


@dataclass(frozen=True)
class ComparisonResult:
    quantity: str
    mean_x: float
    mean_y: float
    statistic: float
    p_value: float


def expected_utility(portfolio, lam_eval: float) -> float:
    """Sample mean minus half the risk aversion times the sample variance."""
    if not lam_eval > 0:
        raise DomainError(f"evaluation risk aversion must be positive, got {lam_eval}")
    x = np.asarray(getattr(portfolio, "values", portfolio), dtype=float)
    if len(x) < 2:
        raise InsufficientDataError(f"need at least 2 observations, got {len(x)}")
    return float(np.mean(x) - 0.5 * lam_eval * np.var(x, ddof=1))


def effectiveness(hedged: ReturnSeries, unhedged: ReturnSeries, lam_eval: float) -> float:
    """Expected-utility gain of hedging over the raw exposure."""
    if hedged.dates != unhedged.dates:
        raise AlignmentError("hedged and unhedged series must cover the same dates")
    return expected_utility(hedged, lam_eval) - expected_utility(unhedged, lam_eval)


def strategy_return_paths(
    spot: ReturnSeries, futures: ReturnSeries, path: HedgePath
) -> tuple[tuple[dt.date, ...], dict[str, np.ndarray], list[HedgeRecord]]:
    """Realized per-date returns of each strategy along a hedge path.

    Each record's ratios apply to the return at the next observation after
    the record date; trailing records with no following return are skipped.
    Returns the applied dates, one return array per strategy, and the
    records that were applied.
    """
    if len(path) == 0:
        raise InsufficientDataError("empty hedge path")
    sides = {r.side for r in path}
    if len(sides) != 1:
        raise AlignmentError("hedge path mixes hedger sides")
    side = sides.pop()

    s, f = align(spot, futures)
    index = {d: i for i, d in enumerate(s.dates)}
    applied: list[tuple[HedgeRecord, int]] = []
    for record in path:
        i = index.get(record.date)
        if i is None:
            raise AlignmentError(f"hedge date {record.date} is not a return date")
        if i + 1 < len(s):
            applied.append((record, i + 1))
    if len(applied) < 2:
        raise InsufficientDataError("need at least 2 hedge records with a following return")

    r_s = np.array([s.values[i] for _, i in applied])
    r_f = np.array([f.values[i] for _, i in applied])
    beta = {
        RAHR: np.array([rec.rahr for rec, _ in applied]),
        MVHR: np.array([rec.mvhr for rec, _ in applied]),
        NO_HEDGE: np.zeros(len(applied)),
    }
    sign = 1.0 if side == HedgerSide.SHORT else -1.0
    portfolios = {name: sign * (r_s - b * r_f) for name, b in beta.items()}
    dates = tuple(s.dates[i] for _, i in applied)
    return dates, portfolios, [rec for rec, _ in applied]


def score_strategies(
    spot: ReturnSeries,
    futures: ReturnSeries,
    path: HedgePath,
    lam_eval: float | None = None,
) -> list[StrategyResult]:
    """Score RAHR, MVHR, and the unhedged position over one hedge path."""
    _, portfolios, records = strategy_return_paths(spot, futures, path)
    if lam_eval is None:
        lam_eval = float(np.mean([rec.lam for rec in records]))
    side = records[0].side
    eu = {name: expected_utility(p, lam_eval) for name, p in portfolios.items()}
    results = []
    for name in STRATEGIES:
        p = portfolios[name]
        results.append(
            StrategyResult(
                strategy=name,
                side=side,
                mean=float(np.mean(p)),
                sd=float(np.std(p, ddof=1)),
                eu=eu[name],
                he=0.0 if name == NO_HEDGE else eu[name] - eu[NO_HEDGE],
            )
        )
    return results


def compare_means(x, y, quantity: str = "") -> ComparisonResult:
    """Welch two-sample t-test on the means of two scalar series."""
    xv = np.asarray(getattr(x, "values", x), dtype=float)
    yv = np.asarray(getattr(y, "values", y), dtype=float)
    if len(xv) < 3 or len(yv) < 3:
        raise InsufficientDataError("need at least 3 points per sample")
    if np.var(xv, ddof=1) == 0.0 and np.var(yv, ddof=1) == 0.0:
        raise DegenerateInputError("both samples are constant")
    stat, p = ttest_ind(xv, yv, equal_var=False)
    return ComparisonResult(
        quantity=quantity,
        mean_x=float(np.mean(xv)),
        mean_y=float(np.mean(yv)),
        statistic=float(stat),
        p_value=float(p),
    )
