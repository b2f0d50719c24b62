"""Rolling-window risk aversion estimation and hedge-path construction.

Every window of ``WindowSpec.length`` aligned observations yields one
record dated at the window's final observation.  The in-mean model is
fitted on the hedger's exposure series (spot for short hedgers, futures
for long hedgers) to obtain that window's risk aversion; the window's
sample moments feed both hedge ratios.  A record's ratios apply to the
return realized over the following interval, so nothing in a record uses
information beyond its date.

Forecast records are decided at a record date t and target the next
observation: risk aversion and the expected futures return follow AR(1)
one-step forecasts refitted on the full expanding history, while the
variance, covariance and hence the minimum-variance ratio follow a random
walk.  Non-positive risk aversion forecasts are floored at ``lambda_min``
and flagged.
"""

from __future__ import annotations

import csv
import datetime as dt
from dataclasses import dataclass
from typing import Iterator, NamedTuple

import numpy as np

from .errors import DegenerateInputError, FitError, InsufficientDataError, ValidationError
from .garch import FitConfig, fit_garch_m
from .hedging import HedgerSide, MomentSet, rahr, sample_moments
from .market_data import MONTHLY, WEEKLY, ReturnSeries, align

IN_SAMPLE = "in_sample_t"
FORECAST = "forecast_t_plus_1"

LAMBDA_MIN = 0.01

# Observation counts approximating a 10-year span at each frequency.
_TEN_YEAR_OBSERVATIONS = {WEEKLY: 522, MONTHLY: 120}


@dataclass(frozen=True)
class WindowSpec:
    length: int
    step: int = 1

    def __post_init__(self):
        if self.length < 3:
            raise ValidationError(f"window length must be >= 3, got {self.length}")
        if self.step < 1:
            raise ValidationError(f"step must be >= 1, got {self.step}")


def ten_year_window(frequency: str, years: int = 10) -> WindowSpec:
    """Default rolling window: ten years of observations at the frequency."""
    per_decade = _TEN_YEAR_OBSERVATIONS[frequency]
    return WindowSpec(length=round(per_decade * years / 10))


class LambdaEstimate(NamedTuple):
    date: dt.date
    value: float
    converged: bool


@dataclass(frozen=True)
class Ar1Fit:
    phi0: float
    phi1: float
    residual_var: float

    def forecast(self, last: float) -> float:
        return self.phi0 + self.phi1 * last


@dataclass(frozen=True)
class HedgeRecord:
    date: dt.date
    side: HedgerSide
    lam: float
    moments: MomentSet
    rahr: float
    mvhr: float
    mode: str
    converged: bool
    lambda_floored: bool = False


@dataclass(frozen=True)
class HedgePath:
    records: tuple[HedgeRecord, ...]

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[HedgeRecord]:
        return iter(self.records)

    def __getitem__(self, i) -> HedgeRecord:
        return self.records[i]

    @property
    def dates(self) -> tuple[dt.date, ...]:
        return tuple(r.date for r in self.records)

    def lambdas(self) -> np.ndarray:
        return np.array([r.lam for r in self.records])

    def rahrs(self) -> np.ndarray:
        return np.array([r.rahr for r in self.records])

    def mvhrs(self) -> np.ndarray:
        return np.array([r.mvhr for r in self.records])


def _exposure(spot: ReturnSeries, futures: ReturnSeries, side: HedgerSide) -> ReturnSeries:
    # A short hedger owns the commodity, so risk aversion is read off the
    # spot series; a long hedger's exposure is the futures series.
    return spot if side == HedgerSide.SHORT else futures


def _window_lambda(values: np.ndarray, cfg: FitConfig, prev: LambdaEstimate | None):
    """One window's fitted risk aversion with a carry-forward fallback."""
    try:
        fit = fit_garch_m(values, cfg)
        return fit.lam, fit.converged
    except FitError:
        if prev is not None:
            return prev.value, False
        mean = float(np.mean(values))
        var = float(np.var(values, ddof=1))
        return mean / var if var > 0 else LAMBDA_MIN, False


def _iter_windows(n: int, spec: WindowSpec, floor: int):
    if spec.length < floor:
        raise InsufficientDataError(
            f"window length {spec.length} is below the estimation floor {floor}"
        )
    if n < spec.length:
        raise InsufficientDataError(
            f"need at least {spec.length} aligned observations, got {n}"
        )
    return range(spec.length - 1, n, spec.step)


def risk_aversion_series(
    spot: ReturnSeries,
    futures: ReturnSeries,
    side: HedgerSide,
    spec: WindowSpec,
    cfg: FitConfig = FitConfig(),
) -> list[LambdaEstimate]:
    """Per-window risk aversion of one hedger type over a rolling window."""
    s, f = align(spot, futures)
    exposure = _exposure(s, f, side)
    out: list[LambdaEstimate] = []
    for end in _iter_windows(len(s), spec, cfg.min_observations):
        window = exposure.values[end - spec.length + 1 : end + 1]
        lam, converged = _window_lambda(window, cfg, out[-1] if out else None)
        out.append(LambdaEstimate(s.dates[end], lam, converged))
    return out


def rolling_hedges(
    spot: ReturnSeries,
    futures: ReturnSeries,
    side: HedgerSide,
    spec: WindowSpec,
    cfg: FitConfig = FitConfig(),
    lambda_min: float = LAMBDA_MIN,
) -> HedgePath:
    """Hedge ratios for every rolling window, dated at the window end."""
    s, f = align(spot, futures)
    exposure = _exposure(s, f, side)
    records: list[HedgeRecord] = []
    prev: LambdaEstimate | None = None
    for end in _iter_windows(len(s), spec, cfg.min_observations):
        lo = end - spec.length + 1
        date = s.dates[end]
        window_s = ReturnSeries(s.frequency, s.dates[lo : end + 1], s.values[lo : end + 1])
        window_f = ReturnSeries(f.frequency, f.dates[lo : end + 1], f.values[lo : end + 1])
        lam_raw, converged = _window_lambda(exposure.values[lo : end + 1], cfg, prev)
        prev = LambdaEstimate(date, lam_raw, converged)
        lam_used, floored = _floor_lambda(lam_raw, lambda_min)
        moments = sample_moments(window_s, window_f)
        beta_mv = moments.cov_sf / moments.var_f
        beta_ra = rahr(moments, lam_used, side).beta
        records.append(
            HedgeRecord(
                date=date,
                side=side,
                lam=lam_used,
                moments=moments,
                rahr=beta_ra,
                mvhr=beta_mv,
                mode=IN_SAMPLE,
                converged=converged,
                lambda_floored=floored,
            )
        )
    return HedgePath(tuple(records))


def _floor_lambda(lam: float, lambda_min: float) -> tuple[float, bool]:
    if lam < lambda_min:
        return lambda_min, True
    return lam, False


def fit_ar1(series) -> Ar1Fit:
    """Least-squares fit of y_t = phi0 + phi1 * y_{t-1} + e_t.

    A constant series is represented as (phi0 = c, phi1 = 0), which is the
    unique fixed-point-consistent choice among the perfectly fitting lines.
    """
    y = np.asarray(getattr(series, "values", series), dtype=float)
    if len(y) < 3:
        raise InsufficientDataError(f"need at least 3 points, got {len(y)}")
    lagged = y[:-1]
    response = y[1:]
    spread = float(np.max(lagged) - np.min(lagged))
    if spread == 0.0:
        if float(np.max(np.abs(response - lagged[0]))) == 0.0:
            return Ar1Fit(phi0=float(lagged[0]), phi1=0.0, residual_var=0.0)
        raise DegenerateInputError("lagged regressor is constant")
    m = len(response)
    X = np.column_stack([np.ones(m), lagged])
    beta, _, _, _ = np.linalg.lstsq(X, response, rcond=None)
    resid = response - X @ beta
    residual_var = float(np.sum(resid**2)) / max(m - 2, 1)
    return Ar1Fit(phi0=float(beta[0]), phi1=float(beta[1]), residual_var=residual_var)


def forecast_hedges(
    path: HedgePath,
    target_start: dt.date | None = None,
    min_history: int = 4,
    lambda_min: float = LAMBDA_MIN,
) -> HedgePath:
    """One-step-ahead hedges decided at each record date.

    For every consecutive pair of records (t, t+1) with enough history and,
    when given, a target date at or after ``target_start``, AR(1) fits on
    the risk aversion and expected futures return histories up to t produce
    the forecasts; the variance and covariance carry forward unchanged.
    The emitted record is dated t and applies to the interval ending at the
    target.
    """
    if len(path) < 2:
        raise InsufficientDataError("need at least 2 records to form forecasts")
    min_history = max(min_history, 3)
    lam_hist = path.lambdas()
    e_hist = np.array([r.moments.e_rf for r in path.records])
    records: list[HedgeRecord] = []
    for i in range(len(path) - 1):
        target = path[i + 1].date
        if target_start is not None and target < target_start:
            continue
        if i + 1 < min_history:
            continue
        lam_next = fit_ar1(lam_hist[: i + 1]).forecast(lam_hist[i])
        e_next = fit_ar1(e_hist[: i + 1]).forecast(e_hist[i])
        lam_used, floored = _floor_lambda(lam_next, lambda_min)
        base = path[i]
        moments = MomentSet(
            e_rf=float(e_next),
            var_f=base.moments.var_f,
            cov_sf=base.moments.cov_sf,
            var_s=base.moments.var_s,
        )
        records.append(
            HedgeRecord(
                date=base.date,
                side=base.side,
                lam=lam_used,
                moments=moments,
                rahr=rahr(moments, lam_used, base.side).beta,
                mvhr=base.mvhr,
                mode=FORECAST,
                converged=True,
                lambda_floored=floored,
            )
        )
    return HedgePath(tuple(records))


# ---------------------------------------------------------------------------
# HedgePath CSV interface
# ---------------------------------------------------------------------------

_CSV_COLUMNS = [
    "date", "side", "lambda", "e_rf", "var_f", "cov_sf",
    "rahr", "mvhr", "mode", "converged",
]


def write_hedge_csv(path: HedgePath, stream) -> None:
    """One row per record in the documented column order."""
    writer = csv.writer(stream)
    writer.writerow(_CSV_COLUMNS)
    for r in path:
        writer.writerow([
            r.date.isoformat(),
            r.side.value,
            repr(r.lam),
            repr(r.moments.e_rf),
            repr(r.moments.var_f),
            repr(r.moments.cov_sf),
            repr(r.rahr),
            repr(r.mvhr),
            r.mode,
            str(r.converged).lower(),
        ])


def read_hedge_csv(stream) -> HedgePath:
    reader = csv.reader(stream)
    header = next(reader, None)
    if header is None or [c.strip() for c in header] != _CSV_COLUMNS:
        raise ValidationError(f"expected hedge CSV header {','.join(_CSV_COLUMNS)!r}")
    records = []
    for row in reader:
        if not row:
            continue
        if len(row) != len(_CSV_COLUMNS):
            raise ValidationError(f"expected {len(_CSV_COLUMNS)} fields, got {len(row)}")
        moments = MomentSet(e_rf=float(row[3]), var_f=float(row[4]), cov_sf=float(row[5]))
        records.append(
            HedgeRecord(
                date=dt.date.fromisoformat(row[0]),
                side=HedgerSide(row[1]),
                lam=float(row[2]),
                moments=moments,
                rahr=float(row[6]),
                mvhr=float(row[7]),
                mode=row[8],
                converged=row[9] == "true",
            )
        )
    return HedgePath(tuple(records))
