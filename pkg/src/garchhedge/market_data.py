"""Price ingestion, volume-based contract rolling, and log-return construction.

CSV input formats (header required, ISO-8601 dates):

    spot:    ``date,price``
    futures: ``date,contract_id,price,volume``

A continuous futures series holds, on each date, the contract with the
largest traded volume and never rolls back to an earlier-expiring contract.
The return over an interval that contains a roll is computed within the
incoming contract (its prior price is back-filled), so the price-level gap
between contracts never enters the return series.
"""

from __future__ import annotations

import csv
import datetime as dt
import io
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    AlignmentError,
    CoverageError,
    InsufficientDataError,
    ParseError,
    ValidationError,
)

WEEKLY = "weekly"
MONTHLY = "monthly"
FREQUENCIES = (WEEKLY, MONTHLY)

SPOT = "spot"
CONTINUOUS_FUTURES = "continuous_futures"

_SPOT_HEADER = ["date", "price"]
_FUTURES_HEADER = ["date", "contract_id", "price", "volume"]


@dataclass(frozen=True)
class PricePoint:
    date: dt.date
    price: float
    volume: int | None = None

    def __post_init__(self):
        if not self.price > 0:
            raise ValidationError(f"price must be positive, got {self.price}")
        if self.volume is not None and self.volume < 0:
            raise ValidationError(f"volume must be non-negative, got {self.volume}")


@dataclass(frozen=True)
class ContractSeries:
    contract_id: str
    points: tuple[PricePoint, ...]

    def __post_init__(self):
        if not self.points:
            raise ValidationError(f"contract {self.contract_id!r}: empty series")
        _check_increasing(self.points, f"contract {self.contract_id!r}")

    @property
    def first_date(self) -> dt.date:
        return self.points[0].date

    @property
    def last_date(self) -> dt.date:
        return self.points[-1].date


@dataclass(frozen=True)
class PriceSeries:
    """Dated prices for one instrument.

    ``roll_dates`` marks every date on which the active futures contract
    changed; ``roll_log_jumps`` holds, per roll, the log price gap between
    the incoming and outgoing contract on the preceding date.  Subtracting
    the cumulative jumps from the raw log prices yields a splice-adjusted
    path whose differences are genuine returns.
    """

    instrument: str
    points: tuple[PricePoint, ...]
    roll_dates: tuple[dt.date, ...] = ()
    roll_log_jumps: tuple[float, ...] = ()

    def __post_init__(self):
        if self.instrument not in (SPOT, CONTINUOUS_FUTURES):
            raise ValidationError(f"unknown instrument {self.instrument!r}")
        if not self.points:
            raise ValidationError("empty price series")
        _check_increasing(self.points, self.instrument)
        if len(self.roll_dates) != len(self.roll_log_jumps):
            raise ValidationError("roll_dates and roll_log_jumps must be parallel")
        point_dates = {p.date for p in self.points}
        for d in self.roll_dates:
            if d not in point_dates:
                raise ValidationError(f"roll date {d} is not a series date")

    @property
    def dates(self) -> tuple[dt.date, ...]:
        return tuple(p.date for p in self.points)


@dataclass(frozen=True)
class ReturnSeries:
    """Dated logarithmic returns at a fixed sampling frequency."""

    frequency: str
    dates: tuple[dt.date, ...]
    values: np.ndarray

    def __post_init__(self):
        if self.frequency not in FREQUENCIES:
            raise ValidationError(f"unknown frequency {self.frequency!r}")
        values = np.asarray(self.values, dtype=float)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "dates", tuple(self.dates))
        if len(self.dates) != len(values):
            raise ValidationError("dates and values must have equal length")
        for prev, cur in zip(self.dates, self.dates[1:]):
            if cur <= prev:
                raise ValidationError(f"dates not strictly increasing at {cur}")

    def __len__(self) -> int:
        return len(self.values)

    @property
    def observations(self) -> tuple[tuple[dt.date, float], ...]:
        return tuple(zip(self.dates, (float(v) for v in self.values)))


def _check_increasing(points, label):
    for prev, cur in zip(points, points[1:]):
        if cur.date <= prev.date:
            raise ValidationError(f"{label}: dates not strictly increasing at {cur.date}")


# ---------------------------------------------------------------------------
# CSV ingestion
# ---------------------------------------------------------------------------


def load_prices(source) -> PriceSeries | list[ContractSeries]:
    """Parse a price CSV; the header decides spot versus futures.

    ``source`` may be a path, a text stream, or a UTF-8 byte stream.
    Spot input yields a :class:`PriceSeries`; futures input yields one
    :class:`ContractSeries` per distinct contract, each sorted by date.
    """
    reader, close = _open_csv(source)
    try:
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError("empty input, expected a header row", line_no=1)
        cols = [c.strip().lower() for c in header]
        if cols == _SPOT_HEADER:
            return _load_spot(reader)
        if cols == _FUTURES_HEADER:
            return _load_futures(reader)
        raise ParseError(
            f"unrecognized header {','.join(cols)!r}; expected "
            f"{','.join(_SPOT_HEADER)!r} or {','.join(_FUTURES_HEADER)!r}",
            line_no=1,
        )
    finally:
        if close is not None:
            close()


def _open_csv(source):
    if isinstance(source, (str, Path)):
        fh = open(source, "r", encoding="utf-8", newline="")
        return csv.reader(fh), fh.close
    if isinstance(source, (bytes, bytearray)):
        return csv.reader(io.StringIO(source.decode("utf-8"))), None
    if hasattr(source, "read"):
        data = source.read()
        if isinstance(data, bytes):
            data = data.decode("utf-8")
        return csv.reader(io.StringIO(data)), None
    raise TypeError(f"unsupported source type {type(source)!r}")


def _parse_date(text, line_no):
    try:
        return dt.date.fromisoformat(text.strip())
    except ValueError:
        raise ParseError(f"invalid date {text!r}", line_no=line_no)


def _parse_price(text, line_no):
    try:
        price = float(text)
    except ValueError:
        raise ParseError(f"invalid price {text!r}", line_no=line_no)
    if not math.isfinite(price) or price <= 0:
        raise ValidationError(f"price must be positive, got {text!r}", line_no=line_no)
    return price


def _parse_volume(text, line_no):
    try:
        volume = int(text)
    except ValueError:
        raise ParseError(f"invalid volume {text!r}", line_no=line_no)
    if volume < 0:
        raise ValidationError(f"volume must be non-negative, got {volume}", line_no=line_no)
    return volume


def _load_spot(reader) -> PriceSeries:
    rows = []
    for row in reader:
        line_no = reader.line_num
        if not row:
            continue
        if len(row) != 2:
            raise ParseError(f"expected 2 fields, got {len(row)}", line_no=line_no)
        date = _parse_date(row[0], line_no)
        price = _parse_price(row[1], line_no)
        rows.append((date, price))
    if not rows:
        raise ParseError("no data rows", line_no=1)
    rows.sort(key=lambda r: r[0])
    for (d1, _), (d2, _) in zip(rows, rows[1:]):
        if d1 == d2:
            raise ValidationError(f"duplicate date {d1}")
    points = tuple(PricePoint(d, p) for d, p in rows)
    return PriceSeries(SPOT, points)


def _load_futures(reader) -> list[ContractSeries]:
    by_contract: dict[str, list[tuple[dt.date, float, int]]] = {}
    for row in reader:
        line_no = reader.line_num
        if not row:
            continue
        if len(row) != 4:
            raise ParseError(f"expected 4 fields, got {len(row)}", line_no=line_no)
        date = _parse_date(row[0], line_no)
        contract_id = row[1].strip()
        if not contract_id:
            raise ParseError("empty contract_id", line_no=line_no)
        price = _parse_price(row[2], line_no)
        volume = _parse_volume(row[3], line_no)
        by_contract.setdefault(contract_id, []).append((date, price, volume))
    if not by_contract:
        raise ParseError("no data rows", line_no=1)
    series = []
    for contract_id, rows in by_contract.items():
        rows.sort(key=lambda r: r[0])
        for (d1, _, _), (d2, _, _) in zip(rows, rows[1:]):
            if d1 == d2:
                raise ValidationError(f"contract {contract_id!r}: duplicate date {d1}")
        points = tuple(PricePoint(d, p, v) for d, p, v in rows)
        series.append(ContractSeries(contract_id, points))
    series.sort(key=lambda s: (s.first_date, s.contract_id))
    return series


# ---------------------------------------------------------------------------
# Volume roll
# ---------------------------------------------------------------------------


def roll_by_volume(contracts: list[ContractSeries]) -> PriceSeries:
    """Build a continuous futures series by holding the volume leader.

    The active contract switches on the first date a later-expiring (or
    equally-expiring) contract trades strictly more volume, and never
    switches back to a contract expiring earlier than the current one.
    Volume ties keep the current contract; ties among challengers prefer
    the later expiry, then the larger contract_id.
    """
    if not contracts:
        raise ValidationError("no contracts supplied")
    lookup = {c.contract_id: {p.date: p for p in c.points} for c in contracts}
    expiry = {c.contract_id: c.last_date for c in contracts}
    all_dates = sorted({p.date for c in contracts for p in c.points})

    def rank(cid, d):
        p = lookup[cid][d]
        return (p.volume or 0, expiry[cid], cid)

    active: str | None = None
    points: list[PricePoint] = []
    roll_dates: list[dt.date] = []
    jumps: list[float] = []
    prev_date: dt.date | None = None

    for d in all_dates:
        candidates = [c.contract_id for c in contracts if d in lookup[c.contract_id]]
        if active is None:
            active = max(candidates, key=lambda cid: rank(cid, d))
        else:
            eligible = [
                cid for cid in candidates
                if cid != active and expiry[cid] >= expiry[active]
            ]
            if d in lookup[active]:
                if eligible:
                    best = max(eligible, key=lambda cid: rank(cid, d))
                    if (lookup[best][d].volume or 0) > (lookup[active][d].volume or 0):
                        active = _switch(active, best, d, prev_date, lookup, roll_dates, jumps)
            else:
                if not eligible:
                    raise CoverageError(
                        f"no eligible contract covers {d} "
                        f"(active {active!r} has no price and only earlier-expiring "
                        "contracts trade)"
                    )
                best = max(eligible, key=lambda cid: rank(cid, d))
                active = _switch(active, best, d, prev_date, lookup, roll_dates, jumps)
        src = lookup[active][d]
        points.append(PricePoint(d, src.price, src.volume))
        prev_date = d

    return PriceSeries(CONTINUOUS_FUTURES, tuple(points), tuple(roll_dates), tuple(jumps))


def _switch(outgoing, incoming, d, prev_date, lookup, roll_dates, jumps):
    roll_dates.append(d)
    # Log gap between the contracts on the previous date; removed later so the
    # roll-date return is the incoming contract's own return.  Without a prior
    # price for the incoming contract the splice falls back to the raw gap.
    jump = 0.0
    if prev_date is not None and prev_date in lookup[incoming]:
        jump = math.log(lookup[incoming][prev_date].price) - math.log(
            lookup[outgoing][prev_date].price
        )
    jumps.append(jump)
    return incoming


# ---------------------------------------------------------------------------
# Returns
# ---------------------------------------------------------------------------


def _period_key(date: dt.date, frequency: str):
    if frequency == WEEKLY:
        iso = date.isocalendar()
        return (iso[0], iso[1])
    return (date.year, date.month)


def to_returns(series: PriceSeries, frequency: str) -> ReturnSeries:
    """Differenced log prices sampled at the last observation per period.

    Weekly sampling keeps the last observation of each ISO calendar week,
    monthly the last of each calendar month.  Roll-date log jumps are
    subtracted cumulatively before differencing.
    """
    if frequency not in FREQUENCIES:
        raise ValidationError(f"unknown frequency {frequency!r}")

    cum_jump = 0.0
    jump_at = dict(zip(series.roll_dates, series.roll_log_jumps))
    log_prices = []
    for p in series.points:
        cum_jump += jump_at.get(p.date, 0.0)
        log_prices.append((p.date, math.log(p.price) - cum_jump))

    sampled: list[tuple[dt.date, float]] = []
    cur_key = None
    for date, lp in log_prices:
        key = _period_key(date, frequency)
        if key == cur_key:
            sampled[-1] = (date, lp)
        else:
            sampled.append((date, lp))
            cur_key = key

    if len(sampled) < 2:
        raise InsufficientDataError(
            f"need at least 2 sampled observations, got {len(sampled)}"
        )
    dates = tuple(d for d, _ in sampled[1:])
    values = np.diff(np.array([lp for _, lp in sampled]))
    return ReturnSeries(frequency, dates, values)


def align(spot: ReturnSeries, futures: ReturnSeries) -> tuple[ReturnSeries, ReturnSeries]:
    """Restrict both return series to their common dates, order preserved."""
    if spot.frequency != futures.frequency:
        raise AlignmentError(
            f"frequency mismatch: {spot.frequency} vs {futures.frequency}"
        )
    common = set(spot.dates) & set(futures.dates)
    if not common:
        raise AlignmentError("no overlapping dates")
    s_idx = [i for i, d in enumerate(spot.dates) if d in common]
    f_idx = [i for i, d in enumerate(futures.dates) if d in common]
    dates = tuple(spot.dates[i] for i in s_idx)
    return (
        ReturnSeries(spot.frequency, dates, spot.values[s_idx]),
        ReturnSeries(futures.frequency, dates, futures.values[f_idx]),
    )
