"""Command-line orchestration: ingestion, diagnostics, estimation, rolling
and forecast hedging, and evaluation, with reproducible file outputs.

Global flags (before the subcommand) supply the config file, seed, output
directory, and sampling frequency; subcommand flags override config-file
values.  All outputs are deterministic for a fixed config and seed: floats
are written with full round-trip precision and files carry self-describing
header rows.

Exit codes: 0 success, 2 input error, 3 data error, 4 fit error,
1 unexpected failure.
"""

from __future__ import annotations

import argparse
import csv
import datetime as dt
import hashlib
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .diagnostics import SummaryStats, summarize
from .errors import (
    AlignmentError,
    ConfigError,
    CoverageError,
    DegenerateInputError,
    DomainError,
    FitError,
    InsufficientDataError,
    ParseError,
    ValidationError,
)
from .evaluation import (
    MVHR,
    NO_HEDGE,
    RAHR,
    STRATEGIES,
    compare_means,
    score_strategies,
    strategy_return_paths,
)
from .garch import FitConfig, GarchMFit, GarchParams, fit_garch_m
from .hedging import HedgerSide
from .market_data import (
    FREQUENCIES,
    WEEKLY,
    PriceSeries,
    align,
    load_prices,
    roll_by_volume,
    to_returns,
)
from .rolling import (
    LAMBDA_MIN,
    HedgePath,
    WindowSpec,
    forecast_hedges,
    read_hedge_csv,
    rolling_hedges,
    ten_year_window,
    write_hedge_csv,
)
from .synthetic import DEFAULT_START, SimSpec, prices_from_returns, simulate

_INPUT_ERRORS = (ParseError, ConfigError, FileNotFoundError, IsADirectoryError)
_DATA_ERRORS = (
    ValidationError,
    CoverageError,
    AlignmentError,
    InsufficientDataError,
    DegenerateInputError,
    DomainError,
)

EXIT_INPUT = 2
EXIT_DATA = 3
EXIT_FIT = 4


class StageError(Exception):
    """Wraps a failure with the pipeline stage it occurred in."""

    def __init__(self, stage, cause):
        super().__init__(f"[{stage}] {cause}")
        self.stage = stage
        self.cause = cause


# ---------------------------------------------------------------------------
# Run configuration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RunConfig:
    spot: Path
    futures: Path
    frequency: str
    out_dir: Path
    in_sample_end: dt.date
    window_obs: int | None = None
    window_years: int = 10
    sides: tuple[HedgerSide, ...] = (HedgerSide.SHORT, HedgerSide.LONG)
    seed: int = 0
    restarts: int = 2
    tol: float = 1e-8
    min_observations: int = 100
    lambda_min: float = LAMBDA_MIN
    table4_scale: bool = False

    def __post_init__(self):
        if self.frequency not in FREQUENCIES:
            raise ConfigError(f"unknown frequency {self.frequency!r}")
        for path in (self.spot, self.futures):
            if not Path(path).is_file():
                raise ConfigError(f"input file not found: {path}")
        if not self.sides:
            raise ConfigError("at least one hedger side is required")

    def window(self) -> WindowSpec:
        if self.window_obs is not None:
            return WindowSpec(length=self.window_obs)
        return ten_year_window(self.frequency, self.window_years)

    def fit_config(self) -> FitConfig:
        return FitConfig(
            restarts=self.restarts,
            loglik_rel_tol=self.tol,
            min_observations=self.min_observations,
            seed=self.seed,
        )


def parse_config_file(path) -> dict[str, str]:
    """Flat ``key = value`` lines; blank lines and # comments ignored."""
    values: dict[str, str] = {}
    text = Path(path).read_text(encoding="utf-8")
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {line_no}: expected key = value, got {raw!r}")
        key, _, value = line.partition("=")
        values[key.strip()] = value.strip()
    return values


def _parse_sides(text: str) -> tuple[HedgerSide, ...]:
    sides = []
    for part in text.split(","):
        part = part.strip().lower()
        if not part:
            continue
        try:
            sides.append(HedgerSide(part))
        except ValueError:
            raise ConfigError(f"unknown hedger side {part!r}")
    return tuple(sides)


def build_run_config(args) -> RunConfig:
    raw = parse_config_file(args.config) if args.config else {}

    def pick(key, flag_value, default=None):
        if flag_value is not None:
            return flag_value
        if key in raw:
            return raw[key]
        return default

    def require(key, flag_value):
        value = pick(key, flag_value)
        if value is None:
            raise ConfigError(f"missing required config key {key!r}")
        return value

    try:
        in_sample_end = dt.date.fromisoformat(str(require("in_sample_end", args.in_sample_end)))
    except ValueError as exc:
        raise ConfigError(f"invalid in_sample_end: {exc}")
    window_obs = pick("window_obs", None)
    return RunConfig(
        spot=Path(require("spot", args.spot)),
        futures=Path(require("futures", args.futures)),
        frequency=str(pick("frequency", args.frequency, WEEKLY)),
        out_dir=Path(require("out_dir", args.out_dir)),
        in_sample_end=in_sample_end,
        window_obs=int(window_obs) if window_obs is not None else None,
        window_years=int(pick("window_years", None, 10)),
        sides=_parse_sides(str(pick("sides", None, "short,long"))),
        seed=int(pick("seed", args.seed, 0)),
        restarts=int(pick("restarts", None, 2)),
        tol=float(pick("tol", None, 1e-8)),
        min_observations=int(pick("min_observations", None, 100)),
        lambda_min=float(pick("lambda_min", None, LAMBDA_MIN)),
        table4_scale=str(pick("table4_scale", None, "false")).lower() == "true",
    )


# ---------------------------------------------------------------------------
# Shared helpers
# ---------------------------------------------------------------------------


def _fmt(x: float) -> str:
    return repr(float(x))


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _load_return_pair(spot_path, futures_path, frequency):
    spot_prices = load_prices(spot_path)
    if not isinstance(spot_prices, PriceSeries):
        raise ValidationError(f"{spot_path}: expected a spot CSV with header date,price")
    futures_contracts = load_prices(futures_path)
    if isinstance(futures_contracts, PriceSeries):
        raise ValidationError(
            f"{futures_path}: expected a futures CSV with header date,contract_id,price,volume"
        )
    continuous = roll_by_volume(futures_contracts)
    spot_r = to_returns(spot_prices, frequency)
    fut_r = to_returns(continuous, frequency)
    return align(spot_r, fut_r), continuous


def _load_single_returns(path, frequency):
    prices = load_prices(path)
    if isinstance(prices, PriceSeries):
        return to_returns(prices, frequency)
    return to_returns(roll_by_volume(prices), frequency)


def _open_out(path):
    if path is None:
        return sys.stdout, lambda: None
    fh = open(path, "w", encoding="utf-8", newline="\n")
    return fh, fh.close


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_simulate(args) -> int:
    out_dir = Path(args.out_dir or ".")
    out_dir.mkdir(parents=True, exist_ok=True)
    params = GarchParams(c=args.c, a=args.a, b=args.b)
    spec = SimSpec(
        n=args.n,
        mu=args.mu,
        lam=args.lam,
        params=params,
        seed=args.seed or 0,
        pair_correlation=args.rho,
        drift_f=args.drift_f,
    )
    start = dt.date.fromisoformat(args.start) if args.start else DEFAULT_START
    spot_r, fut_r = simulate(spec, frequency=args.frequency or WEEKLY, start=start)

    dates_s, prices_s = prices_from_returns(spot_r, p0=args.p0)
    _write_csv(
        out_dir / "spot.csv",
        ["date", "price"],
        ([d.isoformat(), _fmt(p)] for d, p in zip(dates_s, prices_s)),
    )
    dates_f, prices_f = prices_from_returns(fut_r, p0=args.p0)
    _write_csv(
        out_dir / "futures.csv",
        ["date", "contract_id", "price", "volume"],
        ([d.isoformat(), "SYN1", _fmt(p), "1000"] for d, p in zip(dates_f, prices_f)),
    )
    print(f"wrote {out_dir / 'spot.csv'} and {out_dir / 'futures.csv'}")
    return 0


def cmd_ingest(args) -> int:
    out_dir = Path(args.out_dir or ".")
    out_dir.mkdir(parents=True, exist_ok=True)
    frequency = args.frequency or WEEKLY
    (spot_r, fut_r), continuous = _load_return_pair(args.spot, args.futures, frequency)

    _write_csv(
        out_dir / "continuous_futures.csv",
        ["date", "price"],
        ([p.date.isoformat(), _fmt(p.price)] for p in continuous.points),
    )
    _write_csv(
        out_dir / "roll_dates.csv",
        ["date", "log_jump"],
        (
            [d.isoformat(), _fmt(j)]
            for d, j in zip(continuous.roll_dates, continuous.roll_log_jumps)
        ),
    )
    for name, series in (("spot_returns", spot_r), ("futures_returns", fut_r)):
        _write_csv(
            out_dir / f"{name}.csv",
            ["date", "log_return"],
            ([d.isoformat(), _fmt(v)] for d, v in zip(series.dates, series.values)),
        )
    print(f"wrote 4 files to {out_dir}")
    return 0


_DESCRIBE_COLUMNS = [
    "series", "mean", "stdev", "min", "max", "skewness", "excess_kurtosis",
    "bj_stat", "bj_p", "bj_sig_1pct", "lm_stat", "lm_p", "lm_sig_1pct",
]


def _describe_row(name: str, stats: SummaryStats) -> list[str]:
    return [
        name,
        _fmt(stats.mean), _fmt(stats.stdev), _fmt(stats.minimum), _fmt(stats.maximum),
        _fmt(stats.skewness), _fmt(stats.excess_kurtosis),
        _fmt(stats.bj_stat), _fmt(stats.bj_p), "*" if stats.bj_p < 0.01 else "",
        _fmt(stats.lm_stat), _fmt(stats.lm_p), "*" if stats.lm_p < 0.01 else "",
    ]


def cmd_describe(args) -> int:
    frequency = args.frequency or WEEKLY
    (spot_r, fut_r), _ = _load_return_pair(args.spot, args.futures, frequency)
    rows = [
        _describe_row("spot", summarize(spot_r)),
        _describe_row("futures", summarize(fut_r)),
    ]
    stream, close = _open_out(args.out)
    try:
        if args.format == "json":
            payload = [dict(zip(_DESCRIBE_COLUMNS, row)) for row in rows]
            json.dump(payload, stream, indent=2, sort_keys=True)
            stream.write("\n")
        else:
            writer = csv.writer(stream, lineterminator="\n")
            writer.writerow(_DESCRIBE_COLUMNS)
            writer.writerows(rows)
    finally:
        close()
    return 0


def _fit_payload(fit: GarchMFit, n: int) -> dict:
    return {
        "mu": fit.mu,
        "lambda": fit.lam,
        "c": fit.params.c,
        "a": fit.params.a,
        "b": fit.params.b,
        "loglik": fit.loglik,
        "converged": fit.converged,
        "iterations": fit.iterations,
        "n_observations": n,
    }


def cmd_estimate(args) -> int:
    frequency = args.frequency or WEEKLY
    returns = _load_single_returns(args.input, frequency)
    cfg = FitConfig(
        restarts=args.restarts,
        loglik_rel_tol=args.tol,
        min_observations=args.min_obs,
        seed=args.seed or 0,
    )
    fit = fit_garch_m(returns, cfg)
    payload = _fit_payload(fit, len(returns))

    stream, close = _open_out(args.out)
    try:
        if args.format == "csv":
            writer = csv.writer(stream, lineterminator="\n")
            writer.writerow(["parameter", "value"])
            for key, value in payload.items():
                writer.writerow([key, _fmt(value) if isinstance(value, float) else value])
        else:
            json.dump(payload, stream, indent=2, sort_keys=True)
            stream.write("\n")
    finally:
        close()
    if args.variance_path:
        _write_csv(
            Path(args.variance_path),
            ["date", "sigma2"],
            (
                [d.isoformat(), _fmt(v)]
                for d, v in zip(returns.dates, fit.sigma2_path)
            ),
        )
    return 0


def cmd_roll_hedges(args) -> int:
    frequency = args.frequency or WEEKLY
    (spot_r, fut_r), _ = _load_return_pair(args.spot, args.futures, frequency)
    spec = (
        WindowSpec(length=args.window_obs)
        if args.window_obs
        else ten_year_window(frequency, args.window_years)
    )
    cfg = FitConfig(
        restarts=args.restarts,
        loglik_rel_tol=args.tol,
        min_observations=args.min_obs,
        seed=args.seed or 0,
    )
    path = rolling_hedges(
        spot_r, fut_r, HedgerSide(args.side), spec, cfg, lambda_min=args.lambda_min
    )
    stream, close = _open_out(args.out)
    try:
        write_hedge_csv(path, stream)
    finally:
        close()
    return 0


def cmd_forecast_hedges(args) -> int:
    with open(args.hedges, "r", encoding="utf-8", newline="") as fh:
        path = read_hedge_csv(fh)
    target_start = dt.date.fromisoformat(args.target_start) if args.target_start else None
    forecasts = forecast_hedges(
        path,
        target_start=target_start,
        min_history=args.min_history,
        lambda_min=args.lambda_min,
    )
    stream, close = _open_out(args.out)
    try:
        write_hedge_csv(forecasts, stream)
    finally:
        close()
    return 0


_EVAL_COLUMNS = ["mode", "side", "strategy", "mean", "sd", "eu", "he"]
_COMPARE_COLUMNS = ["quantity", "mean_x", "mean_y", "statistic", "p_value", "sig_1pct"]


def _evaluation_rows(spot_r, fut_r, path: HedgePath, lam_eval, scale: float):
    rows = []
    groups: dict[tuple[str, HedgerSide], list] = {}
    for record in path:
        groups.setdefault((record.mode, record.side), []).append(record)
    for (mode, side), records in sorted(
        groups.items(), key=lambda item: (item[0][0], item[0][1].value)
    ):
        sub = HedgePath(tuple(records))
        for result in score_strategies(spot_r, fut_r, sub, lam_eval=lam_eval):
            rows.append([
                mode, side.value, result.strategy,
                _fmt(result.mean * scale), _fmt(result.sd * scale),
                _fmt(result.eu * scale), _fmt(result.he * scale),
            ])
    return rows


def _comparison_row(result) -> list[str]:
    return [
        result.quantity,
        _fmt(result.mean_x), _fmt(result.mean_y),
        _fmt(result.statistic), _fmt(result.p_value),
        "*" if result.p_value < 0.01 else "",
    ]


def cmd_evaluate(args) -> int:
    frequency = args.frequency or WEEKLY
    (spot_r, fut_r), _ = _load_return_pair(args.spot, args.futures, frequency)
    with open(args.hedges, "r", encoding="utf-8", newline="") as fh:
        path = read_hedge_csv(fh)
    scale = 100.0 if args.table4_scale else 1.0
    rows = _evaluation_rows(spot_r, fut_r, path, args.lambda_eval, scale)

    stream, close = _open_out(args.out)
    try:
        if args.format == "json":
            payload = [dict(zip(_EVAL_COLUMNS, row)) for row in rows]
            json.dump(payload, stream, indent=2, sort_keys=True)
            stream.write("\n")
        else:
            writer = csv.writer(stream, lineterminator="\n")
            writer.writerow(_EVAL_COLUMNS)
            writer.writerows(rows)
    finally:
        close()

    if args.compare:
        with open(args.compare, "r", encoding="utf-8", newline="") as fh:
            other = read_hedge_csv(fh)
        comparisons = [
            compare_means(path.lambdas(), other.lambdas(), "lambda: hedges vs compare"),
            compare_means(path.rahrs(), path.mvhrs(), "hedges: rahr vs mvhr"),
            compare_means(other.rahrs(), other.mvhrs(), "compare: rahr vs mvhr"),
        ]
        _write_csv(
            Path(args.compare_out or "comparisons.csv"),
            _COMPARE_COLUMNS,
            (_comparison_row(c) for c in comparisons),
        )

    if args.plot_data:
        dates, portfolios, _ = strategy_return_paths(spot_r, fut_r, path)
        cums = {name: np.cumsum(portfolios[name]) for name in STRATEGIES}
        _write_csv(
            Path(args.plot_data),
            ["date", "rahr_cum", "mvhr_cum", "no_hedge_cum"],
            (
                [d.isoformat(), _fmt(cums[RAHR][i]), _fmt(cums[MVHR][i]), _fmt(cums[NO_HEDGE][i])]
                for i, d in enumerate(dates)
            ),
        )
    return 0


# ---------------------------------------------------------------------------
# Full pipeline
# ---------------------------------------------------------------------------


def _stage(name, out_dir, func):
    """Run one pipeline stage; on failure remove the files it created."""
    created: list[Path] = []

    def track(path: Path) -> Path:
        created.append(path)
        return path

    try:
        return func(track)
    except Exception as exc:
        for path in created:
            try:
                path.unlink()
            except OSError:
                pass
        raise StageError(name, exc) from exc


def run_pipeline(config: RunConfig) -> int:
    out = config.out_dir
    out.mkdir(parents=True, exist_ok=True)
    frequency = config.frequency
    fit_cfg = config.fit_config()
    spec = config.window()

    def ingest(track):
        (spot_r, fut_r), continuous = _load_return_pair(config.spot, config.futures, frequency)
        _write_csv(
            track(out / "continuous_futures.csv"),
            ["date", "price"],
            ([p.date.isoformat(), _fmt(p.price)] for p in continuous.points),
        )
        for name, series in (("spot_returns", spot_r), ("futures_returns", fut_r)):
            _write_csv(
                track(out / f"{name}.csv"),
                ["date", "log_return"],
                ([d.isoformat(), _fmt(v)] for d, v in zip(series.dates, series.values)),
            )
        return spot_r, fut_r

    spot_r, fut_r = _stage("ingest", out, ingest)

    def describe(track):
        rows = [
            _describe_row("spot", summarize(spot_r)),
            _describe_row("futures", summarize(fut_r)),
        ]
        _write_csv(track(out / "describe.csv"), _DESCRIBE_COLUMNS, rows)

    _stage("describe", out, describe)

    def estimate(track):
        for side in config.sides:
            exposure = spot_r if side == HedgerSide.SHORT else fut_r
            fit = fit_garch_m(exposure, fit_cfg)
            payload = _fit_payload(fit, len(exposure))
            path = track(out / f"estimate_{side.value}.json")
            path.write_text(
                json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
            )
            _write_csv(
                track(out / f"variance_path_{side.value}.csv"),
                ["date", "sigma2"],
                (
                    [d.isoformat(), _fmt(v)]
                    for d, v in zip(exposure.dates, fit.sigma2_path)
                ),
            )

    _stage("estimate", out, estimate)

    paths: dict[HedgerSide, HedgePath] = {}

    def roll(track):
        for side in config.sides:
            path = rolling_hedges(
                spot_r, fut_r, side, spec, fit_cfg, lambda_min=config.lambda_min
            )
            paths[side] = path
            in_sample = HedgePath(
                tuple(r for r in path if r.date <= config.in_sample_end)
            )
            with open(track(out / f"hedges_{side.value}.csv"), "w", encoding="utf-8", newline="\n") as fh:
                write_hedge_csv(in_sample, fh)

    _stage("roll-hedges", out, roll)

    forecast_paths: dict[HedgerSide, HedgePath] = {}

    def forecast(track):
        target_start = config.in_sample_end + dt.timedelta(days=1)
        for side in config.sides:
            forecasts = forecast_hedges(
                paths[side], target_start=target_start, lambda_min=config.lambda_min
            )
            forecast_paths[side] = forecasts
            with open(track(out / f"forecast_{side.value}.csv"), "w", encoding="utf-8", newline="\n") as fh:
                write_hedge_csv(forecasts, fh)

    _stage("forecast-hedges", out, forecast)

    def evaluate(track):
        scale = 100.0 if config.table4_scale else 1.0
        rows = []
        for side in config.sides:
            in_sample = HedgePath(
                tuple(r for r in paths[side] if r.date <= config.in_sample_end)
            )
            rows.extend(_evaluation_rows(spot_r, fut_r, in_sample, None, scale))
            rows.extend(_evaluation_rows(spot_r, fut_r, forecast_paths[side], None, scale))
        _write_csv(track(out / "evaluation.csv"), _EVAL_COLUMNS, rows)

        comparisons = []
        if len(config.sides) == 2:
            a, b = config.sides
            comparisons.append(
                compare_means(
                    paths[a].lambdas(), paths[b].lambdas(),
                    f"lambda: {a.value} vs {b.value}",
                )
            )
        for side in config.sides:
            comparisons.append(
                compare_means(
                    paths[side].rahrs(), paths[side].mvhrs(),
                    f"{side.value}: rahr vs mvhr",
                )
            )
        _write_csv(
            track(out / "comparisons.csv"),
            _COMPARE_COLUMNS,
            (_comparison_row(c) for c in comparisons),
        )

    _stage("evaluate", out, evaluate)

    def manifest(track):
        payload = {
            "code_version": __version__,
            "config": {
                "spot": str(config.spot),
                "futures": str(config.futures),
                "frequency": config.frequency,
                "out_dir": str(config.out_dir),
                "in_sample_end": config.in_sample_end.isoformat(),
                "window_obs": config.window_obs,
                "window_years": config.window_years,
                "sides": [s.value for s in config.sides],
                "seed": config.seed,
                "restarts": config.restarts,
                "tol": config.tol,
                "min_observations": config.min_observations,
                "lambda_min": config.lambda_min,
                "table4_scale": config.table4_scale,
            },
            "seed": config.seed,
        }
        canonical = json.dumps(payload["config"], sort_keys=True)
        payload["config_hash"] = hashlib.sha256(canonical.encode("utf-8")).hexdigest()
        track(out / "manifest.json").write_text(
            json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )

    _stage("manifest", out, manifest)
    print(f"pipeline complete: {out}")
    return 0


def cmd_run(args) -> int:
    return run_pipeline(build_run_config(args))


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="garchhedge",
        description=(
            "Estimate time-varying risk aversion from price data and build "
            "utility-maximizing and minimum-variance futures hedges."
        ),
    )
    parser.add_argument("--config", help="flat key = value config file (used by run)")
    parser.add_argument("--seed", type=int, default=None, help="random seed")
    parser.add_argument("--out-dir", default=None, help="output directory")
    parser.add_argument(
        "--frequency", choices=FREQUENCIES, default=None, help="sampling frequency"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="write synthetic spot and futures price CSVs")
    p.add_argument("--n", type=int, required=True, help="number of returns")
    p.add_argument("--mu", type=float, default=0.0)
    p.add_argument("--lam", type=float, default=0.0, help="in-mean risk aversion")
    p.add_argument("--c", type=float, default=1e-5)
    p.add_argument("--a", type=float, default=0.05)
    p.add_argument("--b", type=float, default=0.90)
    p.add_argument("--rho", type=float, default=0.9, help="spot-futures correlation")
    p.add_argument("--drift-f", type=float, default=0.0, help="futures drift")
    p.add_argument("--start", default=None, help="first return date (ISO)")
    p.add_argument("--p0", type=float, default=100.0, help="initial price level")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("ingest", help="roll futures and write aligned return CSVs")
    p.add_argument("--spot", required=True)
    p.add_argument("--futures", required=True)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("describe", help="summary statistics with 1% significance stars")
    p.add_argument("--spot", required=True)
    p.add_argument("--futures", required=True)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--out", default=None, help="output file (default stdout)")
    p.set_defaults(func=cmd_describe)

    p = sub.add_parser("estimate-garchm", help="fit the in-mean model on one instrument")
    p.add_argument("--input", required=True, help="spot or futures price CSV")
    p.add_argument("--restarts", type=int, default=3)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--min-obs", type=int, default=100)
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--out", default=None)
    p.add_argument("--variance-path", default=None, help="write date,sigma2 CSV here")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("roll-hedges", help="rolling-window hedge ratios for one side")
    p.add_argument("--spot", required=True)
    p.add_argument("--futures", required=True)
    p.add_argument("--side", choices=[s.value for s in HedgerSide], required=True)
    p.add_argument("--window-years", type=int, default=10)
    p.add_argument("--window-obs", type=int, default=None, help="override window length")
    p.add_argument("--restarts", type=int, default=2)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--min-obs", type=int, default=100)
    p.add_argument("--lambda-min", type=float, default=LAMBDA_MIN)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_roll_hedges)

    p = sub.add_parser("forecast-hedges", help="one-step-ahead hedges from a hedge CSV")
    p.add_argument("--hedges", required=True, help="hedge CSV from roll-hedges")
    p.add_argument("--target-start", default=None, help="first target date (ISO)")
    p.add_argument("--min-history", type=int, default=4)
    p.add_argument("--lambda-min", type=float, default=LAMBDA_MIN)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_forecast_hedges)

    p = sub.add_parser("evaluate", help="score strategies on a hedge path")
    p.add_argument("--spot", required=True)
    p.add_argument("--futures", required=True)
    p.add_argument("--hedges", required=True)
    p.add_argument("--lambda-eval", type=float, default=None)
    p.add_argument("--table4-scale", action="store_true", help="report values x100")
    p.add_argument("--plot-data", default=None, help="write cumulative returns here")
    p.add_argument("--compare", default=None, help="second hedge CSV to compare against")
    p.add_argument("--compare-out", default=None)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("run", help="full pipeline driven by a config file")
    p.add_argument("--spot", default=None)
    p.add_argument("--futures", default=None)
    p.add_argument("--in-sample-end", default=None, help="last in-sample date (ISO)")
    p.set_defaults(func=cmd_run)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except StageError as exc:
        print(f"error {exc}", file=sys.stderr)
        cause = exc.cause
        if isinstance(cause, _INPUT_ERRORS):
            return EXIT_INPUT
        if isinstance(cause, FitError):
            return EXIT_FIT
        if isinstance(cause, _DATA_ERRORS):
            return EXIT_DATA
        return 1
    except _INPUT_ERRORS as exc:
        print(f"error [input] {exc}", file=sys.stderr)
        return EXIT_INPUT
    except FitError as exc:
        print(f"error [fit] {exc}", file=sys.stderr)
        return EXIT_FIT
    except _DATA_ERRORS as exc:
        print(f"error [data] {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
