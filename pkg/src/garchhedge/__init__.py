"""Time-varying risk aversion estimation and futures hedge construction.

The package estimates a hedger's risk aversion from the in-mean slope of a
GARCH(1,1)-in-mean model fitted over rolling windows, derives
utility-maximizing and minimum-variance hedge ratios for short and long
hedgers, forecasts one-step-ahead hedges, and scores strategies by
expected utility.
"""

__version__ = "0.1.0"

from .diagnostics import SummaryStats, lm_arch, summarize
from .errors import (
    AlignmentError,
    ConfigError,
    CoverageError,
    DegenerateInputError,
    DomainError,
    FitError,
    GarchHedgeError,
    InsufficientDataError,
    ParseError,
    ValidationError,
)
from .evaluation import (
    ComparisonResult,
    StrategyResult,
    compare_means,
    effectiveness,
    expected_utility,
    score_strategies,
)
from .garch import (
    FitConfig,
    GarchMFit,
    GarchParams,
    conditional_variance_path,
    fit_garch,
    fit_garch_m,
    garchm_loglik,
)
from .hedging import (
    HedgeRatio,
    HedgerSide,
    MomentSet,
    mvhr,
    portfolio_returns,
    rahr,
    sample_moments,
)
from .market_data import (
    ContractSeries,
    PricePoint,
    PriceSeries,
    ReturnSeries,
    align,
    load_prices,
    roll_by_volume,
    to_returns,
)
from .rolling import (
    Ar1Fit,
    HedgePath,
    HedgeRecord,
    WindowSpec,
    fit_ar1,
    forecast_hedges,
    risk_aversion_series,
    rolling_hedges,
    ten_year_window,
)
from .synthetic import SimSpec, simulate, synthetic_calendar
