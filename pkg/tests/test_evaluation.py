import datetime as dt
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from garchhedge.errors import (
    AlignmentError,
    DegenerateInputError,
    DomainError,
    InsufficientDataError,
)
from garchhedge.evaluation import (
    MVHR,
    NO_HEDGE,
    RAHR,
    compare_means,
    effectiveness,
    expected_utility,
    score_strategies,
    strategy_return_paths,
)
from garchhedge.hedging import HedgerSide, MomentSet, mvhr as mvhr_op, portfolio_returns
from garchhedge.market_data import WEEKLY, ReturnSeries
from garchhedge.rolling import IN_SAMPLE, HedgePath, HedgeRecord


def wk(i):
    return dt.date(2021, 1, 6) + dt.timedelta(weeks=i)


def series(values, start=0):
    dates = tuple(wk(start + i) for i in range(len(values)))
    return ReturnSeries(WEEKLY, dates, np.asarray(values, dtype=float))


def eu_oracle(xs, lam):
    n = len(xs)
    mean = sum(xs) / n
    var = sum((x - mean) ** 2 for x in xs) / (n - 1)
    return mean - 0.5 * lam * var


# ---------------------------------------------------------------------------
# expected_utility / effectiveness
# ---------------------------------------------------------------------------


def test_zero_returns_zero_utility():
    assert expected_utility(series([0.0, 0.0, 0.0]), 0.5) == 0.0


def test_worked_utility_value():
    # mean 0.0012, variance 0.059^2, lam 0.339 -> EU = 0.000610.
    s = 0.059 / math.sqrt(2.0)
    portfolio = series([0.0012 - s, 0.0012 + s])
    eu = expected_utility(portfolio, 0.339)
    assert abs(eu - (0.0012 - 0.5 * 0.339 * 0.059**2)) < 1e-15
    assert abs(eu - 0.000610) < 5e-7


def test_utility_affine_in_lambda():
    portfolio = series([0.01, -0.02, 0.03, 0.0, -0.01])
    var = float(np.var(portfolio.values, ddof=1))
    eus = [expected_utility(portfolio, lam) for lam in (0.5, 1.0, 2.0)]
    slope01 = (eus[1] - eus[0]) / 0.5
    slope12 = (eus[2] - eus[1]) / 1.0
    assert abs(slope01 + 0.5 * var) < 1e-15
    assert abs(slope12 + 0.5 * var) < 1e-15


def test_utility_decreases_with_variance():
    lam = 0.7
    low = series([0.01, 0.0, -0.01, 0.0])
    high = series([0.03, 0.0, -0.03, 0.0])
    assert expected_utility(high, lam) < expected_utility(low, lam)


def test_utility_domain_and_length_errors():
    with pytest.raises(DomainError):
        expected_utility(series([0.01, 0.02]), 0.0)
    with pytest.raises(InsufficientDataError):
        expected_utility(series([0.01]), 0.5)


def test_effectiveness_identical_is_zero():
    s = series([0.01, -0.02, 0.03])
    assert effectiveness(s, s, 0.4) == 0.0


def test_effectiveness_closed_form():
    hedged = series([0.0, 0.0, 0.0])
    unhedged = series([-0.02, 0.01, 0.01])
    lam = 0.8
    var_u = float(np.var(unhedged.values, ddof=1))
    he = effectiveness(hedged, unhedged, lam)
    assert abs(he - 0.5 * lam * var_u) < 1e-15


def test_effectiveness_matches_composed_calls():
    hedged = series([0.004, -0.001, 0.002, 0.0006])
    unhedged = series([0.011, -0.009, 0.013, -0.002])
    lam = 0.339
    direct = effectiveness(hedged, unhedged, lam)
    composed = expected_utility(hedged, lam) - expected_utility(unhedged, lam)
    assert abs(direct - composed) < 1e-18
    assert abs(direct - (eu_oracle(list(hedged.values), lam) - eu_oracle(list(unhedged.values), lam))) < 1e-15


def test_effectiveness_span_mismatch():
    with pytest.raises(AlignmentError):
        effectiveness(series([0.01, 0.02]), series([0.01, 0.02], start=1), 0.5)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(min_value=-0.2, max_value=0.2), min_size=3, max_size=12))
def test_effectiveness_antisymmetry(values):
    a = series(values)
    b = series([v * 0.5 + 0.001 for v in values])
    lam = 0.5
    assert effectiveness(a, b, lam) == -effectiveness(b, a, lam)


# ---------------------------------------------------------------------------
# score_strategies
# ---------------------------------------------------------------------------


def _record(i, side, lam, beta_ra, beta_mv):
    m = MomentSet(e_rf=0.001, var_f=0.0025, cov_sf=beta_mv * 0.0025)
    return HedgeRecord(
        date=wk(i), side=side, lam=lam, moments=m,
        rahr=beta_ra, mvhr=beta_mv, mode=IN_SAMPLE, converged=True,
    )


def _path(side, betas_ra, betas_mv, lam=0.4, start=1):
    records = tuple(
        _record(start + i, side, lam, ra, mv)
        for i, (ra, mv) in enumerate(zip(betas_ra, betas_mv))
    )
    return HedgePath(records)


SPOT = series([0.010, -0.020, 0.030, 0.005, -0.015, 0.020])
FUT = series([0.020, -0.010, 0.010, -0.020, 0.030, 0.010])


def test_zero_beta_equals_no_hedge():
    path = _path(HedgerSide.SHORT, [0.0, 0.0, 0.0], [0.5, 0.5, 0.5], start=1)
    results = {r.strategy: r for r in score_strategies(SPOT, FUT, path)}
    assert results[RAHR].mean == results[NO_HEDGE].mean
    assert results[RAHR].sd == results[NO_HEDGE].sd
    assert results[RAHR].eu == results[NO_HEDGE].eu
    assert results[NO_HEDGE].he == 0.0


def test_rahr_equal_mvhr_betas_give_identical_rows():
    path = _path(HedgerSide.LONG, [0.7, 0.6, 0.8], [0.7, 0.6, 0.8], start=1)
    results = {r.strategy: r for r in score_strategies(SPOT, FUT, path)}
    assert results[RAHR].mean == results[MVHR].mean
    assert results[RAHR].he == results[MVHR].he


def test_applied_returns_hand_oracle():
    # Records at wk(1) and wk(3) apply to the returns at wk(2) and wk(4).
    path = _path(HedgerSide.SHORT, [0.5, 0.5], [1.0, 1.0], start=1)
    path = HedgePath((path[0], _record(3, HedgerSide.SHORT, 0.4, 0.5, 1.0)))
    dates, portfolios, _ = strategy_return_paths(SPOT, FUT, path)
    assert dates == (wk(2), wk(4))
    expected = [SPOT.values[2] - 0.5 * FUT.values[2], SPOT.values[4] - 0.5 * FUT.values[4]]
    assert np.allclose(portfolios[RAHR], expected, atol=1e-18)
    assert np.allclose(portfolios[NO_HEDGE], [SPOT.values[2], SPOT.values[4]], atol=0)


def test_trailing_record_skipped():
    # wk(5) is the final return date: a record there has no next return.
    path = _path(HedgerSide.SHORT, [0.5, 0.5, 0.5], [1.0, 1.0, 1.0], start=3)
    dates, _, records = strategy_return_paths(SPOT, FUT, path)
    assert dates == (wk(4), wk(5))
    assert len(records) == 2


def test_unknown_hedge_date_errors():
    path = _path(HedgerSide.SHORT, [0.5, 0.5], [1.0, 1.0], start=10)
    with pytest.raises(AlignmentError):
        score_strategies(SPOT, FUT, path)


def test_mixed_sides_error():
    a = _record(1, HedgerSide.SHORT, 0.4, 0.5, 1.0)
    b = _record(2, HedgerSide.LONG, 0.4, 0.5, 1.0)
    with pytest.raises(AlignmentError):
        score_strategies(SPOT, FUT, HedgePath((a, b)))


def test_default_lambda_is_path_mean():
    path = HedgePath((
        _record(1, HedgerSide.SHORT, 0.2, 0.5, 1.0),
        _record(2, HedgerSide.SHORT, 0.6, 0.5, 1.0),
    ))
    results = {r.strategy: r for r in score_strategies(SPOT, FUT, path)}
    explicit = {r.strategy: r for r in score_strategies(SPOT, FUT, path, lam_eval=0.4)}
    assert results[RAHR].eu == explicit[RAHR].eu


def test_mean_sd_pattern_on_drifted_pair(ordering_paths):
    # Short hedger forgoes the futures drift: the unhedged mean exceeds the
    # minimum-variance mean, while hedging shrinks dispersion.
    short = ordering_paths[HedgerSide.SHORT]
    spot, fut = ordering_paths["spot"], ordering_paths["futures"]
    results = {r.strategy: r for r in score_strategies(spot, fut, short)}
    assert results[NO_HEDGE].mean > results[MVHR].mean
    assert results[MVHR].sd < results[NO_HEDGE].sd


def test_in_sample_mvhr_minimizes_variance():
    rng = np.random.default_rng(4)
    f_vals = rng.standard_normal(60) * 0.02
    s_vals = 0.9 * f_vals + rng.standard_normal(60) * 0.01
    spot, fut = series(s_vals), series(f_vals)
    beta = mvhr_op(spot, fut).beta
    sd_mv = float(np.std(portfolio_returns(spot, fut, beta, HedgerSide.SHORT).values, ddof=1))
    sd_no = float(np.std(spot.values, ddof=1))
    assert sd_mv <= sd_no + 1e-10


# ---------------------------------------------------------------------------
# compare_means
# ---------------------------------------------------------------------------


def welch_oracle(xs, ys):
    nx, ny = len(xs), len(ys)
    mx, my = sum(xs) / nx, sum(ys) / ny
    vx = sum((x - mx) ** 2 for x in xs) / (nx - 1)
    vy = sum((y - my) ** 2 for y in ys) / (ny - 1)
    se2 = vx / nx + vy / ny
    t = (mx - my) / math.sqrt(se2)
    df = se2**2 / ((vx / nx) ** 2 / (nx - 1) + (vy / ny) ** 2 / (ny - 1))
    return t, df


def test_equal_samples_statistic_zero():
    x = [0.1, 0.2, 0.3, 0.15]
    result = compare_means(x, x)
    assert result.statistic == 0.0
    assert result.p_value == 1.0


def test_separated_samples_tiny_p():
    rng = np.random.default_rng(2)
    x = rng.normal(0.0, 0.1, size=200)
    y = rng.normal(1.0, 0.1, size=200)
    assert compare_means(x, y).p_value < 1e-6


def test_welch_six_vs_six_oracle():
    x = [1.1, 2.3, 1.9, 2.8, 2.2, 1.7]
    y = [2.9, 3.4, 3.1, 2.6, 3.8, 3.0]
    result = compare_means(x, y, quantity="fixture")
    t, df = welch_oracle(x, y)
    assert abs(result.statistic - t) < 1e-8
    from scipy.stats import t as t_dist
    assert abs(result.p_value - 2.0 * t_dist.sf(abs(t), df)) < 1e-8
    assert result.quantity == "fixture"
    assert abs(result.mean_x - 2.0) < 1e-12
    assert abs(result.mean_y - 3.1333333333333333) < 1e-12


def test_both_constant_degenerate():
    with pytest.raises(DegenerateInputError):
        compare_means([0.5, 0.5, 0.5], [0.6, 0.6, 0.6])


def test_too_few_points():
    with pytest.raises(InsufficientDataError):
        compare_means([0.1, 0.2], [0.1, 0.2, 0.3])
