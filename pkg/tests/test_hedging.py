import datetime as dt

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from garchhedge.errors import AlignmentError, DegenerateInputError, DomainError
from garchhedge.hedging import (
    MVHR as MVHR_KIND,
    HedgerSide,
    MomentSet,
    mvhr,
    portfolio_returns,
    rahr,
    sample_moments,
)
from garchhedge.market_data import WEEKLY, ReturnSeries


def series(values, start=0):
    dates = tuple(dt.date(2021, 1, 6) + dt.timedelta(weeks=start + i) for i in range(len(values)))
    return ReturnSeries(WEEKLY, dates, np.asarray(values, dtype=float))


# ---------------------------------------------------------------------------
# portfolio_returns
# ---------------------------------------------------------------------------


def test_zero_beta_short_is_spot():
    spot = series([0.01, -0.02, 0.03])
    fut = series([0.02, 0.01, -0.01])
    out = portfolio_returns(spot, fut, 0.0, HedgerSide.SHORT)
    assert np.array_equal(out.values, spot.values)


def test_unit_beta_perfect_hedge():
    spot = series([0.01, -0.02, 0.03])
    fut = series([0.01, -0.02, 0.03])
    for side in HedgerSide:
        out = portfolio_returns(spot, fut, 1.0, side)
        assert np.allclose(out.values, 0.0, atol=1e-18)


def test_five_point_half_beta_oracle():
    spot = series([0.01, -0.02, 0.03, 0.00, -0.01])
    fut = series([0.02, -0.01, 0.01, -0.02, 0.03])
    short = portfolio_returns(spot, fut, 0.5, HedgerSide.SHORT)
    assert np.allclose(short.values, [0.00, -0.015, 0.025, 0.01, -0.025], atol=1e-15)
    long = portfolio_returns(spot, fut, 0.5, HedgerSide.LONG)
    assert np.allclose(long.values, -short.values, atol=1e-15)


def test_misaligned_inputs_error():
    spot = series([0.01, 0.02])
    fut = series([0.01, 0.02], start=1)
    with pytest.raises(AlignmentError):
        portfolio_returns(spot, fut, 0.5, HedgerSide.SHORT)


# ---------------------------------------------------------------------------
# mvhr
# ---------------------------------------------------------------------------


def test_mvhr_identical_series():
    s = series([0.01, -0.02, 0.03, 0.005])
    assert abs(mvhr(s, s).beta - 1.0) < 1e-12


def test_mvhr_independent_series():
    rng = np.random.default_rng(3)
    s = series(rng.standard_normal(5000) * 0.01)
    f = series(rng.standard_normal(5000) * 0.01)
    assert abs(mvhr(s, f).beta) < 0.05


def test_mvhr_six_point_oracle():
    # cov = 0.00195/5, var_f = 0.00335/5 -> beta = 39/67.
    s = series([0.01, 0.03, -0.02, 0.00, 0.02, -0.01])
    f = series([0.02, 0.01, -0.03, 0.01, 0.04, -0.02])
    assert abs(mvhr(s, f).beta - 39.0 / 67.0) < 1e-12


def test_mvhr_zero_variance_degenerate():
    s = series([0.01, 0.02, 0.03])
    f = series([0.01, 0.01, 0.01])
    with pytest.raises(DegenerateInputError):
        mvhr(s, f)


@settings(max_examples=40, deadline=None)
@given(scale=st.floats(min_value=1e-6, max_value=1e6))
def test_mvhr_scale_invariance(scale):
    s = series([0.011, 0.032, -0.021, 0.004, 0.017, -0.008])
    f = series([0.021, 0.012, -0.033, 0.012, 0.041, -0.022])
    base = mvhr(s, f).beta
    scaled = mvhr(series(s.values * scale), series(f.values * scale)).beta
    assert abs(base - scaled) < 1e-10 * max(1.0, abs(base))


# ---------------------------------------------------------------------------
# rahr
# ---------------------------------------------------------------------------


def test_zero_expected_return_reduces_to_mvhr():
    m = MomentSet(e_rf=0.0, var_f=0.0025, cov_sf=0.002)
    for side in HedgerSide:
        assert rahr(m, 0.4, side).beta == m.cov_sf / m.var_f


def test_infinite_risk_aversion_limit():
    m = MomentSet(e_rf=0.0011, var_f=0.0025, cov_sf=0.002515)
    beta_mv = m.cov_sf / m.var_f
    for side in HedgerSide:
        assert abs(rahr(m, 1e9, side).beta - beta_mv) < 1e-6


def test_worked_magnitudes():
    # E(r_f)=0.0011, lam=0.339, var_f=0.0025, cov/var = 1.006.
    m = MomentSet(e_rf=0.0011, var_f=0.0025, cov_sf=1.006 * 0.0025)
    long = rahr(m, 0.339, HedgerSide.LONG).beta
    short = rahr(m, 0.339, HedgerSide.SHORT).beta
    speculative = 0.0011 / (2 * 0.339 * 0.0025)
    assert abs(long - (1.006 + speculative)) < 1e-12
    assert abs(short - (1.006 - speculative)) < 1e-12
    assert abs(long - 1.655) < 1e-3
    assert abs(short - 0.357) < 1e-3


def test_limit_convergence_monotone_in_lambda():
    m = MomentSet(e_rf=0.002, var_f=0.0025, cov_sf=0.002)
    beta_mv = m.cov_sf / m.var_f
    for side in HedgerSide:
        gaps = [abs(rahr(m, lam, side).beta - beta_mv) for lam in (0.1, 0.5, 2.0, 10.0, 100.0)]
        assert all(g1 > g2 for g1, g2 in zip(gaps, gaps[1:]))


@settings(max_examples=50, deadline=None)
@given(
    e_rf=st.floats(min_value=-0.01, max_value=0.01),
    var_f=st.floats(min_value=1e-5, max_value=0.01),
    rho=st.floats(min_value=-0.99, max_value=0.99),
    lam=st.floats(min_value=0.01, max_value=50.0),
)
def test_side_symmetry(e_rf, var_f, rho, lam):
    var_s = 2.0 * var_f
    m = MomentSet(e_rf=e_rf, var_f=var_f, cov_sf=rho * np.sqrt(var_f * var_s), var_s=var_s)
    beta_mv = m.cov_sf / m.var_f
    total = rahr(m, lam, HedgerSide.SHORT).beta + rahr(m, lam, HedgerSide.LONG).beta
    assert abs(total - 2.0 * beta_mv) < 1e-10 * max(1.0, abs(beta_mv))


def test_sign_ordering_with_positive_drift():
    m = MomentSet(e_rf=0.003, var_f=0.0025, cov_sf=0.0025)
    beta_mv = m.cov_sf / m.var_f
    assert rahr(m, 0.5, HedgerSide.SHORT).beta < beta_mv < rahr(m, 0.5, HedgerSide.LONG).beta


def test_rahr_domain_errors():
    m = MomentSet(e_rf=0.001, var_f=0.0025, cov_sf=0.002)
    with pytest.raises(DomainError):
        rahr(m, 0.0, HedgerSide.SHORT)
    with pytest.raises(DomainError):
        rahr(m, -1.0, HedgerSide.LONG)


def test_moment_set_invariants():
    with pytest.raises(Exception):
        MomentSet(e_rf=0.0, var_f=0.0, cov_sf=0.0)
    with pytest.raises(Exception):
        MomentSet(e_rf=0.0, var_f=1.0, cov_sf=2.0, var_s=1.0)


def test_sample_moments_match_numpy():
    rng = np.random.default_rng(8)
    s = series(rng.standard_normal(40) * 0.02)
    f = series(rng.standard_normal(40) * 0.02)
    m = sample_moments(s, f)
    assert abs(m.e_rf - np.mean(f.values)) < 1e-15
    assert abs(m.var_f - np.var(f.values, ddof=1)) < 1e-15
    assert abs(m.cov_sf - np.cov(s.values, f.values, ddof=1)[0, 1]) < 1e-15
    assert mvhr(s, f).kind == MVHR_KIND
