"""Shared fixtures; the expensive Monte Carlo studies run once per session."""

from __future__ import annotations

import time

import numpy as np
import pytest

from garchhedge.diagnostics import lm_arch, summarize
from garchhedge.garch import FitConfig, GarchParams, fit_garch, fit_garch_m
from garchhedge.hedging import HedgerSide
from garchhedge.rolling import WindowSpec, rolling_hedges
from garchhedge.synthetic import SimSpec, simulate

# Pinned recovery design shared by the engine tests and the acceptance suite.
PINNED_PARAMS = GarchParams(c=1e-5, a=0.05, b=0.90)
PINNED_LAMBDA = 0.5
PINNED_N = 5000
RECOVERY_SEEDS = 800

# Strong-identification design: unit-scale variance and high vol-of-vol make
# the in-mean slope sharply estimable, which is what a recovery oracle needs.
STRONG_PARAMS = GarchParams(c=0.05, a=0.20, b=0.75)


@pytest.fixture(scope="session")
def pinned_recovery():
    """Plain and in-mean fits on the pinned simulation design.

    The in-mean fit warm-starts from the plain solution so the nested
    comparison is structural.  ``gm_seconds`` times simulation plus the
    in-mean fits only.
    """
    cfg = FitConfig(restarts=1, seed=0)
    lam_hats = np.empty(RECOVERY_SEEDS)
    persistence = np.empty(RECOVERY_SEEDS)
    gm_logliks = np.empty(RECOVERY_SEEDS)
    plain_logliks = np.empty(RECOVERY_SEEDS)
    gm_converged = np.empty(RECOVERY_SEEDS, dtype=bool)
    gm_seconds = 0.0
    for seed in range(RECOVERY_SEEDS):
        t0 = time.perf_counter()
        r = simulate(SimSpec(n=PINNED_N, lam=PINNED_LAMBDA, params=PINNED_PARAMS, seed=seed))
        gm_seconds += time.perf_counter() - t0

        plain = fit_garch(r, cfg)
        plain_logliks[seed] = plain.loglik

        t0 = time.perf_counter()
        gm = fit_garch_m(
            r,
            cfg,
            extra_starts=[(plain.mu, 0.0, plain.params.c, plain.params.a, plain.params.b)],
        )
        gm_seconds += time.perf_counter() - t0

        lam_hats[seed] = gm.lam
        persistence[seed] = gm.params.a + gm.params.b
        gm_logliks[seed] = gm.loglik
        gm_converged[seed] = gm.converged
    return {
        "lam_hats": lam_hats,
        "persistence": persistence,
        "gm_logliks": gm_logliks,
        "plain_logliks": plain_logliks,
        "gm_converged": gm_converged,
        "gm_seconds": gm_seconds,
    }


@pytest.fixture(scope="session")
def diag_calibration():
    """Rejection counts at the 1% level over 100 seeded runs per case."""
    lm_design = GarchParams(c=1e-5, a=0.10, b=0.85)
    bj_design = GarchParams(c=1e-5, a=0.20, b=0.75)
    counts = {"bj_normal_ok": 0, "lm_normal_ok": 0, "bj_garch_reject": 0, "lm_garch_reject": 0}
    for seed in range(100):
        rng = np.random.default_rng([11, seed])
        counts["bj_normal_ok"] += summarize(rng.standard_normal(10000)).bj_p >= 0.01
        counts["lm_normal_ok"] += lm_arch(rng.standard_normal(2000))[1] >= 0.01
        g_lm = simulate(SimSpec(n=2000, params=lm_design, seed=seed + 1000))
        counts["lm_garch_reject"] += lm_arch(g_lm)[1] < 0.01
        g_bj = simulate(SimSpec(n=2000, params=bj_design, seed=seed + 2000))
        counts["bj_garch_reject"] += summarize(g_bj).bj_p < 0.01
    return counts


@pytest.fixture(scope="session")
def ordering_paths():
    """Rolling hedge paths for both sides on a drifted, correlated pair."""
    spot, futures = simulate(
        SimSpec(
            n=220,
            mu=0.0,
            lam=2.0,
            params=STRONG_PARAMS,
            seed=42,
            pair_correlation=0.9,
            drift_f=1.0,
        )
    )
    cfg = FitConfig(restarts=1, min_observations=100, seed=0)
    spec = WindowSpec(length=150)
    return {
        "spot": spot,
        "futures": futures,
        "spec": spec,
        "cfg": cfg,
        HedgerSide.SHORT: rolling_hedges(spot, futures, HedgerSide.SHORT, spec, cfg),
        HedgerSide.LONG: rolling_hedges(spot, futures, HedgerSide.LONG, spec, cfg),
    }
