"""Gaussian maximum likelihood for GARCH(1,1) and GARCH(1,1)-in-mean.

Model:

    r_t  = mu + lam * s2_t + eps_t,      eps_t | info_{t-1} ~ N(0, s2_t)
    s2_t = c + a * eps_{t-1}^2 + b * s2_{t-1}

with the conditional variance entering the mean contemporaneously.  The
in-mean slope ``lam`` is the premium earned per unit of conditional
variance, i.e. the relative risk aversion of the agent holding the asset;
the plain GARCH fit is the ``lam = 0`` restriction.

Estimation maximizes the Gaussian log likelihood

    sum_t [ -0.5 * (log(2*pi) + log(s2_t) + eps_t^2 / s2_t) ]

by Nelder-Mead simplex search over a transformed parameter space (log for
c, logistic maps keeping a >= 0, b >= 0, a + b < 1), restarted from
jittered moment-based initial values; s2_0 is the sample variance of the
estimation window.  A raw-space variant with clipping is kept as a
cross-check parameterization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit
from scipy.optimize import minimize
from scipy.special import expit, logit

from .errors import DegenerateInputError, FitError, InsufficientDataError, ValidationError

_LOG_2PI = math.log(2.0 * math.pi)
_P_EPS = 1e-10          # keeps logistic maps away from the boundary
_BAD_OBJECTIVE = 1e12   # returned when a trial point is numerically invalid

TRANSFORMED = "transformed"
CLIPPED = "clipped"


@dataclass(frozen=True)
class GarchParams:
    """Variance recursion coefficients; covariance-stationary by invariant."""

    c: float
    a: float
    b: float

    def __post_init__(self):
        if not (self.c > 0 and math.isfinite(self.c)):
            raise ValidationError(f"c must be positive and finite, got {self.c}")
        if self.a < 0 or self.b < 0:
            raise ValidationError(f"a and b must be non-negative, got a={self.a}, b={self.b}")
        if not self.a + self.b < 1:
            raise ValidationError(f"a + b must be < 1, got {self.a + self.b}")

    @property
    def unconditional_variance(self) -> float:
        return self.c / (1.0 - self.a - self.b)


@dataclass(frozen=True)
class GarchMFit:
    """Fitted model with its conditional variance path and fit diagnostics.

    ``loglik_trace`` records the best log likelihood after each optimizer
    stage (every restart, then each polish round) and is non-decreasing.
    """

    mu: float
    lam: float
    params: GarchParams
    sigma2_path: np.ndarray
    loglik: float
    converged: bool
    iterations: int
    loglik_trace: tuple[float, ...] = ()

    def __post_init__(self):
        path = np.asarray(self.sigma2_path, dtype=float)
        path.setflags(write=False)
        object.__setattr__(self, "sigma2_path", path)
        if not (path > 0).all():
            raise ValidationError("sigma2_path must be strictly positive")
        if self.converged and not math.isfinite(self.loglik):
            raise ValidationError("converged fit must carry a finite log likelihood")


@dataclass(frozen=True)
class FitConfig:
    """Optimizer settings; defaults suit windows of a few hundred points."""

    max_iterations: int = 4000
    loglik_rel_tol: float = 1e-8
    simplex_tol: float = 1e-9
    restarts: int = 3
    min_observations: int = 100
    seed: int = 0
    initial: tuple[float, float, float, float, float] | None = None
    parameterization: str = TRANSFORMED
    polish_rounds: int = 3

    def __post_init__(self):
        if self.loglik_rel_tol <= 0 or self.simplex_tol <= 0:
            raise ValidationError("tolerances must be positive")
        if self.max_iterations <= 0 or self.restarts < 0 or self.polish_rounds < 0:
            raise ValidationError("iteration counts must be positive")
        if self.parameterization not in (TRANSFORMED, CLIPPED):
            raise ValidationError(f"unknown parameterization {self.parameterization!r}")


# ---------------------------------------------------------------------------
# Likelihood kernels
# ---------------------------------------------------------------------------


@njit(cache=True)
def _loglik_kernel(r, mu, lam, c, a, b, s2_0):
    n = r.shape[0]
    s2 = s2_0
    eps = r[0] - mu - lam * s2
    ll = -0.5 * (_LOG_2PI + math.log(s2) + eps * eps / s2)
    for t in range(1, n):
        s2 = c + a * eps * eps + b * s2
        eps = r[t] - mu - lam * s2
        ll += -0.5 * (_LOG_2PI + math.log(s2) + eps * eps / s2)
    return ll


@njit(cache=True)
def _variance_path_kernel(r, mu, lam, c, a, b, s2_0):
    n = r.shape[0]
    out = np.empty(n)
    s2 = s2_0
    eps = r[0] - mu - lam * s2
    out[0] = s2
    for t in range(1, n):
        s2 = c + a * eps * eps + b * s2
        eps = r[t] - mu - lam * s2
        out[t] = s2
    return out


def garchm_loglik(r, mu: float, lam: float, params: GarchParams, s2_0: float | None = None) -> float:
    """Gaussian log likelihood of the in-mean model at the given parameters."""
    x = _as_values(r)
    if s2_0 is None:
        s2_0 = float(np.var(x, ddof=1))
    if s2_0 <= 0:
        raise DegenerateInputError("initial variance must be positive")
    return float(_loglik_kernel(x, mu, lam, params.c, params.a, params.b, s2_0))


def conditional_variance_path(
    params: GarchParams, mu: float, lam: float, r, s2_0: float | None = None
) -> np.ndarray:
    """Conditional variance recursion seeded at the window sample variance."""
    x = _as_values(r)
    if s2_0 is None:
        s2_0 = float(np.var(x, ddof=1))
    if s2_0 <= 0:
        raise DegenerateInputError("initial variance must be positive")
    return _variance_path_kernel(x, mu, lam, params.c, params.a, params.b, s2_0)


def _as_values(r) -> np.ndarray:
    values = getattr(r, "values", r)
    return np.ascontiguousarray(values, dtype=float)


# ---------------------------------------------------------------------------
# Parameter transforms
# ---------------------------------------------------------------------------
#
# Transformed coordinates u = (mu, lam, log c, logit(a+b), logit(a/(a+b))).
# The plain GARCH problem drops the lam coordinate.


def _to_unconstrained(mu, lam, c, a, b):
    p = min(max(a + b, _P_EPS), 1.0 - _P_EPS)
    w = min(max(a / p if p > 0 else 0.5, _P_EPS), 1.0 - _P_EPS)
    return np.array([mu, lam, math.log(c), logit(p), logit(w)])


def _from_unconstrained(u):
    c = math.exp(u[2])
    p = min(max(float(expit(u[3])), _P_EPS), 1.0 - _P_EPS)
    w = min(max(float(expit(u[4])), _P_EPS), 1.0 - _P_EPS)
    return float(u[0]), float(u[1]), c, p * w, p * (1.0 - w)


def _clip_raw(theta):
    mu, lam, c, a, b = (float(v) for v in theta)
    c = max(c, 1e-14)
    a = min(max(a, 0.0), 1.0 - _P_EPS)
    b = min(max(b, 0.0), 1.0 - _P_EPS)
    total = a + b
    if total >= 1.0 - _P_EPS:
        scale = (1.0 - _P_EPS) / total
        a *= scale
        b *= scale
    return mu, lam, c, a, b


# ---------------------------------------------------------------------------
# Fit drivers
# ---------------------------------------------------------------------------


def fit_garch(r, cfg: FitConfig = FitConfig()) -> GarchMFit:
    """Fit plain GARCH(1,1) by maximum likelihood; the in-mean slope is 0."""
    return fit_garch_m(r, cfg, lam_fixed=0.0)


def fit_garch_m(
    r,
    cfg: FitConfig = FitConfig(),
    *,
    lam_fixed: float | None = None,
    extra_starts: tuple = (),
) -> GarchMFit:
    """Jointly estimate (mu, lam, c, a, b) by maximum likelihood.

    ``extra_starts`` accepts additional (mu, lam, c, a, b) starting points;
    passing a restricted fit's solution guarantees the unrestricted log
    likelihood dominates it.
    """
    x = _as_values(r)
    n = len(x)
    if n < cfg.min_observations:
        raise InsufficientDataError(
            f"need at least {cfg.min_observations} observations, got {n}"
        )
    sample_var = float(np.var(x, ddof=1))
    if sample_var <= 0 or not math.isfinite(sample_var):
        raise DegenerateInputError("constant series has no variance dynamics")
    s2_0 = sample_var

    starts = _starting_points(x, sample_var, cfg, lam_fixed, extra_starts)
    objective = _make_objective(x, s2_0, cfg.parameterization, lam_fixed)

    best_x = None
    best_f = math.inf
    trace: list[float] = []
    total_nfev = 0
    any_success = False
    for x0 in starts:
        res = _run_simplex(objective, x0, cfg)
        total_nfev += res.nfev
        any_success = any_success or res.success
        if res.fun < best_f:
            best_f = res.fun
            best_x = res.x
        trace.append(-best_f)

    # Polish: restart the simplex at the incumbent until it stops improving.
    for _ in range(cfg.polish_rounds):
        res = _run_simplex(objective, best_x, cfg)
        total_nfev += res.nfev
        any_success = any_success or res.success
        improved = res.fun < best_f - cfg.loglik_rel_tol * max(1.0, abs(best_f))
        if res.fun < best_f:
            best_f = res.fun
            best_x = res.x
        trace.append(-best_f)
        if not improved:
            break

    if best_x is None or not math.isfinite(best_f):
        raise FitError("all optimizer starts failed", best=None)

    fit = _finish_fit(x, best_x, best_f, cfg, lam_fixed, s2_0, total_nfev, trace, any_success)
    if not any_success:
        raise FitError(
            f"no optimizer run converged within {cfg.max_iterations} iterations",
            best=fit,
        )
    return fit


def _make_objective(x, s2_0, parameterization, lam_fixed):
    if parameterization == TRANSFORMED:
        def objective(u):
            full = _expand(u, lam_fixed)
            mu, lam, c, a, b = _from_unconstrained(full)
            if not math.isfinite(c) or c <= 0:
                return _BAD_OBJECTIVE
            ll = _loglik_kernel(x, mu, lam, c, a, b, s2_0)
            return -ll if math.isfinite(ll) else _BAD_OBJECTIVE
    else:
        def objective(u):
            full = _expand(u, lam_fixed)
            mu, lam, c, a, b = _clip_raw(full)
            ll = _loglik_kernel(x, mu, lam, c, a, b, s2_0)
            return -ll if math.isfinite(ll) else _BAD_OBJECTIVE
    return objective


def _expand(u, lam_fixed):
    if lam_fixed is None:
        return u
    return np.array([u[0], lam_fixed, u[1], u[2], u[3]])


def _reduce(full, lam_fixed):
    if lam_fixed is None:
        return full
    return np.array([full[0], full[2], full[3], full[4]])


def _starting_points(x, sample_var, cfg, lam_fixed, extra_starts):
    mean = float(np.mean(x))
    mu0 = mean
    lam0 = mean / sample_var
    c0 = 0.1 * sample_var
    a0, b0 = 0.05, 0.85
    base = (mu0, lam0, c0, a0, b0)

    def encode(theta):
        mu, lam, c, a, b = theta
        if cfg.parameterization == TRANSFORMED:
            full = _to_unconstrained(mu, lam, max(c, 1e-14), max(a, _P_EPS), max(b, _P_EPS))
        else:
            full = np.array([mu, lam, c, a, b], dtype=float)
        return _reduce(full, lam_fixed)

    if cfg.initial is not None:
        base = cfg.initial
    starts = [encode(base)]
    for theta in extra_starts:
        starts.append(encode(theta))

    rng = np.random.default_rng([cfg.seed, len(x)])
    s = math.sqrt(sample_var)
    if cfg.parameterization == TRANSFORMED:
        scales = np.array([0.5 * s, 0.5 * max(1.0, abs(lam0)), 0.7, 1.0, 1.0])
    else:
        scales = np.array([0.5 * s, 0.5 * max(1.0, abs(lam0)), 0.5 * c0, 0.05, 0.05])
    scales = _reduce(scales, lam_fixed)
    for _ in range(cfg.restarts):
        starts.append(starts[0] + rng.normal(0.0, 1.0, size=len(scales)) * scales)
    return starts


def _run_simplex(objective, x0, cfg):
    f0 = objective(np.asarray(x0, dtype=float))
    fatol = cfg.loglik_rel_tol * max(1.0, abs(f0))
    return minimize(
        objective,
        np.asarray(x0, dtype=float),
        method="Nelder-Mead",
        options={
            "maxiter": cfg.max_iterations,
            "maxfev": 4 * cfg.max_iterations,
            "xatol": cfg.simplex_tol,
            "fatol": fatol,
        },
    )


def _finish_fit(x, best_x, best_f, cfg, lam_fixed, s2_0, nfev, trace, converged):
    full = _expand(np.asarray(best_x, dtype=float), lam_fixed)
    if cfg.parameterization == TRANSFORMED:
        mu, lam, c, a, b = _from_unconstrained(full)
    else:
        mu, lam, c, a, b = _clip_raw(full)
    params = GarchParams(c=c, a=a, b=b)
    path = _variance_path_kernel(x, mu, lam, c, a, b, s2_0)
    return GarchMFit(
        mu=mu,
        lam=lam,
        params=params,
        sigma2_path=path,
        loglik=-best_f,
        converged=converged,
        iterations=nfev,
        loglik_trace=tuple(trace),
    )
