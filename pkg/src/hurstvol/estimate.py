"""Rolling-window estimation of pointwise regularity and realized volatility.

Two estimators of the local exponent are provided, both built on the same
window moments.  With ``M`` the mean squared lag-1 increment and ``M'`` the
mean squared lag-2 increment over a window of ``delta + 2`` points:

* ``ratio``  -- ``H_t = 0.5 * log2(M'_t / M_t)``.  Scale-free and causal
  (each estimate uses only its own window), but with O(1/sqrt(delta))
  sampling noise: std ~ 0.16 at delta = 20.
* ``scaled`` -- a scale-anchored variant.  The level is set once per series
  by the mean of the ratio estimates corrected for their exact small-sample
  log-moment bias (computable in closed form for Gaussian windows), and the
  pointwise variation is read from the log moment itself:

      H_t = anchor + (mean(log M) - log M_t) / (2 * log(n - 1)).

  Under the martingale null its sampling distribution is normal with mean
  1/2 and variance ``1 / (2 * delta * log(n-1)**2)``, the same law that the
  confidence interval :func:`martingale_ci` assumes, which makes it roughly
  ten times less dispersed than the window ratio at delta = 20.  It is the
  default for the analysis pipeline; note it calibrates on the full sample.

The paired volatility estimate is the quadratic-variation form
``sigma_t = sqrt(M_t)`` from the identical window.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import quad
from scipy.linalg import eigh, sqrtm, toeplitz
from scipy.stats import kurtosis as _kurtosis, norm, skew as _skew

from hurstvol.series import TimeSeries

ESTIMATORS = ("scaled", "ratio")


@dataclass(frozen=True)
class WindowConfig:
    """Rolling-window configuration: even width >= 8, stride >= 1."""

    delta: int = 20
    stride: int = 1
    estimator: str = "scaled"

    def __post_init__(self) -> None:
        if self.delta < 8 or self.delta % 2:
            raise ValueError("window delta must be an even integer >= 8")
        if self.stride < 1:
            raise ValueError("stride must be >= 1")
        if self.estimator not in ESTIMATORS:
            raise ValueError(f"estimator must be one of {ESTIMATORS}")


@dataclass
class HurstTrajectory:
    """Per-window estimates: end index, exponent, volatility, missing flag."""

    t: np.ndarray
    h_hat: np.ndarray
    sigma_hat: np.ndarray
    flag: np.ndarray
    config: WindowConfig
    n: int  # length of the source series

    def valid(self) -> np.ndarray:
        return ~self.flag

    def __len__(self) -> int:
        return len(self.t)


def to_log_prices(prices: TimeSeries) -> TimeSeries:
    """Elementwise natural log of a price series."""
    bad = np.flatnonzero(~(prices.values > 0.0))
    if bad.size:
        raise ValueError(f"non-positive price at index {bad[0]}")
    return TimeSeries(np.log(prices.values), role="log-price",
                      name=prices.name, timestamps=prices.timestamps)


def window_moment2(x: np.ndarray, lag: int) -> float:
    """Second moment of window increments; window must hold delta + 2 points.

    ``lag=1``: mean squared lag-1 increment over the delta most recent
    increments.  ``lag=2``: mean squared lag-2 difference over the delta
    overlapping differences ending in the window.
    """
    x = np.asarray(x, dtype=float)
    if lag not in (1, 2):
        raise ValueError("lag must be 1 or 2")
    delta = len(x) - 2
    if delta < 1:
        raise ValueError("window must hold at least 3 points")
    if lag == 1:
        d = np.diff(x)[1:]
    else:
        d = x[2:] - x[:-2]
    return float(np.mean(d * d))


def realized_vol(x: np.ndarray, lag: int = 1, centered: bool = False) -> float:
    """Quadratic-variation volatility: sqrt of the mean squared increment.

    ``centered=True`` subtracts the mean increment first (sample-std
    convention) instead of the zero-mean quadratic-variation convention.
    """
    x = np.asarray(x, dtype=float)
    if len(x) < lag + 1:
        raise ValueError("window too short")
    d = x[lag:] - x[:-lag]
    if centered:
        d = d - d.mean()
    return float(math.sqrt(np.mean(d * d)))


def _rolling_window_moments(x: np.ndarray, delta: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized M and M' for every window end t = delta+1 .. n-1."""
    d1 = np.diff(x)
    d2 = x[2:] - x[:-2]
    c1 = np.concatenate([[0.0], np.cumsum(d1 * d1)])
    c2 = np.concatenate([[0.0], np.cumsum(d2 * d2)])
    n = len(x)
    t = np.arange(delta + 1, n)
    m1 = (c1[t] - c1[t - delta]) / delta            # lag-1 increments t-delta .. t-1
    m2 = (c2[t - 1] - c2[t - 1 - delta]) / delta    # lag-2 differences ending at t
    return t, m1, m2


def hurst_pointwise(x: TimeSeries | np.ndarray, cfg: WindowConfig = WindowConfig()) -> HurstTrajectory:
    """Rolling pointwise exponent and realized volatility of a log-price series.

    Windows are causal: the record at index ``t`` uses the points
    ``x[t-delta-1 .. t]``.  Windows with a vanishing lag-1 moment are flagged
    missing.  See the module docstring for the two estimator modes.
    """
    values = x.values if isinstance(x, TimeSeries) else np.asarray(x, dtype=float)
    n = len(values)
    if n < cfg.delta + 2:
        raise ValueError(f"series of length {n} is too short for delta={cfg.delta}")
    t, m1, m2 = _rolling_window_moments(values, cfg.delta)
    sel = slice(None, None, cfg.stride)
    t, m1, m2 = t[sel], m1[sel], m2[sel]

    flag = ~(m1 > 0.0) | ~(m2 > 0.0)
    h = np.full(len(t), np.nan)
    ok = ~flag
    ratio_h = 0.5 * np.log2(m2[ok] / m1[ok])
    if cfg.estimator == "ratio":
        h[ok] = ratio_h
    else:
        anchor = _debiased_anchor(ratio_h, cfg.delta)
        ln_m = np.log(m1[ok])
        h[ok] = anchor + (ln_m.mean() - ln_m) / (2.0 * math.log(n - 1))
    sigma = np.sqrt(m1)
    sigma[flag] = 0.0
    return HurstTrajectory(t=t, h_hat=h, sigma_hat=sigma, flag=flag, config=cfg, n=n)


def _debiased_anchor(ratio_h: np.ndarray, delta: int) -> float:
    """Mean of the window ratios, corrected for their small-sample bias."""
    raw = float(np.mean(ratio_h))
    h = raw
    for _ in range(2):
        h = raw - ratio_log_moment_bias(delta, min(max(h, 0.05), 0.95))
    return h


def ratio_log_moment_bias(delta: int, h: float) -> float:
    """Exact bias ``E[0.5*log2(M'/M)] - h`` of the window ratio on fGn.

    Both moments are quadratic forms in the window's Gaussian increments, so
    ``E[log Q]`` follows from the eigenvalues of the form and the identity
    ``E[log Q] = int_0^inf (e^-t - prod_i (1+2 t lam_i)^-1/2) / t dt``.
    """
    return _ratio_log_moment_bias(int(delta), round(float(h), 3))


@lru_cache(maxsize=256)
def _ratio_log_moment_bias(delta: int, h: float) -> float:
    m = delta + 1
    k = np.arange(m, dtype=float)
    g = 0.5 * (np.abs(k + 1) ** (2 * h) - 2 * np.abs(k) ** (2 * h) + np.abs(k - 1) ** (2 * h))
    cov = toeplitz(g)
    a1 = np.zeros((m, m))
    a2 = np.zeros((m, m))
    for i in range(1, m):
        a1[i, i] += 1.0 / delta
        a2[i, i] += 1.0 / delta
        a2[i - 1, i - 1] += 1.0 / delta
        a2[i, i - 1] += 1.0 / delta
        a2[i - 1, i] += 1.0 / delta
    half = np.real(sqrtm(cov))
    e1 = eigh(half @ a1 @ half, eigvals_only=True)
    e2 = eigh(half @ a2 @ half, eigvals_only=True)
    return (_e_log_quadform(e2) - _e_log_quadform(e1)) / (2.0 * math.log(2.0)) - h


def _e_log_quadform(eigs: np.ndarray) -> float:
    eigs = eigs[eigs > 1e-14]

    def integrand(tt: float) -> float:
        return (math.exp(-tt) - np.exp(-0.5 * np.sum(np.log1p(2.0 * tt * eigs)))) / tt

    return quad(integrand, 0.0, np.inf, limit=200)[0]


def martingale_ci(n: int, delta: int, alpha: float) -> tuple[float, float]:
    """Confidence interval for the exponent under the martingale hypothesis.

    Under H = 1/2 the scale-anchored estimator is normal with mean 1/2 and
    variance ``1 / (2 * delta * ln(n-1)**2)`` (natural logarithm).
    """
    if not (0.0 < alpha < 1.0):
        raise ValueError("alpha must lie in (0, 1)")
    if delta < 8 or n <= delta:
        raise ValueError("need n > delta >= 8")
    z = float(norm.ppf(1.0 - alpha / 2.0))
    hw = z / math.sqrt(2.0 * delta * math.log(n - 1) ** 2)
    return 0.5 - hw, 0.5 + hw


def acf(x: TimeSeries | np.ndarray, max_lag: int) -> np.ndarray:
    """Sample autocorrelation with biased normalization; acf[0] = 1."""
    values = x.values if isinstance(x, TimeSeries) else np.asarray(x, dtype=float)
    n = len(values)
    if max_lag >= n / 4:
        raise ValueError("max_lag must be below length/4")
    c = values - values.mean()
    denom = float(np.dot(c, c))
    if denom == 0.0:
        raise ValueError("series is constant")
    out = np.empty(max_lag + 1)
    out[0] = 1.0
    for k in range(1, max_lag + 1):
        out[k] = float(np.dot(c[k:], c[:-k])) / denom
    return out


# ---------------------------------------------------------------------------
# summary statistics and the unit-root test
# ---------------------------------------------------------------------------

@dataclass
class SummaryStats:
    """Distributional summary of an estimated exponent trajectory."""

    mean: float
    minimum: float
    maximum: float
    std: float
    skewness: float
    kurtosis: float          # non-excess (normal -> 3)
    ci_lo: float             # martingale interval for the configured alpha
    ci_hi: float
    adf_stat: float
    adf_critical: float
    adf_reject: bool
    n_obs: int
    degenerate: bool = False

    def as_dict(self) -> dict:
        return {
            "mean": self.mean, "min": self.minimum, "max": self.maximum,
            "std": self.std, "skewness": self.skewness, "kurtosis": self.kurtosis,
            "ci": [self.ci_lo, self.ci_hi],
            "adf_stat": self.adf_stat, "adf_critical": self.adf_critical,
            "adf_reject": self.adf_reject, "n_obs": self.n_obs,
            "degenerate": self.degenerate,
        }


@dataclass
class AdfResult:
    stat: float
    critical_5pct: float
    reject: bool
    nlags: int
    nobs_used: int


def adf_test(x: np.ndarray, regression: str = "ct") -> AdfResult:
    """Augmented Dickey-Fuller test with constant + trend.

    ``dx_t = alpha + beta*t + rho*x_{t-1} + sum_i phi_i dx_{t-i} + eps``;
    the statistic is the t-ratio of rho, the lag order follows the Schwert
    rule ``floor(12 * (n/100)**0.25)``, and the 5% critical value comes from
    the asymptotic trend-model response surface (about -3.41 for large n).
    Rejection favours trend-stationarity.
    """
    if regression != "ct":
        raise ValueError("only the constant+trend regression is supported")
    x = np.asarray(x, dtype=float)
    n = len(x)
    if n < 50:
        raise ValueError("need at least 50 observations")
    p = int(12.0 * (n / 100.0) ** 0.25)
    dx = np.diff(x)
    rows = len(dx) - p
    if rows <= p + 4:
        raise ValueError("series too short for the Schwert lag order")
    y = dx[p:]
    cols = [np.ones(rows), np.arange(1.0, rows + 1.0), x[p:-1]]
    for i in range(1, p + 1):
        cols.append(dx[p - i:len(dx) - i])
    design = np.column_stack(cols)
    beta, _, rank, _ = np.linalg.lstsq(design, y, rcond=None)
    if rank < design.shape[1]:
        raise np.linalg.LinAlgError("singular ADF regression")
    resid = y - design @ beta
    dof = rows - design.shape[1]
    s2 = float(resid @ resid) / dof
    cov = s2 * np.linalg.inv(design.T @ design)
    stat = float(beta[2] / math.sqrt(cov[2, 2]))
    crit = -3.4126 - 4.039 / rows - 17.83 / rows ** 2
    return AdfResult(stat=stat, critical_5pct=crit, reject=stat < crit,
                     nlags=p, nobs_used=rows)


def summary_stats(traj: HurstTrajectory, alpha: float = 0.05) -> SummaryStats:
    """Moments, martingale interval and unit-root test of a trajectory."""
    h = traj.h_hat[traj.valid()]
    if len(h) < 100:
        raise ValueError("need at least 100 valid records")
    lo, hi = martingale_ci(traj.n, traj.config.delta, alpha)
    std = float(np.std(h))
    degenerate = std == 0.0
    if degenerate:
        sk, ku = float("nan"), float("nan")
        adf = AdfResult(float("nan"), float("nan"), False, 0, 0)
    else:
        sk = float(_skew(h))
        ku = float(_kurtosis(h, fisher=False))
        adf = adf_test(h)
    return SummaryStats(
        mean=float(np.mean(h)), minimum=float(np.min(h)), maximum=float(np.max(h)),
        std=std, skewness=sk, kurtosis=ku, ci_lo=lo, ci_hi=hi,
        adf_stat=adf.stat, adf_critical=adf.critical_5pct, adf_reject=adf.reject,
        n_obs=len(h), degenerate=degenerate,
    )
