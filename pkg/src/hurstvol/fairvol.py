"""The sigma-H law: volatility as a function of the pointwise exponent.

A process that locally behaves like a kernel-normalized fBm sampled at n
points per unit interval has unit-lag volatility

    sigma(h) = sqrt(v_h(h)) * n**(-h),

a strictly decreasing curve through ``n**-0.5`` at ``h = 1/2``.  Fitting the
two-parameter family

    model(h) = a + N**(-b*h) * sqrt(v_h(b*h))

to the estimated (H_t, sigma_t) scatter (vertical shift ``a``, exponent
rescale ``b``) tests the law on data; the fitted value at ``h = 1/2`` is the
fair volatility: the level consistent with martingale behaviour.  Its
confidence interval is obtained by pushing the martingale interval for H
through the fitted curve, which is monotone, so endpoint order is simply
reversed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import psi
from scipy.stats import t as t_dist

from hurstvol.estimate import HurstTrajectory, martingale_ci
from hurstvol.specfun import EPS, check_hurst, v_h

TRADING_DAYS = 252


@dataclass
class SigmaHSample:
    """Aligned (h_hat, sigma_hat) pairs plus the source-series length N."""

    h: np.ndarray
    sigma: np.ndarray
    n_series: int

    def __post_init__(self) -> None:
        self.h = np.asarray(self.h, dtype=float)
        self.sigma = np.asarray(self.sigma, dtype=float)
        if self.h.shape != self.sigma.shape:
            raise ValueError("h and sigma must be aligned")
        if np.any(self.sigma < 0.0):
            raise ValueError("sigma values must be non-negative")
        if self.n_series < len(self.h):
            raise ValueError("N must be at least the number of pairs")

    @classmethod
    def from_trajectory(cls, traj: HurstTrajectory) -> "SigmaHSample":
        ok = traj.valid()
        return cls(traj.h_hat[ok], traj.sigma_hat[ok], traj.n)


@dataclass
class FitResult:
    """Least-squares fit of the two-parameter sigma-H curve."""

    a: float
    b: float
    ci_a: tuple[float, float]
    ci_b: tuple[float, float]
    r_squared: float
    sse: float
    rmse: float
    residuals: np.ndarray = field(repr=False)
    h: np.ndarray = field(repr=False)
    sigma: np.ndarray = field(repr=False)
    n_series: int = 0
    n_pairs: int = 0
    n_dropped: int = 0
    converged: bool = True
    iterations: int = 0
    low_h_negative_bias: bool = False  # systematic negative residuals below the 5th h percentile

    def as_dict(self) -> dict:
        return {
            "a": self.a, "b": self.b,
            "ci_a": list(self.ci_a), "ci_b": list(self.ci_b),
            "r_squared": self.r_squared, "sse": self.sse, "rmse": self.rmse,
            "n_pairs": self.n_pairs, "n_dropped": self.n_dropped,
            "n_series": self.n_series, "converged": self.converged,
            "iterations": self.iterations,
            "low_h_negative_bias": self.low_h_negative_bias,
        }


@dataclass
class FairVolReport:
    """Fair volatility with nested confidence intervals and annualization."""

    fair_vol: float
    intervals: dict[float, tuple[float, float]]
    fair_vol_annualized: float
    intervals_annualized: dict[float, tuple[float, float]]
    periods: int
    fit: FitResult = field(repr=False)

    def as_dict(self) -> dict:
        return {
            "fair_vol": self.fair_vol,
            "fair_vol_annualized": self.fair_vol_annualized,
            "periods": self.periods,
            "intervals": {f"{1 - a:.0%}": list(v) for a, v in self.intervals.items()},
            "intervals_annualized": {
                f"{1 - a:.0%}": list(v) for a, v in self.intervals_annualized.items()
            },
        }


def sigma_of_h(h: float, n: int) -> float:
    """Unit-lag volatility of an fBm with exponent h sampled at n points."""
    h = check_hurst(h)
    if n < 2:
        raise ValueError("n must be at least 2")
    return math.sqrt(v_h(h)) * float(n) ** (-h)


def model_curve(h, a: float, b: float, n_series: int):
    """Two-parameter curve ``a + N**(-b*h) * sqrt(v_h(b*h))``.

    Accepts a scalar or an array of exponent values; ``b*h`` must lie in
    (0, 1).
    """
    h_arr = np.atleast_1d(np.asarray(h, dtype=float))
    u = b * h_arr
    if np.any(u <= EPS) or np.any(u >= 1.0 - EPS):
        raise ValueError("b*h must lie inside (0, 1)")
    vals = a + np.exp(-u * math.log(n_series)) * np.sqrt(_v_h_vec(u))
    return float(vals[0]) if np.isscalar(h) or np.ndim(h) == 0 else vals


def _v_h_vec(u: np.ndarray) -> np.ndarray:
    from scipy.special import gamma as _g
    from hurstvol import specfun

    return _g(u) * _g(1.0 - u) / (math.pi * _g(1.0 + 2.0 * u)) + specfun._VH_PERTURB


def _model_and_jacobian(h: np.ndarray, a: float, b: float, ln_n: float):
    u = b * h
    f = np.exp(-u * ln_n) * np.sqrt(_v_h_vec(u))
    # d model / db = h * f * (-ln N + 0.5 * d log v_h / du)
    dlogv = psi(u) - psi(1.0 - u) - 2.0 * psi(1.0 + 2.0 * u)
    dfdb = h * f * (-ln_n + 0.5 * dlogv)
    return a + f, dfdb


class DegenerateSpanError(ValueError):
    """The exponent values span too narrow an interval to identify b."""


def fit_sigma_h(data: SigmaHSample, max_iter: int = 200, rel_tol: float = 1e-12) -> FitResult:
    """Damped Gauss-Newton fit of the sigma-H curve to an (h, sigma) sample.

    Pairs whose exponent falls outside the curve's domain are dropped (their
    count is reported).  Initialization is ``a=0, b=1``; steps that would
    push ``b*h`` out of (0, 1) or increase the SSE are halved.  Parameter
    confidence intervals come from the Jacobian covariance at the optimum
    with Student-t quantiles (dof = pairs - 2).
    """
    margin = 0.01
    keep = (data.h > margin) & (data.h < 1.0 - margin)
    h = data.h[keep]
    s = data.sigma[keep]
    n_dropped = int(len(data.h) - keep.sum())
    if len(h) < 50:
        raise ValueError("need at least 50 valid pairs")
    if float(h.max() - h.min()) < 0.1:
        raise DegenerateSpanError("exponent span below 0.1; b is not identifiable")

    ln_n = math.log(data.n_series)
    a, b = 0.0, 1.0
    model, _ = _model_and_jacobian(h, a, b, ln_n)
    sse = float(np.sum((s - model) ** 2))
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        model, dfdb = _model_and_jacobian(h, a, b, ln_n)
        r = s - model
        jac = np.column_stack([np.ones_like(h), dfdb])
        step, *_ = np.linalg.lstsq(jac, r, rcond=None)
        lam = 1.0
        while lam > 1e-10:
            a_try, b_try = a + lam * step[0], b + lam * step[1]
            u = b_try * h
            if u.max() < 1.0 - EPS and u.min() > EPS:
                trial, _ = _model_and_jacobian(h, a_try, b_try, ln_n)
                new_sse = float(np.sum((s - trial) ** 2))
                if new_sse < sse:
                    break
            lam *= 0.5
        else:
            converged = True  # no descent direction left at float resolution
            break
        improvement = (sse - new_sse) / sse if sse > 0 else 0.0
        a, b, sse = a_try, b_try, new_sse
        if improvement < rel_tol:
            converged = True
            break

    model, dfdb = _model_and_jacobian(h, a, b, ln_n)
    resid = s - model
    dof = len(h) - 2
    jac = np.column_stack([np.ones_like(h), dfdb])
    jtj = jac.T @ jac
    sigma2 = sse / dof
    cov = sigma2 * np.linalg.inv(jtj)
    tq = float(t_dist.ppf(0.975, dof))
    ci_a = (a - tq * math.sqrt(cov[0, 0]), a + tq * math.sqrt(cov[0, 0]))
    ci_b = (b - tq * math.sqrt(cov[1, 1]), b + tq * math.sqrt(cov[1, 1]))
    ss_tot = float(np.sum((s - s.mean()) ** 2))
    r2 = 1.0 - sse / ss_tot if ss_tot > 0 else float("nan")

    low_cut = np.quantile(h, 0.05)
    low = resid[h <= low_cut]
    low_bias = bool(len(low) >= 10 and np.mean(low < 0.0) > 0.8)

    return FitResult(
        a=float(a), b=float(b), ci_a=ci_a, ci_b=ci_b,
        r_squared=float(r2), sse=float(sse), rmse=float(math.sqrt(sse / dof)),
        residuals=resid, h=h, sigma=s,
        n_series=data.n_series, n_pairs=len(h), n_dropped=n_dropped,
        converged=converged, iterations=it, low_h_negative_bias=low_bias,
    )


def prediction_bounds(fit: FitResult, h, level: float = 0.99):
    """Prediction interval for a new volatility observation at exponent h.

    Combines the residual variance with the parameter covariance propagated
    through the curve gradient.
    """
    if not fit.converged:
        raise ValueError("fit did not converge")
    if not (0.0 <= level < 1.0):
        raise ValueError("level must lie in [0, 1)")
    h_arr = np.atleast_1d(np.asarray(h, dtype=float))
    ln_n = math.log(fit.n_series)
    model, dfdb = _model_and_jacobian(h_arr, fit.a, fit.b, ln_n)
    dof = fit.n_pairs - 2
    sigma2 = fit.sse / dof
    jac = np.column_stack([np.ones_like(fit.h),
                           _model_and_jacobian(fit.h, fit.a, fit.b, ln_n)[1]])
    cov = sigma2 * np.linalg.inv(jac.T @ jac)
    grad = np.column_stack([np.ones_like(h_arr), dfdb])
    param_var = np.einsum("ij,jk,ik->i", grad, cov, grad)
    tq = float(t_dist.ppf(0.5 + level / 2.0, dof)) if level > 0 else 0.0
    half = tq * np.sqrt(sigma2 + param_var)
    lo, hi = model - half, model + half
    if np.isscalar(h) or np.ndim(h) == 0:
        return float(lo[0]), float(hi[0])
    return lo, hi


def annualize(sigma: float, periods: int = TRADING_DAYS) -> float:
    """Scale a per-period volatility by sqrt(periods)."""
    if sigma < 0.0:
        raise ValueError("sigma must be non-negative")
    return sigma * math.sqrt(periods)


def fair_volatility(
    fit: FitResult,
    n_series: int | None = None,
    delta: int = 20,
    levels: tuple[float, ...] = (0.10, 0.05, 0.01),
    periods: int = TRADING_DAYS,
) -> FairVolReport:
    """Fair volatility (curve at h = 1/2) with martingale-band intervals.

    For each significance level alpha the interval endpoints are the fitted
    curve evaluated at the endpoints of :func:`martingale_ci`; the curve is
    strictly decreasing in h, so the evaluations are swapped into ascending
    order.  Annualized twins use the sqrt-of-periods rule.
    """
    if not fit.converged:
        raise ValueError("fit did not converge")
    n_series = fit.n_series if n_series is None else n_series
    fair = float(model_curve(0.5, fit.a, fit.b, fit.n_series))
    intervals: dict[float, tuple[float, float]] = {}
    for alpha in sorted(levels):
        h_lo, h_hi = martingale_ci(n_series, delta, alpha)
        s_hi = float(model_curve(h_lo, fit.a, fit.b, fit.n_series))
        s_lo = float(model_curve(h_hi, fit.a, fit.b, fit.n_series))
        intervals[alpha] = (min(s_lo, s_hi), max(s_lo, s_hi))
    ann = {a: (annualize(lo, periods), annualize(hi, periods))
           for a, (lo, hi) in intervals.items()}
    return FairVolReport(
        fair_vol=fair,
        intervals=intervals,
        fair_vol_annualized=annualize(fair, periods),
        intervals_annualized=ann,
        periods=periods,
        fit=fit,
    )
