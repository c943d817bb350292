"""Pointwise Hurst-Holder regularity and fair-volatility analysis of price series.

The package is organised around one chain of ideas:

* ``specfun``  -- closed-form gamma-function constants that tie the Hurst
  exponent of a fractional process to the variance of its unit-lag
  increments.
* ``synth``    -- seeded generators for fractional Gaussian noise, fractional
  Brownian motion, moving-average processes with a time-varying exponent,
  and the auxiliary AR(1)/IID/step-memory demonstration series.
* ``estimate`` -- rolling-window estimation of the pointwise exponent and the
  realized volatility, the martingale confidence interval, ACF, summary
  statistics and an augmented Dickey-Fuller test.
* ``fairvol``  -- the sigma-H law: fit ``a + N**(-b*h) * sqrt(V(b*h))`` to the
  (H, sigma) scatter and read off the fair volatility at ``h = 1/2``.
* ``cli``      -- ``hurstvol analyze|synth|verify`` command-line front end.
"""

from hurstvol.series import TimeSeries
from hurstvol.specfun import (
    GaussianHurstLaw,
    VhForm,
    a_h,
    e_h,
    e_h_derivatives_at_half,
    expected_e_h_montecarlo,
    expected_e_h_taylor,
    prob_outside_unit,
    v_h,
    v_h_form,
)
from hurstvol.synth import (
    FgnCovariance,
    HPath,
    SynthesisSpec,
    fgn_autocov,
    synth_ar1,
    synth_fbm,
    synth_fgn,
    synth_fou_h,
    synth_iid,
    synth_mpre,
    synth_step_memory,
)
from hurstvol.estimate import (
    HurstTrajectory,
    SummaryStats,
    WindowConfig,
    acf,
    adf_test,
    hurst_pointwise,
    martingale_ci,
    realized_vol,
    summary_stats,
    to_log_prices,
    window_moment2,
)
from hurstvol.fairvol import (
    FairVolReport,
    FitResult,
    SigmaHSample,
    annualize,
    fair_volatility,
    fit_sigma_h,
    model_curve,
    prediction_bounds,
    sigma_of_h,
)

__version__ = "0.1.0"

__all__ = [
    "TimeSeries",
    "GaussianHurstLaw", "VhForm", "v_h", "v_h_form", "a_h", "e_h",
    "e_h_derivatives_at_half", "expected_e_h_taylor", "prob_outside_unit",
    "expected_e_h_montecarlo",
    "FgnCovariance", "HPath", "SynthesisSpec", "fgn_autocov", "synth_fbm",
    "synth_fgn", "synth_mpre", "synth_step_memory", "synth_fou_h",
    "synth_ar1", "synth_iid",
    "WindowConfig", "HurstTrajectory", "SummaryStats", "to_log_prices",
    "window_moment2", "hurst_pointwise", "realized_vol", "martingale_ci",
    "acf", "summary_stats", "adf_test",
    "SigmaHSample", "FitResult", "FairVolReport", "sigma_of_h", "model_curve",
    "fit_sigma_h", "prediction_bounds", "fair_volatility", "annualize",
    "__version__",
]
