"""Self-verification suites: closed-form identities and Monte-Carlo behaviour.

``run(level='quick')`` executes fast deterministic identity checks (well
under five seconds); ``level='full'`` adds the Monte-Carlo suites (a couple
of minutes).  Each check reports one pass/fail line with its tolerance.  The
``perturb_vh`` argument injects an offset into the canonical variance
evaluator so the suite's sensitivity can itself be demonstrated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from hurstvol import estimate, fairvol, specfun, synth


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        return f"[{mark}] {self.name}: {self.detail}"


# reference rows: (sigma2, P[H outside (0,1)], E[E(H)] second-order value)
GAUSSIAN_LAW_TABLE = [
    (0.0230, 9.7757e-04, 1.1677),
    (0.0200, 4.0695e-04, 1.1458),
    (0.0175, 1.5705e-04, 1.1276),
    (0.0150, 4.4557e-05, 1.1093),
    (0.0125, 7.7442e-06, 1.0911),
    (0.0100, 5.7330e-07, 1.0729),
    (0.0050, 1.5375e-12, 1.0364),
    (0.0010, 2.5968e-56, 1.0073),
]

# reference confidence intervals: (n, delta, alpha, lo, hi) at 3 decimals
MARTINGALE_CI_TABLE = [
    (18101, 20, 0.05, 0.468, 0.532),
    (7555, 20, 0.05, 0.465, 0.535),
]

# reference fair-volatility mechanism: (a, b, N, fair, ci95_lo, ci95_hi, annual)
FAIRVOL_TABLE = [
    (8.379e-4, 1.014, 18101, 0.0077, 0.0058, 0.0104, 12.2),
    (8.114e-4, 1.010, 7555, 0.0117, None, None, 18.6),
]


def _check(name: str, passed: bool, detail: str) -> CheckResult:
    return CheckResult(name, bool(passed), detail)


# ---------------------------------------------------------------------------
# quick: deterministic identity suite
# ---------------------------------------------------------------------------

def _quick_checks() -> list[CheckResult]:
    out = []
    grid = np.round(np.arange(0.01, 1.0, 0.01), 10)

    worst = 0.0
    for h in grid:
        ref = specfun.v_h(h)
        for form in specfun.VhForm:
            if form in specfun.SINGULAR_FORMS and abs(h - 0.5) < 1e-9:
                continue
            rel = abs(specfun.v_h_form(h, form) - ref) / ref
            worst = max(worst, rel)
    out.append(_check("variance closed forms agree (99-point grid)",
                      worst < 1e-10, f"worst rel err {worst:.2e} (tol 1e-10)"))

    worst = max(abs(specfun.e_h(h) - specfun.a_h(h)) / specfun.a_h(h) for h in grid)
    out.append(_check("duplication identity e_h == a_h",
                      worst < 1e-10, f"worst rel err {worst:.2e} (tol 1e-10)"))

    e0, e1, e2 = specfun.e_h_derivatives_at_half()
    target2 = 8.0 + 2.0 * math.pi ** 2 / 3.0
    ok = abs(e0 - 1.0) < 1e-12 and abs(e1 + 2.0) < 1e-10 and abs(e2 - target2) < 1e-9
    step = 1e-5
    fd1 = (specfun.e_h(0.5 + step) - specfun.e_h(0.5 - step)) / (2 * step)
    fd2 = (specfun.e_h(0.5 + step) - 2 * specfun.e_h(0.5) + specfun.e_h(0.5 - step)) / step ** 2
    ok = ok and abs(fd1 + 2.0) < 1e-4 and abs(fd2 - target2) < 1e-3
    out.append(_check("derivatives at 1/2 = (1, -2, 8+2pi^2/3)", ok,
                      f"analytic ({e0:.6f}, {e1:.6f}, {e2:.6f}); fd ({fd1:.6f}, {fd2:.4f})"))

    worst = 0.0
    for s2, p_ref, e_ref in GAUSSIAN_LAW_TABLE:
        law = specfun.GaussianHurstLaw(sigma2=s2)
        worst = max(worst,
                    abs(specfun.expected_e_h_taylor(law) - e_ref) / e_ref,
                    abs(specfun.prob_outside_unit(law) - p_ref) / p_ref)
    out.append(_check("Gaussian-exponent table (8 rows, 4 significant digits)",
                      worst < 1e-3, f"worst rel err {worst:.2e} (tol 1e-3)"))

    ok = True
    details = []
    for n, d, alpha, lo_ref, hi_ref in MARTINGALE_CI_TABLE:
        lo, hi = estimate.martingale_ci(n, d, alpha)
        ok = ok and round(lo, 3) == lo_ref and round(hi, 3) == hi_ref
        details.append(f"n={n}: ({lo:.3f}, {hi:.3f})")
    out.append(_check("martingale confidence intervals (3 decimals)", ok,
                      "; ".join(details)))

    ok = True
    details = []
    for a, b, n, fair_ref, lo_ref, hi_ref, annual_ref in FAIRVOL_TABLE:
        fair = fairvol.model_curve(0.5, a, b, n)
        ok = ok and abs(fair - fair_ref) <= 1e-4
        details.append(f"N={n}: fair {fair:.5f} vs {fair_ref}")
        if lo_ref is not None:
            h_lo, h_hi = estimate.martingale_ci(n, 20, 0.05)
            s_hi = fairvol.model_curve(h_lo, a, b, n)
            s_lo = fairvol.model_curve(h_hi, a, b, n)
            ok = ok and abs(s_lo - lo_ref) <= 1e-4 and abs(s_hi - hi_ref) <= 1e-4
        ok = ok and abs(fairvol.annualize(fair_ref) * 100.0 - annual_ref) <= 0.05
    out.append(_check("fair-volatility mechanism (tol 1e-4; annualized 0.05)",
                      ok, "; ".join(details)))

    worst = max(abs(fairvol.model_curve(h, 0.0, 1.0, 4096) - fairvol.sigma_of_h(h, 4096))
                for h in grid)
    out.append(_check("model curve reduces to sigma_of_h at a=0, b=1",
                      worst < 1e-12, f"worst abs err {worst:.2e} (tol 1e-12)"))

    hs = np.linspace(0.06, 0.92, 200)
    curve = fairvol.model_curve(hs, 0.0, 1.0, 4096)
    out.append(_check("model curve strictly decreasing in h",
                      bool(np.all(np.diff(curve) < 0)), "sampled on [0.06, 0.92]"))

    probs = [specfun.prob_outside_unit(specfun.GaussianHurstLaw(sigma2=s))
             for s in np.linspace(0.001, 0.05, 25)]
    out.append(_check("exceedance probability monotone in variance",
                      bool(np.all(np.diff(probs) > 0)), "25-point variance grid"))

    cov = synth.FgnCovariance(h=0.5)
    ok = (abs(synth.fgn_autocov(cov, 0) - 1.0) < 1e-12
          and abs(synth.fgn_autocov(cov, 3)) < 1e-12)
    cov7 = synth.FgnCovariance(h=0.7, normalization="unit")
    ok = ok and abs(synth.fgn_autocov(cov7, 1) - (2.0 ** 1.4 - 2.0) / 2.0) < 1e-12
    out.append(_check("fGn autocovariance spot values", ok,
                      "h=1/2 lags 0,3; h=0.7 unit lag 1"))
    return out


# ---------------------------------------------------------------------------
# full: Monte-Carlo suites
# ---------------------------------------------------------------------------

def _mc_checks() -> list[CheckResult]:
    out = []

    # exact fGn: unit-lag variance within 3 SE of v_h
    for h in (0.3, 0.5, 0.7):
        per_seed = []
        for seed in range(20):
            z = synth.synth_fgn(h, 2 ** 15, seed).values
            per_seed.append(float(np.mean(z * z)))
        mean = float(np.mean(per_seed))
        se = float(np.std(per_seed, ddof=1) / math.sqrt(len(per_seed)))
        target = specfun.v_h(h)
        out.append(_check(f"fGn unit-lag variance, h={h}",
                          abs(mean - target) <= 3 * se,
                          f"{mean:.4f} vs {target:.4f} (3 SE = {3 * se:.4f})"))

    # self-similarity of lag-T increments
    for h in (0.3, 0.7):
        ok = True
        details = []
        ratios = {T: [] for T in (2, 4, 8)}
        for seed in range(10):
            x = synth.synth_fbm(h, 2 ** 15, seed).values
            v1 = float(np.mean(np.diff(x) ** 2))
            for T in (2, 4, 8):
                dT = x[T:] - x[:-T]
                ratios[T].append(float(np.mean(dT * dT)) / v1)
        for T in (2, 4, 8):
            r = float(np.mean(ratios[T]))
            ok = ok and abs(r / T ** (2 * h) - 1.0) < 0.05
            details.append(f"T={T}: {r:.3f}/{T ** (2 * h):.3f}")
        out.append(_check(f"lag-T variance scaling, h={h}", ok, "; ".join(details)))

    # estimator recovery on fBm
    cfg = estimate.WindowConfig(delta=20)
    for h in (0.3, 0.5, 0.7):
        means, stds = [], []
        for seed in range(15):
            traj = estimate.hurst_pointwise(synth.synth_fbm(h, 2 ** 13, seed), cfg)
            hh = traj.h_hat[traj.valid()]
            means.append(float(np.mean(hh)))
            stds.append(float(np.std(hh)))
        bias = float(np.mean(means)) - h
        out.append(_check(f"rolling estimator mean, h={h}",
                          abs(bias) <= 0.03, f"bias {bias:+.4f} (tol 0.03)"))
        if h == 0.5:
            target = 1.0 / math.sqrt(2 * 20 * math.log(2 ** 13 - 1) ** 2)
            ratio = float(np.mean(stds)) / target
            out.append(_check("rolling estimator dispersion at h=1/2",
                              abs(ratio - 1.0) <= 0.15,
                              f"std ratio {ratio:.3f} (tol 15%)"))

    # moving-average process with constant exponent 1/2
    per_seed = [float(np.mean(np.diff(
        synth.synth_mpre(synth.HPath.constant(0.5, 1024), 1.0, seed).values) ** 2))
        for seed in range(30)]
    mean = float(np.mean(per_seed))
    se = float(np.std(per_seed, ddof=1) / math.sqrt(len(per_seed)))
    out.append(_check("time-varying-exponent process, constant 1/2 variance",
                      abs(mean - 1.0) <= 3 * se,
                      f"{mean:.4f} vs 1.0000 (3 SE = {3 * se:.4f})"))

    # step-memory increment autocorrelation signs
    _, ts = synth.synth_step_memory(0.4, 0.6, 4096, seed=2)
    inc = np.diff(ts.values)
    half = len(inc) // 2
    r1 = estimate.acf(inc[:half], 1)[1]
    r2 = estimate.acf(inc[half:], 1)[1]
    rf = estimate.acf(inc, 1)[1]
    out.append(_check("step-memory ACF pattern",
                      r1 < -0.05 and r2 > 0.05 and abs(rf) < 0.05,
                      f"first {r1:+.3f}, second {r2:+.3f}, full {rf:+.3f}"))

    # matched-volatility pair
    a = synth.synth_iid(0.01, 2 ** 16, 0).values
    b = synth.synth_ar1(0.9, 0.01, 2 ** 16, 0).values
    sa, sb = float(np.std(a)), float(np.std(b))
    gap = abs(sa - sb) / sa
    dacf = abs(estimate.acf(b, 1)[1] - estimate.acf(a, 1)[1])
    out.append(_check("matched-volatility IID vs AR(1) pair",
                      gap < 0.02 and dacf > 0.7,
                      f"std gap {gap:.3%}, lag-1 ACF gap {dacf:.3f}"))

    # unit-root test: size and power
    rng = np.random.default_rng(0)
    rej = sum(estimate.adf_test(np.cumsum(rng.standard_normal(4000))).reject
              for _ in range(60))
    out.append(_check("unit-root test size on random walks",
                      rej / 60 <= 0.08, f"rejection rate {rej / 60:.3f} (tol 0.08)"))
    rej = 0
    for _ in range(20):
        eps = rng.standard_normal(4000)
        x = np.empty(4000)
        x[0] = 0.0
        for t in range(1, 4000):
            x[t] = 0.95 * x[t - 1] + eps[t]
        rej += estimate.adf_test(x).reject
    out.append(_check("unit-root test power on mean-reverting series",
                      rej == 20, f"rejected {rej}/20"))

    # Monte-Carlo vs Taylor expectation in the small-variance regime
    law = specfun.GaussianHurstLaw(sigma2=0.001)
    mc = specfun.expected_e_h_montecarlo(law, samples=400_000, seed=0)
    taylor = specfun.expected_e_h_taylor(law)
    out.append(_check("Taylor vs Monte-Carlo expectation (sigma2=1e-3)",
                      abs(mc - taylor) < 8e-4,
                      f"mc {mc:.6f} vs taylor {taylor:.6f}"))
    return out


def run(level: str = "quick", perturb_vh: float = 0.0) -> tuple[bool, list[CheckResult]]:
    """Run the suite; returns (all passed, individual results)."""
    if level not in ("quick", "full"):
        raise ValueError("level must be 'quick' or 'full'")
    old = specfun._VH_PERTURB
    specfun._VH_PERTURB = float(perturb_vh)
    try:
        results = _quick_checks()
        if level == "full":
            results.extend(_mc_checks())
    finally:
        specfun._VH_PERTURB = old
    return all(r.passed for r in results), results
