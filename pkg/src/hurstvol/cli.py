"""Command-line front end: ``hurstvol analyze | synth | verify``.

``analyze`` runs the full pipeline on price CSVs: ingest, log prices,
rolling exponent + volatility, summary statistics, sigma-H fit, fair
volatility.  Per series it writes ``<name>.hurst.csv``, ``<name>.fit.csv``,
``<name>.report.json`` and (unless disabled) ``<name>.hurst.svg`` and
``<name>.scatter.svg``.

``synth`` writes synthetic paths as CSV; the ``fig1``/``fig2`` presets also
emit companion ACF tables and a rendered figure.

``verify`` runs the identity suite (quick) or the Monte-Carlo suites (full)
and exits non-zero on any failure.

Exit codes: 0 success, 1 partial failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path

import numpy as np

from hurstvol import estimate, fairvol, plots, synth, verify
from hurstvol.series import TimeSeries, format_float

log = logging.getLogger("hurstvol")

EXIT_OK = 0
EXIT_PARTIAL = 1
EXIT_CONFIG = 2


class IngestError(ValueError):
    pass


@dataclass
class RunConfig:
    """Validated configuration of an ``analyze`` run."""

    inputs: list[Path]
    out_dir: Path
    date_col: str = "Date"
    close_col: str = "Close"
    delta: int = 20
    stride: int = 1
    estimator: str = "scaled"
    levels: tuple[float, ...] = (0.10, 0.05, 0.01)
    periods: int = 252
    seed: int = 0
    make_plots: bool = True

    def __post_init__(self) -> None:
        if self.delta < 8 or self.delta % 2:
            raise ValueError("window must be an even integer >= 8")
        if self.stride < 1:
            raise ValueError("stride must be >= 1")
        if not self.levels or any(not (0.0 < a < 1.0) for a in self.levels):
            raise ValueError("levels must lie in (0, 1)")
        if self.periods < 1:
            raise ValueError("annualization periods must be >= 1")


def ingest_csv(path: Path | str, date_col: str = "Date", close_col: str = "Close") -> TimeSeries:
    """Read a (date, close) CSV into a price series.

    Rows with a missing or non-numeric close are dropped (count logged);
    rows are sorted by ISO date and duplicate dates keep the last occurrence.
    """
    path = Path(path)
    if not path.exists():
        raise IngestError(f"missing file: {path}")
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        if date_col not in header or close_col not in header:
            raise IngestError(
                f"{path.name}: columns {date_col!r}/{close_col!r} not in header {header}"
            )
        rows: dict[date, float] = {}
        dropped = 0
        for row in reader:
            raw_d = (row.get(date_col) or "").strip()
            raw_c = (row.get(close_col) or "").strip()
            try:
                d = date.fromisoformat(raw_d)
                c = float(raw_c)
            except ValueError:
                dropped += 1
                continue
            if not np.isfinite(c):
                dropped += 1
                continue
            rows[d] = c  # keep-last on duplicate dates
    if dropped:
        log.info("%s: dropped %d unparseable row(s)", path.name, dropped)
    if not rows:
        raise IngestError(f"{path.name}: no usable rows after cleaning")
    days = sorted(rows)
    values = np.array([rows[d] for d in days])
    return TimeSeries(values, role="price", name=path.stem,
                      timestamps=[d.isoformat() for d in days])


# ---------------------------------------------------------------------------
# analyze
# ---------------------------------------------------------------------------

def _write_hurst_csv(path: Path, traj: estimate.HurstTrajectory) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "h_hat", "sigma_hat", "flag"])
        for t, h, s, f in zip(traj.t, traj.h_hat, traj.sigma_hat, traj.flag):
            w.writerow([int(t),
                        "" if np.isnan(h) else format_float(h),
                        format_float(s), int(f)])


def _write_fit_csv(path: Path, fit: fairvol.FitResult) -> None:
    model = fairvol.model_curve(fit.h, fit.a, fit.b, fit.n_series)
    lo, hi = fairvol.prediction_bounds(fit, fit.h, level=0.99)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["h", "sigma", "model", "lo99", "hi99", "residual"])
        for row in zip(fit.h, fit.sigma, model, lo, hi, fit.residuals):
            w.writerow([format_float(v) for v in row])


def analyze_series(series: TimeSeries, cfg: RunConfig) -> dict:
    """Run the pipeline on one price series and write its artifacts."""
    logp = estimate.to_log_prices(series)
    wcfg = estimate.WindowConfig(delta=cfg.delta, stride=cfg.stride,
                                 estimator=cfg.estimator)
    traj = estimate.hurst_pointwise(logp, wcfg)
    stats = estimate.summary_stats(traj, alpha=0.05)
    sample = fairvol.SigmaHSample.from_trajectory(traj)
    fit = fairvol.fit_sigma_h(sample)
    report = fairvol.fair_volatility(fit, n_series=traj.n, delta=cfg.delta,
                                     levels=cfg.levels, periods=cfg.periods)

    out = cfg.out_dir
    out.mkdir(parents=True, exist_ok=True)
    files = []
    hurst_csv = out / f"{series.name}.hurst.csv"
    _write_hurst_csv(hurst_csv, traj)
    files.append(hurst_csv.name)
    fit_csv = out / f"{series.name}.fit.csv"
    _write_fit_csv(fit_csv, fit)
    files.append(fit_csv.name)
    if cfg.make_plots:
        ci = estimate.martingale_ci(traj.n, cfg.delta, 0.05)
        hurst_svg = out / f"{series.name}.hurst.svg"
        plots.plot_hurst_trajectory(traj, ci, hurst_svg)
        files.append(hurst_svg.name)
        scatter_svg = out / f"{series.name}.scatter.svg"
        plots.plot_scatter_fit(fit, scatter_svg)
        files.append(scatter_svg.name)

    payload = {
        "schema_version": 1,
        "series": series.name,
        "n_obs": len(series),
        "config": {
            "window": cfg.delta, "stride": cfg.stride, "estimator": cfg.estimator,
            "levels": list(cfg.levels), "annualize": cfg.periods, "seed": cfg.seed,
        },
        "summary": stats.as_dict(),
        "fit": fit.as_dict(),
        "fair_volatility": report.as_dict(),
        "files": [],
    }
    report_json = out / f"{series.name}.report.json"
    payload["files"] = sorted(files + [report_json.name])
    with open(report_json, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return payload


def cmd_analyze(cfg: RunConfig) -> tuple[int, dict]:
    """Process every input; continue across failures; report per series."""
    reports = {}
    failures = {}
    for path in cfg.inputs:
        name = Path(path).stem
        try:
            series = ingest_csv(path, cfg.date_col, cfg.close_col)
            reports[name] = analyze_series(series, cfg)
            log.info("%s: ok (fair vol %.4f)", name,
                     reports[name]["fair_volatility"]["fair_vol"])
        except Exception as exc:  # keep going; summarize at the end
            failures[name] = str(exc)
            log.error("%s: %s", name, exc)
    code = EXIT_OK if not failures else EXIT_PARTIAL
    return code, {"reports": reports, "failures": failures}


# ---------------------------------------------------------------------------
# synth
# ---------------------------------------------------------------------------

def _write_acf_csv(path: Path, values: np.ndarray, max_lag: int) -> None:
    rho = estimate.acf(values, max_lag)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["lag", "acf"])
        for k, v in enumerate(rho):
            w.writerow([k, format_float(v)])


def synth_fig1(out: Path, n: int, seed: int, phi: float, sigma: float,
               make_plots: bool) -> list[str]:
    """Matched-volatility pair: IID returns vs strongly autocorrelated AR(1)."""
    iid = synth.synth_iid(sigma, n, seed)
    ar1 = synth.synth_ar1(phi, sigma, n, seed)
    files = []
    for ts, tag in ((iid, "iid"), (ar1, "ar1")):
        p = out / f"fig1.{tag}.csv"
        ts.write_csv(p)
        files.append(p.name)
        pa = out / f"fig1.{tag}.acf.csv"
        _write_acf_csv(pa, ts.values, 40)
        files.append(pa.name)
    if make_plots:
        fig = out / "fig1.svg"
        plots.plot_series_pair(iid.values, ar1.values,
                               ("IID", f"AR(1) phi={phi:g}"), fig)
        files.append(fig.name)
    return files


def synth_fig2(out: Path, n: int, seed: int, h1: float, h2: float,
               make_plots: bool) -> list[str]:
    """Two-regime step-memory demo with increment-ACF panels."""
    hpath, ts = synth.synth_step_memory(h1, h2, n, seed)
    files = []
    p = out / "fig2.path.csv"
    ts.write_csv(p)
    files.append(p.name)
    ph = out / "fig2.hpath.csv"
    TimeSeries(hpath.values, role="hurst", name="hpath").write_csv(ph)
    files.append(ph.name)
    inc = np.diff(ts.values)
    half = len(inc) // 2
    for tag, seg in (("first", inc[:half]), ("second", inc[half:]), ("full", inc)):
        pa = out / f"fig2.acf_{tag}.csv"
        _write_acf_csv(pa, seg, 40)
        files.append(pa.name)
    if make_plots:
        fig = out / "fig2.svg"
        plots.plot_step_memory_demo(hpath.values, ts.values, fig)
        files.append(fig.name)
    return files


def cmd_synth(args: argparse.Namespace) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if args.preset:
        if args.preset == "fig1":
            files = synth_fig1(out, args.n or 2 ** 16, args.seed, args.phi,
                               args.sigma, not args.no_plots)
        else:
            files = synth_fig2(out, args.n or 4096, args.seed, args.h1, args.h2,
                               not args.no_plots)
        log.info("wrote %s", ", ".join(files))
        return EXIT_OK
    kind = args.kind.replace("-", "_")
    params = {
        "h": args.hurst, "h1": args.h1, "h2": args.h2, "phi": args.phi,
        "sigma": args.sigma, "nu": args.nu, "lam": args.lam, "nu_h": args.nu_h,
        "sigma_h": args.sigma_h, "h_drv": args.h_drv,
        "h_mode": args.h_mode, "nu_mode": args.nu_mode,
    }
    params = {k: v for k, v in params.items() if v is not None}
    spec = synth.SynthesisSpec(kind=kind, n=args.n or 4096, seed=args.seed,
                               params=params)
    ts = synth.realize(spec)
    p = out / f"{ts.name}.csv"
    ts.write_csv(p)
    log.info("wrote %s", p)
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def cmd_verify(args: argparse.Namespace) -> int:
    ok, results = verify.run(level=args.level, perturb_vh=args.perturb_vh)
    for r in results:
        print(r.line())
    print(f"{sum(r.passed for r in results)}/{len(results)} checks passed")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "verify.report.json", "w") as fh:
            json.dump({"schema_version": 1, "level": args.level, "passed": ok,
                       "checks": [{"name": r.name, "passed": r.passed,
                                   "detail": r.detail} for r in results]},
                      fh, indent=2, sort_keys=True)
            fh.write("\n")
    return EXIT_OK if ok else EXIT_PARTIAL


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hurstvol",
        description="Pointwise Hurst-Holder regularity and fair volatility of price series",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    pa = sub.add_parser("analyze", help="run the full pipeline on price CSVs")
    pa.add_argument("inputs", nargs="+", help="price CSV files")
    pa.add_argument("--out", default="out", help="output directory")
    pa.add_argument("--date-col", default="Date")
    pa.add_argument("--close-col", default="Close")
    pa.add_argument("--window", type=int, default=20, help="rolling window (even, >= 8)")
    pa.add_argument("--stride", type=int, default=1)
    pa.add_argument("--estimator", choices=estimate.ESTIMATORS, default="scaled")
    pa.add_argument("--levels", default="0.10,0.05,0.01",
                    help="comma-separated significance levels")
    pa.add_argument("--annualize", type=int, default=252, metavar="PERIODS")
    pa.add_argument("--seed", type=int, default=0)
    pa.add_argument("--no-plots", action="store_true")

    ps = sub.add_parser("synth", help="generate synthetic series")
    ps.add_argument("--kind", choices=[k.replace("_", "-") for k in synth.KINDS],
                    default="fbm")
    ps.add_argument("--preset", choices=["fig1", "fig2"],
                    help="bundled demos: matched-volatility pair / step memory")
    ps.add_argument("--n", type=int)
    ps.add_argument("--seed", type=int, default=0)
    ps.add_argument("--out", default="out")
    ps.add_argument("--hurst", type=float)
    ps.add_argument("--h1", type=float, default=0.4)
    ps.add_argument("--h2", type=float, default=0.6)
    ps.add_argument("--phi", type=float, default=0.9)
    ps.add_argument("--sigma", type=float, default=0.01)
    ps.add_argument("--nu", type=float)
    ps.add_argument("--lam", type=float)
    ps.add_argument("--nu-h", type=float)
    ps.add_argument("--sigma-h", type=float)
    ps.add_argument("--h-drv", type=float)
    ps.add_argument("--h-mode", choices=["constant", "fou"])
    ps.add_argument("--nu-mode", choices=["const", "sigma-law"])
    ps.add_argument("--no-plots", action="store_true")

    pv = sub.add_parser("verify", help="run the self-verification suite")
    pv.add_argument("--level", choices=["quick", "full"], default="quick")
    pv.add_argument("--out", help="optionally write verify.report.json here")
    pv.add_argument("--perturb-vh", type=float, default=0.0, help=argparse.SUPPRESS)
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "analyze":
            levels = tuple(float(x) for x in args.levels.split(","))
            cfg = RunConfig(
                inputs=[Path(p) for p in args.inputs],
                out_dir=Path(args.out),
                date_col=args.date_col, close_col=args.close_col,
                delta=args.window, stride=args.stride, estimator=args.estimator,
                levels=levels, periods=args.annualize, seed=args.seed,
                make_plots=not args.no_plots,
            )
        elif args.command == "synth":
            return cmd_synth(args)
        else:
            return cmd_verify(args)
    except ValueError as exc:
        log.error("configuration error: %s", exc)
        return EXIT_CONFIG
    code, _ = cmd_analyze(cfg)
    return code


if __name__ == "__main__":
    sys.exit(main())
