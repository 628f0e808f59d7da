"""Command-line harness.

Subcommands: ``simulate`` (experiment grids to CSV), ``fit``, ``test`` and
``analyze`` (single-series reports), ``ingest-sce`` (survey CSV to a
quantile series), ``diagnose`` (contraction decay). Report paths render
companion PNG figures next to their delimited outputs unless ``--no-plots``
is given.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .errors import SeriesFormatError
from .experiments import (
    DESK_PERMUTATIONS,
    DESK_REPS,
    PAPER_PERMUTATIONS,
    PAPER_REPS,
    ScenarioSpec,
    run_analysis,
    run_grid,
    scenario_components,
    write_grid_csv,
)
from .inference import (
    VARIANT_CONCENTRATION,
    VARIANT_DISTANCE,
    fit,
    null_moments_from_sample,
    permutation_test,
)
from .geometry import frechet_objective
from .process import contraction_diagnostic, geometric_decay_rate
from .rng import RngStream
from .seriesio import format_float, ingest_sce, read_sce_records, read_series, write_point, write_series

SPACE_CHOICES = ("scalar", "wasserstein", "spd")
VARIANT_CHOICES = (VARIANT_DISTANCE, VARIANT_CONCENTRATION)


def _float_list(text: str) -> tuple[float, ...]:
    return tuple(float(tok) for tok in text.split(",") if tok.strip())


def _int_list(text: str) -> tuple[int, ...]:
    return tuple(int(tok) for tok in text.split(",") if tok.strip())


def _print_report(pairs) -> None:
    for key, value in pairs:
        if isinstance(value, float):
            value = format_float(value)
        print(f"{key}={value}")


def _report_text(pairs) -> str:
    lines = []
    for key, value in pairs:
        if isinstance(value, float):
            value = format_float(value)
        lines.append(f"{key}={value}")
    return "\n".join(lines) + "\n"


def _derived(path: Path, out_dir: str | None, suffix: str) -> Path:
    base = path.with_suffix("")
    if out_dir is not None:
        base = Path(out_dir) / base.name
        base.parent.mkdir(parents=True, exist_ok=True)
    return base.with_name(base.name + suffix)


def _load_series(path: str, expected_space: str | None):
    space, points, meta = read_series(path)
    if expected_space is not None and space.name != expected_space:
        raise SeriesFormatError(
            f"series file holds a {space.name} trajectory, not {expected_space}"
        )
    return space, points, meta


def _cmd_simulate(args) -> int:
    reps = args.reps if args.reps is not None else (
        PAPER_REPS if args.paper_scale else DESK_REPS
    )
    n_perm = args.B if args.B is not None else (
        PAPER_PERMUTATIONS if args.paper_scale else DESK_PERMUTATIONS
    )
    spec = ScenarioSpec(
        space=args.space,
        phi_grid=args.phi,
        length_grid=args.T,
        reps=reps,
        n_permutations=n_perm,
        alpha=args.alpha,
        master_seed=args.seed,
        sigma=args.sigma,
        max_freq=args.max_freq,
        sigma_lower=args.sigma_lower,
        sigma_log_diag=args.sigma_diag,
        dim=args.dim,
        grid_m=args.m,
        burn_in=args.burn_in,
    )
    rows = run_grid(spec, workers=args.workers, timing=args.timing)
    write_grid_csv(rows, args.out)
    print(f"wrote {len(rows)} rows to {args.out}")
    if not args.no_plots:
        from . import plots

        base = Path(args.out).with_suffix("")
        figure = plots.save_grid_summary(rows, base.with_name(base.name + ".summary.png"))
        print(f"wrote {figure}")
    return 0


def _cmd_fit(args) -> int:
    path = Path(args.series)
    space, points, _ = _load_series(args.series, args.space)
    result = fit(space, points)
    mean_file = _derived(path, args.out, ".mean.txt")
    write_point(mean_file, space, result.mean)
    report = [
        ("space", space.name),
        ("T", len(points)),
        ("phi_hat", result.concentration),
        ("frechet_variance", frechet_objective(space, points, result.mean)),
        ("r_squared", result.r_squared),
        ("iterations", result.iterations),
        ("mean_file", str(mean_file)),
    ]
    _print_report(report)
    if not args.no_plots:
        from . import plots

        plots.save_risk_curve(result.risk_curve, result.concentration,
                              _derived(path, args.out, ".risk_curve.png"))
    return 0


def _cmd_test(args) -> int:
    path = Path(args.series)
    space, points, _ = _load_series(args.series, args.space)
    stream = RngStream(args.seed)
    result = permutation_test(
        space, points, args.B, args.alpha, stream, args.variant, exact=args.exact
    )
    moments = null_moments_from_sample(result.permuted)
    report = [
        ("space", space.name),
        ("T", len(points)),
        ("variant", result.variant),
        ("B", result.n_permutations),
        ("alpha", result.alpha),
        ("statistic", result.statistic),
        ("p_value", result.p_value),
        ("reject", int(result.reject)),
        ("null_mean", moments.mean),
        ("null_sd", float(np.sqrt(moments.variance))),
    ]
    _print_report(report)
    if not args.no_plots:
        from . import plots

        plots.save_null_distribution(result.permuted, result.statistic,
                                     _derived(path, args.out, ".null_dist.png"))
    return 0


def _cmd_ingest_sce(args) -> int:
    records = read_sce_records(args.csv)
    space, points, months, skipped = ingest_sce(records, m=args.m)
    for month, reason in skipped:
        print(f"warning: skipping month {month}: {reason}", file=sys.stderr)
    if not points:
        print("error: no month had enough usable records", file=sys.stderr)
        return 2
    write_series(args.out, space, points)
    _print_report([
        ("months_written", len(months)),
        ("months_skipped", len(skipped)),
        ("first_month", months[0]),
        ("last_month", months[-1]),
        ("series_file", args.out),
    ])
    return 0


def _cmd_analyze(args) -> int:
    path = Path(args.series)
    space, points, _ = _load_series(args.series, args.space)
    result = run_analysis(
        space, points, args.B, args.alpha, RngStream(args.seed), exact=args.exact
    )
    residuals_csv = _derived(path, args.out, ".residuals.csv")
    lines = ["t,gar_residual,null_residual"]
    for t, (model, null) in enumerate(
        zip(result.residuals.model_residuals, result.residuals.null_residuals), start=1
    ):
        lines.append(f"{t},{format_float(model)},{format_float(null)}")
    residuals_csv.write_text("\n".join(lines) + "\n", encoding="utf-8")

    null_csv = _derived(path, args.out, ".null_dist.csv")
    null_lines = ["b,statistic"]
    null_lines.extend(
        f"{b},{format_float(v)}" for b, v in enumerate(result.test.permuted, start=1)
    )
    null_csv.write_text("\n".join(null_lines) + "\n", encoding="utf-8")

    report = [
        ("space", space.name),
        ("T", len(points)),
        ("variant", result.test.variant),
        ("B", result.test.n_permutations),
        ("alpha", result.test.alpha),
        ("phi_hat", result.fit.concentration),
        ("frechet_variance", result.frechet_variance),
        ("r_squared", result.fit.r_squared),
        ("statistic", result.test.statistic),
        ("p_value", result.test.p_value),
        ("reject", int(result.test.reject)),
        ("null_mean", result.null_moments.mean),
        ("null_sd", float(np.sqrt(result.null_moments.variance))),
        ("mean_gar_residual", float(np.mean(result.residuals.model_residuals))),
        ("mean_null_residual", float(np.mean(result.residuals.null_residuals))),
        ("residuals_csv", str(residuals_csv)),
        ("null_dist_csv", str(null_csv)),
    ]
    report_file = _derived(path, args.out, ".report.txt")
    report_file.write_text(_report_text(report), encoding="utf-8")
    _print_report(report + [("report_file", str(report_file))])
    if not args.no_plots:
        from . import plots

        plots.save_null_distribution(result.test.permuted, result.test.statistic,
                                     _derived(path, args.out, ".null_dist.png"))
        plots.save_residual_panels(result.residuals.model_residuals,
                                   result.residuals.null_residuals,
                                   _derived(path, args.out, ".residuals.png"))
    return 0


def _cmd_diagnose(args) -> int:
    spec = ScenarioSpec(
        space=args.space,
        master_seed=args.seed,
        sigma=args.sigma,
        max_freq=args.max_freq,
        sigma_lower=args.sigma_lower,
        sigma_log_diag=args.sigma_diag,
        dim=args.dim,
        grid_m=args.m,
    )
    space, mean, noise = scenario_components(spec)
    if args.space == "scalar":
        x, x0 = mean, mean + 1.0
    elif args.space == "wasserstein":
        from .spaces import QuantileFunction, grid_midpoints

        x, x0 = mean, QuantileFunction(grid_midpoints(spec.grid_m), 0.0, 1.0)
    else:
        from .spaces import SpdPoint

        x = mean
        x0 = SpdPoint(np.zeros(space.n_lower), np.full(space.dim, 0.5))
    estimates = contraction_diagnostic(
        space, noise, mean, args.phi, x, x0,
        t_max=args.t_max, reps=args.reps, moment=args.alpha_moment,
        stream=RngStream(args.seed),
    )
    for t, value in enumerate(estimates, start=1):
        print(f"t={t} estimate={format_float(float(value))}")
    rate = geometric_decay_rate(estimates)
    print(f"fitted_rate={format_float(rate)}")
    if args.out is not None:
        out = Path(args.out)
        lines = ["t,estimate"]
        lines.extend(f"{t},{format_float(float(v))}" for t, v in enumerate(estimates, 1))
        out.with_name(out.name + ".decay.csv").write_text("\n".join(lines) + "\n",
                                                          encoding="utf-8")
        if not args.no_plots:
            from . import plots

            plots.save_decay(estimates, rate, out.with_name(out.name + ".decay.png"))
    return 0


def _add_common_series_flags(parser, default_B=200) -> None:
    parser.add_argument("series", help="series file path")
    parser.add_argument("--space", choices=SPACE_CHOICES, default=None,
                        help="expected space tag (checked against the file)")
    parser.add_argument("--B", type=int, default=default_B,
                        help="number of permutations")
    parser.add_argument("--alpha", type=float, default=0.05)
    parser.add_argument("--seed", type=int, default=1234)
    parser.add_argument("--out", default=None,
                        help="directory for derived files (default: next to input)")
    parser.add_argument("--exact", action="store_true",
                        help="include the identity permutation in the p-value")
    parser.add_argument("--no-plots", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="geodar",
        description="Geodesic autoregression: simulation, estimation, dependence testing",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run an experiment grid to CSV")
    sim.add_argument("--space", choices=SPACE_CHOICES, required=True)
    sim.add_argument("--phi", type=_float_list,
                     default=(0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 1.0),
                     help="comma-separated concentration grid")
    sim.add_argument("--T", type=_int_list, default=(40, 80, 160, 320, 640),
                     help="comma-separated series-length grid")
    sim.add_argument("--reps", type=int, default=None,
                     help=f"replications per cell (default {DESK_REPS}, "
                          f"{PAPER_REPS} with --paper-scale)")
    sim.add_argument("--B", type=int, default=None,
                     help=f"permutations per test (default {DESK_PERMUTATIONS}, "
                          f"{PAPER_PERMUTATIONS} with --paper-scale)")
    sim.add_argument("--paper-scale", action="store_true",
                     help="full-scale defaults for reps and permutations")
    sim.add_argument("--alpha", type=float, default=0.05)
    sim.add_argument("--seed", type=int, default=1234)
    sim.add_argument("--sigma", type=float, default=0.25)
    sim.add_argument("--max-freq", type=int, default=4)
    sim.add_argument("--sigma-lower", type=float, default=0.5)
    sim.add_argument("--sigma-diag", type=float, default=0.2)
    sim.add_argument("--dim", type=int, default=10)
    sim.add_argument("--m", type=int, default=512, help="quantile grid size")
    sim.add_argument("--burn-in", type=int, default=100)
    sim.add_argument("--workers", type=int, default=1)
    sim.add_argument("--timing", action="store_true",
                     help="fill wall_ms with measured times (breaks byte reproducibility)")
    sim.add_argument("--no-plots", action="store_true")
    sim.add_argument("--out", required=True, help="output CSV path")
    sim.set_defaults(func=_cmd_simulate)

    fit_p = sub.add_parser("fit", help="fit mean and concentration on a series file")
    fit_p.add_argument("series")
    fit_p.add_argument("--space", choices=SPACE_CHOICES, default=None)
    fit_p.add_argument("--out", default=None)
    fit_p.add_argument("--no-plots", action="store_true")
    fit_p.set_defaults(func=_cmd_fit)

    test_p = sub.add_parser("test", help="permutation test for serial independence")
    _add_common_series_flags(test_p)
    test_p.add_argument("--variant", choices=VARIANT_CHOICES, default=VARIANT_DISTANCE)
    test_p.set_defaults(func=_cmd_test)

    ingest = sub.add_parser("ingest-sce", help="monthly belief CSV to a quantile series")
    ingest.add_argument("csv", help="CSV with header month,median_belief")
    ingest.add_argument("--m", type=int, default=512)
    ingest.add_argument("--out", required=True, help="output series path")
    ingest.set_defaults(func=_cmd_ingest_sce)

    analyze = sub.add_parser("analyze", help="fit, test and residual bundle")
    _add_common_series_flags(analyze)
    analyze.set_defaults(func=_cmd_analyze)

    diag = sub.add_parser("diagnose", help="coupled contraction decay estimates")
    diag.add_argument("--space", choices=SPACE_CHOICES, required=True)
    diag.add_argument("--phi", type=float, required=True)
    diag.add_argument("--alpha-moment", type=float, default=2.0)
    diag.add_argument("--t-max", type=int, default=5)
    diag.add_argument("--reps", type=int, default=10000)
    diag.add_argument("--seed", type=int, default=1234)
    diag.add_argument("--sigma", type=float, default=0.25)
    diag.add_argument("--max-freq", type=int, default=4)
    diag.add_argument("--sigma-lower", type=float, default=0.5)
    diag.add_argument("--sigma-diag", type=float, default=0.2)
    diag.add_argument("--dim", type=int, default=10)
    diag.add_argument("--m", type=int, default=512)
    diag.add_argument("--out", default=None, help="stem for decay CSV and figure")
    diag.add_argument("--no-plots", action="store_true")
    diag.set_defaults(func=_cmd_diagnose)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
