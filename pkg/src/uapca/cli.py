"""Command-line interface.

Three subcommands: ``project`` fits the model at one uncertainty scale and
writes the projected items, ``trace`` sweeps the scale and writes factor
traces plus eigenvalue curves, ``compare-sampling`` runs the convergence
experiment against the Monte-Carlo oracle.  Machine-readable results go to
files; stdout carries short human summaries.  Exit codes: 0 on success, 1
on input or validation failures, 2 on bad flags.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

from .cov import CovOptions, global_cov
from .eigen import eig_sym, select_components
from .io import (
    LABEL_COLUMN,
    DatasetFormatError,
    PointsData,
    aggregate_by_label,
    load_dataset,
    load_points,
    points_dataset,
    standardize_dataset,
    standardize_points,
    write_eigencurves_csv,
    write_experiment_csv,
    write_projection_csv,
    write_traces_csv,
)
from .metrics import (
    DEFAULT_SAMPLE_COUNTS,
    ExperimentConfig,
    run_convergence_experiment,
    samples_to_reach,
)
from .model import Gaussian
from .project import project_distribution
from .sensitivity import SweepSchedule, factor_traces, sweep
from .svg import render_eigencurves_svg, render_projection_svg, render_traces_svg


class UsageError(Exception):
    """A flag combination or flag value that cannot be honored."""


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _steps_value(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if v < 2:
        raise argparse.ArgumentTypeError(f"--steps needs at least 2 steps, got {v}")
    return v


def _scale_value(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number or 'inf', got {text!r}")
    if math.isnan(v) or v < 0.0:
        raise argparse.ArgumentTypeError(f"--scale must be >= 0 (or inf), got {text}")
    return v


def _dims_list(text: str) -> tuple[int, ...]:
    try:
        if ".." in text:
            lo_s, hi_s = text.split("..", 1)
            lo, hi = int(lo_s), int(hi_s)
            if lo < 1 or hi < lo:
                raise ValueError
            return tuple(range(lo, hi + 1))
        dims = tuple(int(p) for p in text.split(","))
        if not dims or any(d < 1 for d in dims):
            raise ValueError
        return dims
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"invalid dimension list {text!r}; use forms like 4 or 2..12 or 2,4,8,12"
        )


def _counts_list(text: str) -> tuple[int, ...]:
    try:
        counts = tuple(int(p) for p in text.split(","))
        if not counts or any(c < 1 for c in counts):
            raise ValueError
        return counts
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"invalid sample-count list {text!r}; use e.g. 16,64,256"
        )


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="uapca",
        description="Principal component analysis over probability distributions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("project", help="fit at one uncertainty scale and project the items")
    p.add_argument("--input", required=True, help="dataset JSON, or points CSV with --points")
    p.add_argument("--points", action="store_true", help="treat --input as a points CSV")
    p.add_argument("--aggregate-by", metavar="COLUMN",
                   help=f"fold points into per-class items by the trailing "
                        f"'{LABEL_COLUMN}' column (requires --points)")
    p.add_argument("--cluster-kind", choices=("gaussian", "empirical"), default="gaussian",
                   help="class summary used with --aggregate-by (default gaussian)")
    p.add_argument("--dims", type=_positive_int, default=2, metavar="Q",
                   help="number of components (default 2)")
    p.add_argument("--scale", type=_scale_value, default=1.0, metavar="S",
                   help="uncertainty scaling factor; 0 gives plain PCA on the means, "
                        "inf the uncertainty-limit subspace with item ellipses unscaled "
                        "(default 1)")
    p.add_argument("--standardize", action="store_true",
                   help="z-score axes before fitting")
    p.add_argument("--out-prefix", required=True, metavar="P",
                   help="writes P.projection.csv and, for --dims 2, P.projection.svg")
    p.set_defaults(func=_cmd_project)

    t = sub.add_parser("trace", help="sweep the uncertainty scale and write factor traces")
    t.add_argument("--input", required=True, help="dataset JSON")
    t.add_argument("--steps", type=_steps_value, default=64, metavar="N",
                   help="sweep steps over s in [0, inf] (default 64)")
    t.add_argument("--dims", type=_positive_int, default=2, metavar="Q",
                   help="number of components; the trace plot requires 2 (default 2)")
    t.add_argument("--out-prefix", required=True, metavar="P",
                   help="writes P.traces.csv, P.eigvals.csv, P.traces.svg, P.eigvals.svg")
    t.set_defaults(func=_cmd_trace)

    c = sub.add_parser("compare-sampling",
                       help="convergence of sampled PCA toward the closed form")
    c.add_argument("--dims", type=_dims_list, default=tuple(range(2, 13)), metavar="SPEC",
                   help="dimensions to test, e.g. 2..12 or 2,4,8,12 (default 2..12)")
    c.add_argument("--runs", type=_positive_int, default=40, metavar="N",
                   help="sampling runs per cell; the median is reported (default 40)")
    c.add_argument("--seed", type=int, default=0, metavar="S",
                   help="experiment seed (default 0; UAPCA_SEED overrides)")
    c.add_argument("--samples", type=_counts_list, default=None, metavar="LIST",
                   help="per-item sample counts, strictly increasing (default 16,64,256,1024,4096)")
    c.add_argument("--items", type=_positive_int, default=10, metavar="N",
                   help="items per synthetic dataset (default 10)")
    c.add_argument("--out", required=True, metavar="FILE", help="output CSV path")
    c.set_defaults(func=_cmd_compare_sampling)
    return parser


def _write_text(path: str, content: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(content)


def _cmd_project(args) -> int:
    if args.points:
        pts = load_points(args.input)
        if args.standardize:
            pts = PointsData(
                points=standardize_points(pts.points),
                dim_names=pts.dim_names,
                labels=pts.labels,
            )
        if args.aggregate_by is not None:
            if args.aggregate_by != LABEL_COLUMN:
                raise UsageError(
                    f"--aggregate-by supports only the trailing "
                    f"'{LABEL_COLUMN}' column, got {args.aggregate_by!r}"
                )
            ds = aggregate_by_label(pts, kind=args.cluster_kind)
        else:
            ds = points_dataset(pts)
    else:
        if args.aggregate_by is not None:
            raise UsageError("--aggregate-by requires --points")
        ds = load_dataset(args.input)
        if args.standardize:
            ds = standardize_dataset(ds)

    if not 1 <= args.dims <= ds.dim:
        raise UsageError(
            f"--dims {args.dims} out of range for {ds.dim}-dimensional data "
            f"(need 1 <= Q <= {ds.dim})"
        )

    s = args.scale
    g = global_cov(ds, CovOptions(scale_s=s))
    pairs = eig_sym(g.matrix)
    model = select_components(pairs, g.mean, args.dims)

    labels = (
        list(ds.labels) if ds.labels is not None
        else [f"item{i + 1}" for i in range(len(ds))]
    )
    cov_scale = 1.0 if math.isinf(s) else s * s
    projected = []
    for item in ds.items:
        image = project_distribution(model, item)
        projected.append(Gaussian(image.mean(), image.cov() * cov_scale))

    csv_path = f"{args.out_prefix}.projection.csv"
    write_projection_csv(csv_path, labels, projected)
    written = [csv_path]
    if args.dims == 2:
        svg_path = f"{args.out_prefix}.projection.svg"
        _write_text(svg_path, render_projection_svg(list(zip(projected, labels))))
        written.append(svg_path)
    print("eigenvalues: " + " ".join(repr(float(v)) for v in pairs.values))
    print("wrote " + ", ".join(written))
    return 0


def _cmd_trace(args) -> int:
    if args.dims != 2:
        raise UsageError("the trace plot is two-dimensional; use --dims 2")
    ds = load_dataset(args.input)
    if ds.dim < 2:
        raise UsageError(f"--dims 2 out of range for {ds.dim}-dimensional data")
    schedule = SweepSchedule(args.steps)
    models, curves = sweep(ds, 2, schedule)
    traces = factor_traces(models, schedule)

    paths = {
        "traces_csv": f"{args.out_prefix}.traces.csv",
        "eigvals_csv": f"{args.out_prefix}.eigvals.csv",
        "traces_svg": f"{args.out_prefix}.traces.svg",
        "eigvals_svg": f"{args.out_prefix}.eigvals.svg",
    }
    write_traces_csv(paths["traces_csv"], traces, schedule, ds.dim_names)
    write_eigencurves_csv(paths["eigvals_csv"], curves)
    _write_text(paths["traces_svg"], render_traces_svg(traces, ds.dim_names))
    _write_text(paths["eigvals_svg"], render_eigencurves_svg(curves))

    if curves.avoided_crossing_flags:
        for step, pair in curves.avoided_crossing_flags:
            s_here = curves.s_values[step]
            print(
                f"avoided crossing flagged between components {pair + 1} and "
                f"{pair + 2} near s={s_here:.4g} (step {step})"
            )
    else:
        print("no avoided crossings flagged")
    print("wrote " + ", ".join(paths.values()))
    return 0


def _cmd_compare_sampling(args) -> int:
    seed = args.seed
    raw_env = os.environ.get("UAPCA_SEED")
    if raw_env is not None:
        try:
            seed = int(raw_env)
        except ValueError:
            raise UsageError(f"UAPCA_SEED must be an integer, got {raw_env!r}")
    try:
        cfg = ExperimentConfig(
            dims=args.dims,
            sample_counts=args.samples if args.samples is not None else DEFAULT_SAMPLE_COUNTS,
            n_items=args.items,
            runs=args.runs,
            rng_seed=seed,
        )
    except ValueError as exc:
        raise UsageError(str(exc))
    rows = run_convergence_experiment(cfg)
    write_experiment_csv(args.out, rows)
    for dim in cfg.dims:
        needed = samples_to_reach(rows, dim)
        if needed is None:
            print(f"dim {dim}: median Hellinger never fell below 0.1")
        else:
            print(f"dim {dim}: median Hellinger < 0.1 from {needed} samples per item")
    print(f"wrote {args.out}")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"uapca: error: {exc}", file=sys.stderr)
        return 2
    except (DatasetFormatError, OSError, ValueError) as exc:
        print(f"uapca: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
