"""Command-line front end.

Four subcommands: `complexity` scores a dataset file end to end,
`benchmark` runs the synthetic Gaussian suite against the Bayes-error
oracle, `mds` draws the 2-D inter-class map from a stored report, and
`descriptors` computes the classical baselines only.

Exit codes: 0 success, 2 input error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import os
import sys
from datetime import datetime, timezone

from . import analysis
from .descriptors import compute_descriptors
from .errors import DataError, SpectralComplexityError
from .ingest import HyperParams, ReductionSpec, load_dataset
from .reduce import apply_reduction
from .report import (SCHEMA_VERSION, TOOL_VERSION, build_benchmark_report,
                     build_report, emit_benchmark_svg, emit_mds_svg,
                     emit_report, emit_spectrum_svg, matrix_from_report,
                     parse_report)
from .similarity import bray_curtis_symmetrize, build_similarity_matrix
from .spectral import build_laplacian, compute_scores, spectrum

_METRICS = ("cmsauls", "csg", "auls")


def _default_threads() -> int:
    raw = os.environ.get("SPECTRAL_COMPLEXITY_THREADS", "1")
    try:
        value = int(raw)
    except ValueError:
        raise DataError(
            f"SPECTRAL_COMPLEXITY_THREADS must be an integer, got {raw!r}"
        ) from None
    if value < 1:
        raise DataError(f"thread count must be >= 1, got {value}")
    return value


def _resolve_threads(args) -> int:
    if args.threads is not None:
        if args.threads < 1:
            raise DataError(f"thread count must be >= 1, got {args.threads}")
        return args.threads
    return _default_threads()


def _parse_metrics(text: str) -> tuple[str, ...]:
    names = tuple(part.strip() for part in text.split(",") if part.strip())
    if not names:
        raise DataError("no metrics selected")
    for name in names:
        if name not in _METRICS:
            raise DataError(
                f"unknown metric {name!r}; choose from {', '.join(_METRICS)}"
            )
    return names


def _parse_separations(text: str) -> tuple[float, ...]:
    try:
        values = tuple(float(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise DataError(f"invalid separation list: {text!r}") from None
    if not values:
        raise DataError("empty separation list")
    return values


def _now() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def _add_sampling_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--M", type=int, default=100,
                   help="Monte-Carlo queries per source class")
    p.add_argument("--E", type=int, default=100,
                   help="target samples per class pair")
    p.add_argument("--k", type=int, default=3, help="neighbour rank")
    p.add_argument("--seed", type=int, default=42, help="RNG seed")
    p.add_argument("--threads", type=int, default=None,
                   help="similarity worker threads "
                        "(default: $SPECTRAL_COMPLEXITY_THREADS or 1)")


def run_complexity(args) -> int:
    params = HyperParams(M=args.M, E=args.E, k=args.k, seed=args.seed,
                         reduction=ReductionSpec.parse(args.reduce))
    threads = _resolve_threads(args)
    metrics = _parse_metrics(args.metric)
    ds = load_dataset(args.input, label_column=args.label_col)
    emb = apply_reduction(ds, params)
    X = build_similarity_matrix(emb, params,
                                row_normalize=not args.no_row_normalize,
                                include_diagonal=not args.no_diagonal,
                                threads=threads)
    W = bray_curtis_symmetrize(X)
    L = build_laplacian(W)
    spec = spectrum(L)
    scores = compute_scores(spec)
    descriptors = compute_descriptors(emb) if args.descriptors else None
    # Raw float32 inputs are externally embedded features (the reduction
    # happened upstream), which the report records explicitly.
    external = args.input.endswith(".bin") and params.reduction.mode == "passthrough"
    report = build_report(
        dataset_path=args.input, ds=ds, emb=emb, params=params, X=X, W=W,
        L=L if args.store_laplacian else None, spec=spec, scores=scores,
        metrics=metrics, descriptors=descriptors,
        reduction_label="external" if external else None, threads=threads,
    )
    if args.out:
        emit_report(report, args.out)
    if args.spectrum_svg:
        emit_spectrum_svg(spec, args.spectrum_svg)
    print(f"seed={params.seed}")
    for name in metrics:
        print(f"{name}={report.scores[name]:.17g}")
    return 0


def run_benchmark(args) -> int:
    params = HyperParams(M=args.M, E=args.E, k=args.k, seed=args.seed)
    threads = _resolve_threads(args)
    separations = _parse_separations(args.separations)
    suite = analysis.gen_gaussian_suite(args.classes, args.dim, args.per_class,
                                        separations, args.seed,
                                        trials=args.trials)
    result = analysis.run_benchmark(suite, params,
                                    include_descriptors=args.descriptors,
                                    threads=threads)
    payload = build_benchmark_report(result, params, n_classes=args.classes,
                                     dim=args.dim, per_class=args.per_class,
                                     trials=args.trials)
    if args.out:
        emit_report(payload, args.out)
    if args.svg:
        emit_benchmark_svg(result, args.svg, metric=args.svg_metric)
    print(f"seed={params.seed}")
    for name, corr in result.correlations.items():
        print(f"{name}: r={corr.r:.6f} p={corr.p_value:.6f} "
              f"(m={corr.sample_count})")
    return 0


def run_mds(args) -> int:
    rep = parse_report(args.from_report)
    W = matrix_from_report(rep, "W")
    U = 1.0 - W
    chart = analysis.classical_mds(U)
    try:
        labels = list(rep["dataset"]["class_names"])
    except (KeyError, TypeError):
        labels = [str(i) for i in range(W.shape[0])]
    if len(labels) != W.shape[0]:
        labels = [str(i) for i in range(W.shape[0])]
    if args.svg:
        emit_mds_svg(chart, labels, args.svg)
    if args.out:
        emit_report({
            "schema": SCHEMA_VERSION,
            "tool_version": TOOL_VERSION,
            "created": _now(),
            "source_report": args.from_report,
            "labels": labels,
            "coordinates": [[float(x), float(y)]
                            for x, y in chart.coordinates],
            "stress": chart.stress,
        }, args.out)
    print(f"stress={chart.stress:.17g}")
    return 0


def run_descriptors(args) -> int:
    params = HyperParams(reduction=ReductionSpec.parse(args.reduce))
    ds = load_dataset(args.input, label_column=args.label_col)
    emb = apply_reduction(ds, params)
    desc = compute_descriptors(emb)
    values = {
        "f1": desc.f1, "f2": desc.f2, "f3": desc.f3, "n1": desc.n1,
        "n2": desc.n2, "n3": desc.n3, "t2": desc.t2,
        "n2_skipped": desc.n2_skipped,
    }
    if args.out:
        emit_report({
            "schema": SCHEMA_VERSION,
            "tool_version": TOOL_VERSION,
            "created": _now(),
            "dataset": {
                "path": args.input,
                "samples": ds.n_samples,
                "raw_dim": ds.n_features,
                "embedded_dim": emb.n_features,
                "classes": ds.n_classes,
            },
            "descriptors": values,
        }, args.out)
    for name in ("f1", "f2", "f3", "n1", "n2", "n3", "t2"):
        print(f"{name}={values[name]:.17g}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spectral-complexity",
        description="Score classification complexity of labeled datasets "
                    "from the Laplacian spectrum of an inter-class "
                    "similarity graph.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)
    fmt = argparse.ArgumentDefaultsHelpFormatter

    p = sub.add_parser("complexity", formatter_class=fmt,
                       help="score one dataset file")
    p.add_argument("--input", required=True,
                   help="CSV file, or .bin matrix with a JSON sidecar")
    p.add_argument("--label-col", default="label",
                   help="label column name (CSV input)")
    p.add_argument("--reduce", default="passthrough",
                   help="passthrough | pca:<d> | pca:rate=<r>")
    _add_sampling_flags(p)
    p.add_argument("--metric", default="cmsauls,csg,auls",
                   help="comma list of scores to emit")
    p.add_argument("--no-row-normalize", action="store_true",
                   help="skip row normalization of the similarity matrix")
    p.add_argument("--no-diagonal", action="store_true",
                   help="leave similarity self-pairs at zero")
    p.add_argument("--descriptors", action="store_true",
                   help="also compute the classical descriptor baselines")
    p.add_argument("--store-laplacian", action="store_true",
                   help="include L in the report matrices")
    p.add_argument("--out", default=None, help="report JSON path")
    p.add_argument("--spectrum-svg", default=None,
                   help="write an eigenvalue line plot here")
    p.set_defaults(func=run_complexity)

    p = sub.add_parser("benchmark", formatter_class=fmt,
                       help="synthetic Gaussian suite vs Bayes-error oracle")
    p.add_argument("--classes", type=int, default=10)
    p.add_argument("--dim", type=int, default=3)
    p.add_argument("--per-class", type=int, default=200)
    p.add_argument("--separations", default="8,5,3,2,1,0.5",
                   help="comma list of mean separations")
    p.add_argument("--trials", type=int, default=100_000,
                   help="oracle Monte-Carlo trials per dataset")
    _add_sampling_flags(p)
    p.add_argument("--descriptors", action="store_true",
                   help="also correlate the descriptor baselines")
    p.add_argument("--out", default=None, help="benchmark report JSON path")
    p.add_argument("--svg", default=None,
                   help="scatter plot of metric vs oracle error")
    p.add_argument("--svg-metric", default="cmsauls",
                   help="metric shown in the scatter plot")
    p.set_defaults(func=run_benchmark)

    p = sub.add_parser("mds", formatter_class=fmt,
                       help="2-D inter-class map from a stored report")
    p.add_argument("--from-report", required=True,
                   help="report JSON produced by the complexity subcommand")
    p.add_argument("--svg", default=None, help="scatter SVG path")
    p.add_argument("--out", default=None, help="coordinates JSON path")
    p.set_defaults(func=run_mds)

    p = sub.add_parser("descriptors", formatter_class=fmt,
                       help="classical complexity baselines only")
    p.add_argument("--input", required=True)
    p.add_argument("--label-col", default="label")
    p.add_argument("--reduce", default="passthrough")
    p.add_argument("--out", default=None, help="descriptor JSON path")
    p.set_defaults(func=run_descriptors)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SpectralComplexityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
