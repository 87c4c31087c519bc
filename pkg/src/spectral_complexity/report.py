"""Report assembly, JSON serialization, and SVG emission.

The JSON writer is hand-rolled for one reason: determinism. Floats are
written with 17 significant digits (lossless for float64), +/-inf
become the strings "inf"/"-inf" since JSON has no infinity literal, any
exact zero is written as 0, and keys keep insertion order. Under those
rules serialize -> parse -> serialize is byte-identical, which the test
suite relies on.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from datetime import datetime, timezone
from xml.sax.saxutils import escape

import numpy as np

from .analysis import BenchmarkResult, InterClassMap
from .descriptors import DescriptorReport
from .errors import DataError, NumericError
from .ingest import HyperParams, LabeledDataset
from .reduce import EmbeddedDataset
from .similarity import ClassSimilarityMatrix, SymmetricAffinity
from .spectral import ComplexityScores, Laplacian, Spectrum, spectrum_svg

TOOL_VERSION = "0.1.0"
SCHEMA_VERSION = 1

# Emitted under diagnostics so every score can be recomputed from the
# stored spectrum without consulting the source code.
DEFINITIONS = {
    "cmsauls": "sum of cummax of (lam[i+1]^2 - lam[i]^2) / (2 (n - i))",
    "csg": "sum of cummax of (lam[i+1] - lam[i]) / (n - i)",
    "auls": "sum of (lam[i] + lam[i+1]) / 2",
}


@dataclass(frozen=True)
class ComplexityReport:
    """Everything one run produced, ready for serialization."""

    dataset_meta: dict
    params: dict
    reduction: dict
    matrices: dict
    spectrum: tuple[float, ...]
    scores: dict
    descriptors: dict | None
    diagnostics: dict
    tool_version: str = TOOL_VERSION
    created: str = ""
    schema: int = SCHEMA_VERSION

    def to_dict(self) -> dict:
        return {
            "schema": self.schema,
            "tool_version": self.tool_version,
            "created": self.created,
            "dataset": self.dataset_meta,
            "params": self.params,
            "reduction": self.reduction,
            "matrices": self.matrices,
            "spectrum": list(self.spectrum),
            "scores": self.scores,
            "descriptors": self.descriptors,
            "diagnostics": self.diagnostics,
        }


def _format_float(v: float) -> str:
    if v != v:
        raise NumericError("NaN cannot be serialized")
    if v == np.inf:
        return '"inf"'
    if v == -np.inf:
        return '"-inf"'
    if v == 0.0:
        # Collapse -0.0: "%.17g" would print "-0", which json parses as
        # int 0 and would re-serialize differently.
        return "0"
    return "%.17g" % v


def _is_scalar(v) -> bool:
    return not isinstance(v, (dict, list, tuple))


def _dump(obj, indent: int = 0) -> str:
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        parts = [
            f"{inner}{json.dumps(str(k))}: {_dump(v, indent + 1)}"
            for k, v in obj.items()
        ]
        return "{\n" + ",\n".join(parts) + f"\n{pad}}}"
    if isinstance(obj, (list, tuple)):
        items = list(obj)
        if not items:
            return "[]"
        if all(_is_scalar(v) for v in items):
            return "[" + ", ".join(_dump(v, indent) for v in items) + "]"
        parts = [f"{inner}{_dump(v, indent + 1)}" for v in items]
        return "[\n" + ",\n".join(parts) + f"\n{pad}]"
    if isinstance(obj, str):
        return json.dumps(obj)
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _format_float(float(obj))
    raise DataError(f"cannot serialize value of type {type(obj).__name__}")


def serialize(payload: dict) -> str:
    return _dump(payload) + "\n"


def emit_report(report: ComplexityReport | dict, path: str) -> None:
    """Write a report as deterministic pretty-printed JSON."""
    payload = report.to_dict() if isinstance(report, ComplexityReport) else report
    text = serialize(payload)
    try:
        with open(path, "w") as fh:
            fh.write(text)
    except OSError as exc:
        raise DataError(f"cannot write {path}: {exc}") from None


def parse_report(path: str) -> dict:
    try:
        with open(path, "r") as fh:
            return json.load(fh)
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: invalid JSON: {exc}") from None


def matrix_from_report(rep: dict, name: str) -> np.ndarray:
    """Recover a stored matrix, mapping "inf"/"-inf" strings back to floats."""
    try:
        rows = rep["matrices"][name]
    except (KeyError, TypeError):
        raise DataError(f"report has no matrix {name!r}") from None
    return np.array([[float(v) for v in row] for row in rows], dtype=np.float64)


def _matrix_payload(values: np.ndarray) -> list[list[float]]:
    return [[float(v) for v in row] for row in values]


def build_report(*, dataset_path: str, ds: LabeledDataset, emb: EmbeddedDataset,
                 params: HyperParams, X: ClassSimilarityMatrix,
                 W: SymmetricAffinity, L: Laplacian | None,
                 spec: Spectrum, scores: ComplexityScores,
                 metrics: tuple[str, ...] = ("cmsauls", "csg", "auls"),
                 descriptors: DescriptorReport | None = None,
                 reduction_label: str | None = None,
                 threads: int = 1, created: str | None = None,
                 ) -> ComplexityReport:
    """Assemble the full run report from the pipeline stages."""
    if created is None:
        created = datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
    dataset_meta = {
        "path": dataset_path,
        "samples": ds.n_samples,
        "raw_dim": ds.n_features,
        "embedded_dim": emb.n_features,
        "classes": ds.n_classes,
        "class_names": list(ds.class_names),
    }
    params_dict = {
        "M": params.M,
        "E": params.E,
        "k": params.k,
        "seed": params.seed,
        "reduction": (reduction_label if reduction_label is not None
                      else params.reduction.describe()),
        "row_normalize": X.row_normalized,
        "include_diagonal": X.includes_diagonal,
        "threads": threads,
        "metrics": list(metrics),
    }
    reduction = {
        "method": (reduction_label if reduction_label is not None
                   else emb.meta.method),
        "d": emb.meta.d,
        "explained_variance_ratio": list(emb.meta.explained_variance_ratio),
    }
    matrices = {"X": _matrix_payload(X.values), "W": _matrix_payload(W.values)}
    if L is not None:
        matrices["L"] = _matrix_payload(L.values)
    scores_dict = {m: getattr(scores, m) for m in metrics}
    desc_dict = None
    if descriptors is not None:
        desc_dict = {
            "f1": descriptors.f1, "f2": descriptors.f2, "f3": descriptors.f3,
            "n1": descriptors.n1, "n2": descriptors.n2, "n3": descriptors.n3,
            "t2": descriptors.t2, "n2_skipped": descriptors.n2_skipped,
        }
    diag = X.diagnostics
    diagnostics = {
        "degenerate_densities": diag.degenerate_densities,
        "replacement_pairs": [list(p) for p in diag.replacement_pairs],
        "zero_mass_rows": list(diag.zero_mass_rows),
        "zero_denominator_pairs": [list(p) for p in diag.zero_denominator_pairs],
        "definitions": dict(DEFINITIONS),
    }
    return ComplexityReport(
        dataset_meta=dataset_meta, params=params_dict, reduction=reduction,
        matrices=matrices, spectrum=tuple(float(v) for v in spec.eigenvalues),
        scores=scores_dict, descriptors=desc_dict, diagnostics=diagnostics,
        created=created,
    )


def build_benchmark_report(result: BenchmarkResult, params: HyperParams, *,
                           n_classes: int, dim: int, per_class: int,
                           trials: int, created: str | None = None) -> dict:
    if created is None:
        created = datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
    return {
        "schema": SCHEMA_VERSION,
        "tool_version": TOOL_VERSION,
        "created": created,
        "config": {
            "classes": n_classes,
            "dim": dim,
            "per_class": per_class,
            "separations": list(result.separations),
            "trials": trials,
            "M": params.M,
            "E": params.E,
            "k": params.k,
            "seed": params.seed,
        },
        "oracle": {
            "errors": list(result.oracle_errors),
            "stderrs": list(result.oracle_stderrs),
        },
        "metrics": {k: list(v) for k, v in result.metric_values.items()},
        "correlations": {
            name: {"r": c.r, "p_value": c.p_value,
                   "sample_count": c.sample_count}
            for name, c in result.correlations.items()
        },
        "skipped_metrics": list(result.skipped_metrics),
    }


def emit_spectrum_svg(s: Spectrum, path: str) -> None:
    try:
        with open(path, "w") as fh:
            fh.write(spectrum_svg(s))
    except OSError as exc:
        raise DataError(f"cannot write {path}: {exc}") from None


def mds_svg(m: InterClassMap, labels, width: int = 480,
            height: int = 420) -> str:
    """Labeled scatter of class coordinates, symmetric about the origin."""
    coords = m.coordinates
    names = [str(v) for v in labels]
    if len(names) != coords.shape[0]:
        raise DataError(
            f"{len(names)} labels for {coords.shape[0]} points"
        )
    radius = float(np.abs(coords).max())
    if radius == 0.0:
        radius = 1.0
    radius *= 1.2
    margin = 30
    span = min(width, height) - 2 * margin

    def px(v: float) -> float:
        return width / 2 + (v / radius) * (span / 2)

    def py(v: float) -> float:
        return height / 2 - (v / radius) * (span / 2)

    marks = []
    for (x, y), name in zip(coords, names):
        marks.append(
            f'<circle cx="{px(x):.2f}" cy="{py(y):.2f}" r="5" fill="#d62728"/>'
            f'<text x="{px(x) + 8:.2f}" y="{py(y) - 8:.2f}" font-size="12">'
            f"{escape(name)}</text>"
        )
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">'
        f'<rect width="{width}" height="{height}" fill="white"/>'
        f'<line x1="{width / 2}" y1="{margin}" x2="{width / 2}" '
        f'y2="{height - margin}" stroke="#ccc"/>'
        f'<line x1="{margin}" y1="{height / 2}" x2="{width - margin}" '
        f'y2="{height / 2}" stroke="#ccc"/>'
        f"{''.join(marks)}"
        f"</svg>"
    )


def emit_mds_svg(m: InterClassMap, labels, path: str) -> None:
    try:
        with open(path, "w") as fh:
            fh.write(mds_svg(m, labels))
    except OSError as exc:
        raise DataError(f"cannot write {path}: {exc}") from None


def benchmark_svg(result: BenchmarkResult, metric: str = "cmsauls",
                  width: int = 480, height: int = 360) -> str:
    """Scatter of oracle error (x) against one metric (y)."""
    if metric not in result.metric_values:
        raise DataError(f"benchmark has no metric {metric!r}")
    xs = np.asarray(result.oracle_errors)
    ys = np.asarray(result.metric_values[metric])
    left, right, top, bottom = 55, 15, 20, 40
    x_max = float(xs.max()) if xs.max() > 0 else 1.0
    y_max = float(ys.max()) if ys.max() > 0 else 1.0

    def px(v: float) -> float:
        return left + (v / x_max) * (width - left - right)

    def py(v: float) -> float:
        return top + (1.0 - v / y_max) * (height - top - bottom)

    marks = "".join(
        f'<circle cx="{px(float(x)):.2f}" cy="{py(float(y)):.2f}" r="4" '
        f'fill="#1f77b4"/>'
        f'<text x="{px(float(x)) + 6:.2f}" y="{py(float(y)) - 6:.2f}" '
        f'font-size="10">s={s:g}</text>'
        for x, y, s in zip(xs, ys, result.separations)
    )
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">'
        f'<rect width="{width}" height="{height}" fill="white"/>'
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{height - bottom}" '
        f'stroke="#333"/>'
        f'<line x1="{left}" y1="{height - bottom}" x2="{width - right}" '
        f'y2="{height - bottom}" stroke="#333"/>'
        f'<text x="{(left + width - right) / 2:.0f}" y="{height - 8}" '
        f'text-anchor="middle" font-size="12">oracle error</text>'
        f'<text x="14" y="{(top + height - bottom) / 2:.0f}" font-size="12" '
        f'transform="rotate(-90 14 {(top + height - bottom) / 2:.0f})" '
        f'text-anchor="middle">{escape(metric)}</text>'
        f"{marks}"
        f"</svg>"
    )


def emit_benchmark_svg(result: BenchmarkResult, path: str,
                       metric: str = "cmsauls") -> None:
    try:
        with open(path, "w") as fh:
            fh.write(benchmark_svg(result, metric))
    except OSError as exc:
        raise DataError(f"cannot write {path}: {exc}") from None
