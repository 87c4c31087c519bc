import json
import xml.dom.minidom

import numpy as np
import pytest

from spectral_complexity import (BenchmarkResult, CorrelationResult,
                                 DataError, HyperParams, InterClassMap,
                                 NumericError, apply_reduction, benchmark_svg,
                                 bray_curtis_symmetrize, build_laplacian,
                                 build_report, build_similarity_matrix,
                                 compute_descriptors, compute_scores,
                                 emit_report, load_csv, matrix_from_report,
                                 mds_svg, parse_report, serialize, spectrum)
from spectral_complexity.report import _format_float

from conftest import make_blobs


def pipeline_report(blob_csv, **kwargs):
    ds = load_csv(str(blob_csv))
    params = HyperParams(M=20, E=20, k=3, seed=3)
    emb = apply_reduction(ds, params)
    X = build_similarity_matrix(emb, params)
    W = bray_curtis_symmetrize(X)
    L = build_laplacian(W)
    spec = spectrum(L)
    return build_report(
        dataset_path=str(blob_csv), ds=ds, emb=emb, params=params, X=X,
        W=W, L=L, spec=spec, scores=compute_scores(spec),
        created="2026-01-01T00:00:00Z", **kwargs)


class TestFloatFormat:
    def test_plain_value_keeps_all_digits(self):
        assert _format_float(0.144) == "0.14399999999999999"
        assert float(_format_float(0.144)) == 0.144

    def test_zero_collapses_sign(self):
        assert _format_float(0.0) == "0"
        assert _format_float(-0.0) == "0"

    def test_infinities_become_strings(self):
        assert _format_float(np.inf) == '"inf"'
        assert _format_float(-np.inf) == '"-inf"'

    def test_nan_rejected(self):
        with pytest.raises(NumericError, match="NaN"):
            _format_float(float("nan"))


class TestSerialize:
    def test_round_trip_is_byte_identical(self):
        payload = {
            "schema": 1,
            "values": [0.1, 2.5e-300, 1e300, 0.0, -0.0],
            "edge": {"big": np.inf, "small": -np.inf, "flag": True,
                     "none": None, "name": "x y\nz"},
            "empty_list": [],
            "empty_dict": {},
            "nested": [[1.0, 2.0], [3.0, 4.0]],
        }
        text = serialize(payload)
        again = serialize(json.loads(text))
        assert text == again

    def test_scalar_lists_stay_on_one_line(self):
        text = serialize({"xs": [1.0, 2.0, 3.0]})
        assert '"xs": [1, 2, 3]' in text

    def test_matrix_rows_get_their_own_lines(self):
        text = serialize({"m": [[1.0, 2.0], [3.0, 4.0]]})
        assert "[\n" in text

    def test_unserializable_type_rejected(self):
        with pytest.raises(DataError, match="cannot serialize"):
            serialize({"bad": {1, 2}})

    def test_deterministic(self):
        payload = {"a": 0.3333333333333333, "b": [1, 2, 3]}
        assert serialize(payload) == serialize(payload)


class TestReportRoundTrip:
    def test_pipeline_report_round_trips(self, blob_csv, tmp_path):
        rep = pipeline_report(blob_csv)
        path = tmp_path / "report.json"
        emit_report(rep, str(path))
        parsed = parse_report(str(path))
        emit_report(parsed, str(tmp_path / "second.json"))
        assert path.read_bytes() == (tmp_path / "second.json").read_bytes()

    def test_key_order(self, blob_csv, tmp_path):
        rep = pipeline_report(blob_csv)
        path = tmp_path / "report.json"
        emit_report(rep, str(path))
        parsed = parse_report(str(path))
        assert list(parsed) == [
            "schema", "tool_version", "created", "dataset", "params",
            "reduction", "matrices", "spectrum", "scores", "descriptors",
            "diagnostics",
        ]
        assert parsed["schema"] == 1

    def test_scores_recomputable_from_stored_spectrum(self, blob_csv,
                                                      tmp_path):
        from spectral_complexity import Spectrum, auls, cmsauls, csg
        rep = pipeline_report(blob_csv)
        path = tmp_path / "report.json"
        emit_report(rep, str(path))
        parsed = parse_report(str(path))
        s = Spectrum(eigenvalues=np.array(parsed["spectrum"]))
        assert cmsauls(s) == parsed["scores"]["cmsauls"]
        assert csg(s) == parsed["scores"]["csg"]
        assert auls(s) == parsed["scores"]["auls"]

    def test_matrices_recoverable_exactly(self, blob_csv, tmp_path):
        ds = load_csv(str(blob_csv))
        params = HyperParams(M=20, E=20, k=3, seed=3)
        emb = apply_reduction(ds, params)
        X = build_similarity_matrix(emb, params)
        W = bray_curtis_symmetrize(X)
        rep = pipeline_report(blob_csv)
        path = tmp_path / "report.json"
        emit_report(rep, str(path))
        parsed = parse_report(str(path))
        assert np.array_equal(matrix_from_report(parsed, "X"), X.values)
        assert np.array_equal(matrix_from_report(parsed, "W"), W.values)
        assert matrix_from_report(parsed, "L").shape == (3, 3)

    def test_descriptor_block_included_when_passed(self, blob_csv, tmp_path):
        ds = load_csv(str(blob_csv))
        params = HyperParams(M=20, E=20, k=3, seed=3)
        emb = apply_reduction(ds, params)
        rep = pipeline_report(blob_csv,
                              descriptors=compute_descriptors(emb))
        path = tmp_path / "report.json"
        emit_report(rep, str(path))
        parsed = parse_report(str(path))
        assert parsed["descriptors"]["t2"] == 60.0
        assert parsed["descriptors"]["n2_skipped"] == 0

    def test_inf_strings_map_back_to_floats(self):
        rep = {"matrices": {"Z": [[0.0, "inf"], ["-inf", 1.0]]}}
        Z = matrix_from_report(rep, "Z")
        assert Z[0, 1] == np.inf and Z[1, 0] == -np.inf

    def test_missing_matrix_rejected(self):
        with pytest.raises(DataError, match="no matrix"):
            matrix_from_report({"matrices": {}}, "W")

    def test_missing_file_rejected(self, tmp_path):
        with pytest.raises(DataError, match="cannot read"):
            parse_report(str(tmp_path / "absent.json"))

    def test_unwritable_path_rejected(self, tmp_path):
        with pytest.raises(DataError, match="cannot write"):
            emit_report({"schema": 1}, str(tmp_path / "no/dir/report.json"))


class TestSvgOutputs:
    def test_mds_svg_labels_every_class(self):
        m = InterClassMap(
            coordinates=np.array([[1.0, 0.5], [-1.0, 0.5], [0.0, -1.0]]),
            stress=0.0)
        svg = mds_svg(m, ["ship & boat", "car<truck>", "plane"])
        doc = xml.dom.minidom.parseString(svg)
        texts = ["".join(c.data for c in t.childNodes)
                 for t in doc.getElementsByTagName("text")]
        assert texts == ["ship & boat", "car<truck>", "plane"]
        assert len(doc.getElementsByTagName("circle")) == 3

    def test_mds_svg_label_count_mismatch(self):
        m = InterClassMap(coordinates=np.zeros((2, 2)), stress=0.0)
        with pytest.raises(DataError, match="labels for"):
            mds_svg(m, ["only-one"])

    def test_benchmark_svg_marks_separations(self):
        result = BenchmarkResult(
            separations=(8.0, 2.0, 0.5),
            oracle_errors=(0.01, 0.2, 0.4),
            oracle_stderrs=(0.001, 0.002, 0.003),
            metric_values={"cmsauls": (0.1, 0.9, 2.0)},
            correlations={"cmsauls": CorrelationResult(r=0.99, p_value=0.01,
                                                       sample_count=3)},
        )
        svg = benchmark_svg(result)
        xml.dom.minidom.parseString(svg)
        for tag in ("s=8", "s=2", "s=0.5"):
            assert tag in svg

    def test_benchmark_svg_unknown_metric(self):
        result = BenchmarkResult(
            separations=(1.0, 2.0, 3.0), oracle_errors=(0.1, 0.2, 0.3),
            oracle_stderrs=(0.0, 0.0, 0.0),
            metric_values={"cmsauls": (1.0, 2.0, 3.0)}, correlations={})
        with pytest.raises(DataError, match="no metric"):
            benchmark_svg(result, metric="does-not-exist")


class TestBenchmarkReport:
    def test_structure_and_round_trip(self, tmp_path):
        from spectral_complexity import (build_benchmark_report,
                                         gen_gaussian_suite, run_benchmark)
        suite = gen_gaussian_suite(2, 1, 10, (6.0, 1.0, 0.2), seed=1,
                                   trials=10_000)
        params = HyperParams(M=10, E=10, k=2, seed=1)
        result = run_benchmark(suite, params)
        payload = build_benchmark_report(result, params, n_classes=2, dim=1,
                                         per_class=10, trials=10_000,
                                         created="2026-01-01T00:00:00Z")
        assert list(payload) == ["schema", "tool_version", "created",
                                 "config", "oracle", "metrics",
                                 "correlations", "skipped_metrics"]
        path = tmp_path / "bench.json"
        emit_report(payload, str(path))
        parsed = parse_report(str(path))
        emit_report(parsed, str(tmp_path / "again.json"))
        assert path.read_bytes() == (tmp_path / "again.json").read_bytes()
