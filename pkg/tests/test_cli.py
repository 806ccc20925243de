import json

from spectraljet.cli import main
from spectraljet.reporting import fmt_float, json_dumps


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestWickCommand:
    def test_one_third(self, capsys):
        code, out, _ = run(capsys, "wick", "--alpha", "1,1", "--beta", "2,2", "--n", "2")
        assert code == 0
        assert out.splitlines()[0] == "A=+1 B=1/3 (0.33333333333333331)"

    def test_zero_pair(self, capsys):
        code, out, _ = run(capsys, "wick", "--alpha", "1", "--beta", "2", "--n", "2")
        assert code == 0
        assert out.splitlines()[0] == "A=0 B=0 (0)"

    def test_surd_display(self, capsys):
        code, out, _ = run(capsys, "wick", "--alpha", "1,1,1", "--beta", "1", "--n", "1")
        assert code == 0
        assert out.startswith("A=-3 B=-sqrt(3/5)")

    def test_graphs_and_oracle(self, capsys):
        code, out, _ = run(
            capsys, "wick", "--alpha", "1,1", "--beta", "1,1", "--n", "1",
            "--graphs", "--oracle",
        )
        assert code == 0
        lines = out.splitlines()
        assert lines[1] == "graphs: count=3 sign=+1"
        assert lines[2].startswith("oracle: 3")

    def test_missing_n(self, capsys):
        code, _, err = run(capsys, "wick", "--alpha", "1")
        assert code == 2
        assert "error" in err


class TestVerifyCommand:
    def test_circle_passes(self, tmp_path, capsys):
        csv_path = tmp_path / "records.csv"
        json_path = tmp_path / "summary.json"
        code, out, _ = run(
            capsys, "verify", "--model", "circle", "--max-degree", "6",
            "--t", "0.01", "--out", str(csv_path), "--out-json", str(json_path),
        )
        assert code == 0
        assert "passed=True" in out
        text = csv_path.read_text()
        assert text.startswith("model,alpha,beta,t,raw,normalized,target,abs_err\n")
        doc = json.loads(json_path.read_text())
        assert doc["passed"] is True
        assert doc["config"]["max_degree"] == 6
        assert doc["suites"]["jet_relation"]
        entry = doc["suites"]["jet_relation"]['A[1,1|1,1]']
        assert entry["pass"] is True
        assert entry["target"] == 3.0

    def test_tolerance_failure_exit_code(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"tolerances": {"flat_jet_abs": 1e-30}}))
        code, out, _ = run(
            capsys, "verify", "--model", "circle", "--max-degree", "2",
            "--t", "0.01", "--config", str(cfg),
        )
        assert code == 1
        assert "passed=False" in out

    def test_usage_error(self, capsys):
        code, _, _ = run(capsys, "verify", "--model", "banana")
        assert code == 2

    def test_missing_model(self, capsys):
        code, _, err = run(capsys, "verify", "--t", "0.01")
        assert code == 2
        assert "no model" in err

    def test_config_file_roundtrip(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({
            "model": {"kind": "torus", "radii": [1.0, 1.3]},
            "t": 0.01,
            "max_degree": 2,
        }))
        json_path = tmp_path / "out.json"
        code, _, _ = run(capsys, "verify", "--config", str(cfg),
                         "--out-json", str(json_path))
        assert code == 0
        doc = json.loads(json_path.read_text())
        assert doc["config"]["model"]["kind"] == "torus"
        assert doc["config"]["t"] == 0.01


class TestLatticeCommand:
    def test_sample_run(self, tmp_path, capsys):
        out_csv = tmp_path / "lat.csv"
        code, out, _ = run(
            capsys, "lattice", "sample", "--n", "3", "--max-degree", "8",
            "--count", "300", "--seed", "42", "--out", str(out_csv),
        )
        assert code == 0
        lines = out_csv.read_text().splitlines()
        assert lines[0] == (
            "alpha,beta,gamma,d_ab,d_bc,d_ac,triangle_slack,"
            "comparison_lhs,comparison_rhs"
        )
        assert len(lines) == 301

    def test_determinism(self, tmp_path, capsys):
        paths = []
        for tag in ("a", "b"):
            out_csv = tmp_path / f"lat_{tag}.csv"
            out_json = tmp_path / f"lat_{tag}.json"
            code, _, _ = run(
                capsys, "lattice", "sample", "--n", "2", "--max-degree", "6",
                "--count", "200", "--seed", "7",
                "--out", str(out_csv), "--out-json", str(out_json),
            )
            assert code == 0
            paths.append((out_csv.read_bytes(), out_json.read_bytes()))
        assert paths[0] == paths[1]


class TestCurvatureCommand:
    def test_all_models_serialize_and_pass(self, tmp_path, capsys):
        # flat and curved models exercise every suite branch of the JSON writer
        for argv in (
            ["curvature", "--model", "circle"],
            ["curvature", "--model", "torus", "--radii", "1.0,1.3"],
            ["curvature", "--model", "sphere3"],
        ):
            out_json = tmp_path / (argv[2] + ".json")
            code, out, _ = run(capsys, *argv, "--out-json", str(out_json))
            assert code == 0, argv
            doc = json.loads(out_json.read_text())
            assert doc["passed"] is True
            assert "scalar" in doc["suites"]
            if argv[2] == "circle":
                assert "curvature" not in doc["suites"]
            else:
                assert "curvature" in doc["suites"]


class TestReportCommand:
    def test_merge_and_propagate_failure(self, tmp_path, capsys):
        good = tmp_path / "good.json"
        good.write_text(json_dumps({"passed": True, "suites": {}}))
        bad = tmp_path / "bad.json"
        bad.write_text(json_dumps({"passed": True, "suites": {"x": {"pass": False}}}))
        merged = tmp_path / "merged.json"
        code, _, _ = run(capsys, "report", "--inputs", str(good), "--out", str(merged))
        assert code == 0
        assert json.loads(merged.read_text())["passed"] is True
        code, _, _ = run(
            capsys, "report", "--inputs", str(good), str(bad), "--out", str(merged)
        )
        assert code == 1
        assert json.loads(merged.read_text())["passed"] is False


class TestVerifyDeterminism:
    def test_sphere_verify_byte_identical(self, tmp_path, capsys):
        blobs = []
        for tag in ("a", "b"):
            csv_path = tmp_path / f"rec_{tag}.csv"
            json_path = tmp_path / f"sum_{tag}.json"
            code, _, _ = run(
                capsys, "verify", "--model", "sphere3", "--max-degree", "2",
                "--t-grid", "0.1:0.5:5", "--out", str(csv_path),
                "--out-json", str(json_path),
            )
            assert code == 0
            blobs.append((csv_path.read_bytes(), json_path.read_bytes()))
        assert blobs[0] == blobs[1]


class TestSerialization:
    def test_fmt_float_17_digits(self):
        assert fmt_float(1 / 3) == "0.33333333333333331"
        assert fmt_float(1.0) == "1"
        assert float(fmt_float(0.1)) == 0.1

    def test_json_sorted_and_stable(self):
        doc = {"b": [1.0, 0.5], "a": {"y": True, "x": None}}
        text = json_dumps(doc)
        assert text.index('"a"') < text.index('"b"')
        assert json.loads(text) == {"b": [1.0, 0.5], "a": {"y": True, "x": None}}
        assert json_dumps(doc) == text
