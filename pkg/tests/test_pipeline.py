import csv
import io
import json
import math

import pytest

from monodromic.cli import main
from monodromic.pipeline import EXIT_HYPOTHESIS, EXIT_INPUT, EXIT_OK, run_pipeline
from monodromic.problem import ProblemSpec, fixture_path, load_problem
from monodromic.report import ReportFormatError, emit_report


@pytest.fixture(scope="module")
def reports():
    names = ["focus_cycle", "focus_cycle_zero", "two_weight_family", "weak_focus"]
    return {n: run_pipeline(load_problem(fixture_path(n))) for n in names}


def only_run(rep, weight=None):
    runs = rep.data["weights"]
    return runs[0] if weight is None else next(r for r in runs if r["weight"] == list(weight))


class TestPipeline:
    def test_focus_cycle(self, reports):
        rep = reports["focus_cycle"]
        run = only_run(rep)
        assert rep.exit_code == EXIT_OK
        assert run["iif"]["m"] == 1
        assert run["g_constant"]["value"] == pytest.approx(-2 * math.pi, abs=1e-6)
        cls = run["classification"]
        assert (cls["verdict"], cls["stability"], cls["analytic"], cls["cyclicity"]) == ("Focus", "Stable", True, 0)
        assert run["hypotheses"]["0 not in characteristic directions"] == "passed"
        assert run["oracle"]["eta_fit"]["value"] == pytest.approx(-2 * math.pi, abs=1e-6)

    def test_eta_jump_across_family(self, reports):
        a, b = reports["focus_cycle"].data, reports["focus_cycle_zero"].data
        assert [e["start"] + e["end"] for e in a["diagram"]["edges"]] == [[0, 2, 2, 0]]
        assert [e["start"] + e["end"] for e in b["diagram"]["edges"]] == [[0, 4, 4, 0]]
        assert only_run(reports["focus_cycle_zero"])["g_constant"]["value"] == pytest.approx(2 * math.pi, abs=1e-6)

    def test_two_weight_family(self, reports):
        rep = reports["two_weight_family"]
        assert rep.data["diagram"]["weights"] == [[1, 1], [1, 3]]
        r11 = only_run(rep, (1, 1))
        assert r11["xi_pq"]["value"] == pytest.approx(12 * math.pi / 5, abs=1e-6)
        assert r11["xi_pq"]["used_for_classification"] is False
        assert any(e["hypothesis_violation"] for e in r11["errors"])
        r13 = only_run(rep, (1, 3))
        assert r13["theta"]["status"] in ("proven", "sufficient-condition")
        assert r13["g_constant"]["value"] == pytest.approx(4 * math.pi, abs=1e-6)
        # one usable weight is enough for a completed analysis
        assert rep.exit_code == EXIT_OK

    def test_weak_focus(self, reports):
        run = only_run(reports["weak_focus"])
        assert run["iif"]["m"] == 3
        assert run["classification"]["analytic"] is True
        assert run["oracle"]["eta_fit"]["value"] == pytest.approx(2 * math.pi, rel=1e-6)

    def test_every_number_has_an_error(self, reports):
        def walk(obj):
            if isinstance(obj, dict):
                if "value" in obj and isinstance(obj["value"], float):
                    assert "error" in obj
                for v in obj.values():
                    walk(v)
            elif isinstance(obj, list):
                for v in obj:
                    walk(v)

        for rep in reports.values():
            walk(rep.data)

    def test_missing_iif_is_a_hypothesis_violation(self):
        spec = ProblemSpec.loads(json.dumps({"P": [{"i": 0, "j": 1, "coeff": "-1"}, {"i": 3, "j": 0}],
                                             "Q": [{"i": 1, "j": 0}]}))
        rep = run_pipeline(spec)
        assert rep.exit_code == EXIT_HYPOTHESIS
        assert only_run(rep)["hypotheses"]["inverse integrating factor supplied"] == "failed"

    def test_non_monodromic(self):
        spec = ProblemSpec.loads(json.dumps({"P": [{"i": 1, "j": 0}], "Q": [{"i": 0, "j": 1, "coeff": "-1"}],
                                             "options": {"weights": [[1, 1]]}}))
        rep = run_pipeline(spec)
        assert rep.exit_code == EXIT_HYPOTHESIS
        assert only_run(rep)["errors"][0]["kind"] == "NonMonodromic"


class TestReport:
    def test_deterministic_json(self, reports):
        rep = reports["focus_cycle"]
        assert emit_report(rep, "json") == emit_report(rep, "json")
        again = run_pipeline(load_problem(fixture_path("focus_cycle")))
        assert emit_report(again, "json") == emit_report(rep, "json")

    def test_json_content(self, reports):
        doc = json.loads(emit_report(reports["focus_cycle"], "json"))
        assert doc["schema_version"] == 1
        assert doc["weights"][0]["iif"]["m"] == 1
        assert abs(doc["weights"][0]["g_constant"]["value"] + 2 * math.pi) < 1e-6

    def test_floats_keep_seventeen_digits(self):
        text = emit_report({"a": 0.1, "b": 1.0, "c": float("nan"), "d": 1e-300}, "json").decode()
        doc = json.loads(text)
        assert '"a": 0.10000000000000001' in text and doc["b"] == 1.0 and doc["c"] is None
        assert doc["d"] == 1e-300

    def test_keys_sorted(self):
        text = emit_report({"b": 1, "a": {"z": 2, "y": 3}}, "json").decode()
        assert text.index('"a"') < text.index('"b"') and text.index('"y"') < text.index('"z"')

    def test_empty_weights_is_valid_json(self):
        spec = ProblemSpec.loads(json.dumps({"P": [{"i": 0, "j": 1, "coeff": "-1"}], "Q": [{"i": 1, "j": 0}]}))
        rep = run_pipeline(spec, weights=[])
        doc = json.loads(emit_report(rep, "json"))
        assert doc["weights"] == [] and doc["errors"]

    def test_csv_sweep(self, reports):
        rows = list(csv.DictReader(io.StringIO(emit_report(reports["focus_cycle"], "csv").decode())))
        assert len(rows) == 4
        for row in rows:
            assert abs(float(row["residual"])) < 1e-9
            assert float(row["pi_series"]) == pytest.approx(float(row["pi_oracle"]), rel=1e-8)

    def test_text_summary(self, reports):
        text = emit_report(reports["focus_cycle"], "text").decode()
        assert "verdict: Focus" in text and "exit code: 0" in text

    def test_unknown_format(self, reports):
        with pytest.raises(ReportFormatError):
            emit_report(reports["focus_cycle"], "xml")


class TestCli:
    def run(self, argv, capsys, stdin=None, monkeypatch=None):
        if stdin is not None:
            monkeypatch.setattr("sys.stdin", io.StringIO(stdin))
        code = main(argv)
        return code, capsys.readouterr()

    def test_diagram(self, capsys):
        code, out = self.run(["diagram", fixture_path("two_weight_family")], capsys)
        assert code == EXIT_OK
        assert json.loads(out.out)["diagram"]["weights"] == [[1, 1], [1, 3]]

    def test_stdin_and_weights(self, capsys, monkeypatch):
        with open(fixture_path("two_weight_family")) as fh:
            text = fh.read()
        code, out = self.run(["theta", "--weights", "1,3"], capsys, stdin=text, monkeypatch=monkeypatch)
        doc = json.loads(out.out)
        assert code == EXIT_OK and [r["weight"] for r in doc["weights"]] == [[1, 3]]
        assert doc["weights"][0]["theta"]["verdict"] == "EmptyProven"

    def test_blowup_text(self, capsys):
        code, out = self.run(["blowup", fixture_path("focus_cycle"), "--format", "text"], capsys)
        assert code == EXIT_OK and "characteristic directions: none" in out.out

    def test_poincare_skips_oracle(self, capsys):
        code, out = self.run(["poincare", fixture_path("weak_focus"), "--truncation", "8"], capsys)
        run = json.loads(out.out)["weights"][0]
        assert code == EXIT_OK and "oracle" not in run and len(run["return_map"]["coefficients"]) == 8

    def test_oracle_csv(self, capsys, tmp_path):
        target = tmp_path / "sweep.csv"
        code, _ = self.run(["oracle", fixture_path("focus_cycle"), "--radii", "0.02,0.05,0.1",
                            "--format", "csv", "--out", str(target)], capsys)
        rows = list(csv.DictReader(target.open()))
        assert code == EXIT_OK and [float(r["rho0"]) for r in rows] == [0.02, 0.05, 0.1]
        assert all(float(r["pi_prime"]) == pytest.approx(float(r["exp_I"]), rel=1e-9) for r in rows)

    def test_report_tolerance_flag(self, capsys):
        code, out = self.run(["report", fixture_path("focus_cycle"), "--tol", "1e-9", "--radii", "0.02,0.04"], capsys)
        assert code == EXIT_OK
        assert json.loads(out.out)["weights"][0]["g_constant"]["radii"] == [0.02, 0.04]

    def test_bad_json_exit_code(self, capsys, monkeypatch):
        code, out = self.run(["report"], capsys, stdin="{", monkeypatch=monkeypatch)
        assert code == EXIT_INPUT and "input error" in out.err

    def test_missing_file(self, capsys):
        code, _ = self.run(["report", "/nonexistent/problem.json"], capsys)
        assert code == EXIT_INPUT

    def test_bad_flag(self, capsys):
        code, _ = self.run(["report", "--weights", "1"], capsys)
        assert code == EXIT_INPUT

    def test_hypothesis_violation_exit_code(self, capsys, monkeypatch):
        doc = json.dumps({"P": [{"i": 1, "j": 0}], "Q": [{"i": 0, "j": 1}], "options": {"weights": [[1, 1]]}})
        code, _ = self.run(["report"], capsys, stdin=doc, monkeypatch=monkeypatch)
        assert code == EXIT_HYPOTHESIS
