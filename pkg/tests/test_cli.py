import json
import shutil

import pytest

from evalfuse import problemfile
from evalfuse.cli import main


@pytest.fixture()
def fixture_file(tmp_path):
    dst = tmp_path / "hiring.json"
    shutil.copy(problemfile.fixture_path(), dst)
    return str(dst)


def run_cli(capsys, *argv):
    try:
        code = main(list(argv))
    except SystemExit as exc:
        code = exc.code
    out = capsys.readouterr()
    return code, out.out, out.err


class TestAssess:
    def test_both_methods_report_published_outputs(self, capsys, fixture_file):
        code, out, _ = run_cli(capsys, "assess", "-i", fixture_file, "-m", "both")
        assert code == 0
        report = json.loads(out)
        k = report["candidates"]["K"]
        assert k["qpt"]["final"] == ["b", "1", "1", "1", "0"]
        betp = k["tbm"]["betp"]
        assert betp.index(max(betp)) == 4
        assert report["problem_hash"].startswith("sha256:")

    def test_trace_includes_weights_table(self, capsys, fixture_file):
        code, out, _ = run_cli(capsys, "assess", "-i", fixture_file, "--trace")
        assert code == 0
        trace = json.loads(out)["candidates"]["K"]["trace"]
        assert trace["qpt"]["weights"] == {
            "Ana": {"Mkt": "0", "Fin": "a", "Prod": "a", "HR": "0"},
            "Lear": {"Mkt": "b", "Fin": "a", "Prod": "a", "HR": "b"},
            "Exp": {"Mkt": "1", "Fin": "0", "Prod": "0", "HR": "0"},
            "Com": {"Mkt": "1", "Fin": "0", "Prod": "0", "HR": "b"},
            "Dec": {"Mkt": "a", "Fin": "a", "Prod": "a", "HR": "a"},
            "Crea": {"Mkt": "1", "Fin": "0", "Prod": "0", "HR": "b"},
        }

    def test_invalid_interval_names_the_cell(self, capsys, tmp_path, fixture_file):
        doc = json.load(open(fixture_file))
        doc["candidates"][0]["opinions"]["Com"]["Mkt"]["interval"] = ["5", "2"]
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps(doc))
        code, _, err = run_cli(capsys, "assess", "-i", str(bad))
        assert code != 0
        assert "K/Com/Mkt" in err

    def test_byte_identical_reports(self, capsys, fixture_file, tmp_path):
        out1 = tmp_path / "r1.json"
        out2 = tmp_path / "r2.json"
        code1, _, _ = run_cli(capsys, "assess", "-i", fixture_file, "--trace",
                              "-o", str(out1))
        code2, _, _ = run_cli(capsys, "assess", "-i", fixture_file, "--trace",
                              "-o", str(out2))
        assert code1 == code2 == 0
        assert out1.read_bytes() == out2.read_bytes()


class TestRank:
    def test_single_candidate_listing(self, capsys, fixture_file):
        code, out, _ = run_cli(capsys, "rank", "-i", fixture_file, "-m", "tbm")
        assert code == 0
        ranking = json.loads(out)["ranking"]
        assert [r["candidate"] for r in ranking] == ["K"]
        assert ranking[0]["expected"] == pytest.approx(4.7193, abs=1e-3)

    def test_two_candidates_ordered(self, capsys, tmp_path, fixture_file):
        doc = json.load(open(fixture_file))
        clone = json.loads(json.dumps(doc["candidates"][0]))
        clone["name"] = "K2"
        clone["opinions"]["Crea"]["HR"]["interval"] = ["5", "5"]
        doc["candidates"].append(clone)
        path = tmp_path / "two.json"
        path.write_text(json.dumps(doc))
        code, out, _ = run_cli(capsys, "rank", "-i", str(path), "-m", "tbm")
        assert code == 0
        assert [r["candidate"] for r in json.loads(out)["ranking"]] == ["K2", "K"]


class TestSensitivity:
    def test_noop_sweep(self, capsys, fixture_file):
        code, out, _ = run_cli(capsys, "sensitivity", "-i", fixture_file,
                               "--target", "gamma:K:Dec:HR", "--values", '["a"]')
        assert code == 0
        rows = json.loads(out)["rows"]
        assert rows[0]["deltas"] == []
        assert rows[0]["decision_changed"] is False

    def test_confidence_sweep_changes_decision(self, capsys, fixture_file):
        code, out, _ = run_cli(capsys, "sensitivity", "-i", fixture_file,
                               "--target", "gamma:K:Dec:HR", "--values", '["1"]',
                               "-m", "qpt")
        assert code == 0
        rows = json.loads(out)["rows"]
        assert rows[0]["decision_changed"] is True

    def test_unknown_coordinate_fails(self, capsys, fixture_file):
        code, _, err = run_cli(capsys, "sensitivity", "-i", fixture_file,
                               "--target", "beta:Nope", "--values", '["e"]')
        assert code != 0
        assert "Nope" in err


class TestValidate:
    def test_fixture_passes_with_note(self, capsys, fixture_file):
        code, out, _ = run_cli(capsys, "validate", "-i", fixture_file)
        assert code == 0
        diags = json.loads(out)["diagnostics"]
        assert any(d["severity"] == "note" and d["location"] == "K/Lear/Mkt"
                   for d in diags)
        assert not any(d["severity"] == "error" for d in diags)

    def test_broken_file_exits_nonzero(self, capsys, tmp_path, fixture_file):
        doc = json.load(open(fixture_file))
        doc["experts"] = []
        doc["candidates"][0]["opinions"] = {}
        path = tmp_path / "broken.json"
        path.write_text(json.dumps(doc))
        code, out, _ = run_cli(capsys, "validate", "-i", str(path))
        assert code == 2
        assert any(d["code"] == "no-experts"
                   for d in json.loads(out)["diagnostics"])
