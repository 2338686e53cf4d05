import csv
import io
import json

import pytest

from indetdyn.cli import EXIT_HYPOTHESIS, EXIT_NUMERIC, EXIT_OK, load_map, main
from indetdyn.errors import ParseError
from indetdyn.fixtures import example3


def run(tmp_path, *argv):
    out = tmp_path / "out"
    code = main([*argv, "--out", str(out)])
    report = json.loads((out / "report.json").read_text()) if (out / "report.json").exists() else None
    return code, out, report


def read_csv(path):
    return list(csv.reader(io.StringIO(path.read_text())))


def test_analyze_example3(tmp_path):
    code, _, rep = run(tmp_path, "analyze", "--fixture", "example3")
    a = rep["stages"]["analyze"]
    assert code == EXIT_OK
    assert (a["D"], a["dprime"]) == (3, 2)
    assert [ip["u"] for ip in a["indeterminacy"]] == ["0/1"]
    assert a["criterion"]["verdict"] == "Satisfied"
    assert rep["provenance"]["seed"] == 0 and rep["provenance"]["backend"] == "rational"
    assert len(rep["provenance"]["config_hash"]) == 64


def test_analyze_example2_warns_about_hitting_indeterminacy(tmp_path):
    code, _, rep = run(tmp_path, "analyze", "--fixture", "example2")
    assert code == EXIT_OK
    assert len(rep["stages"]["analyze"]["indeterminacy"]) == 2
    assert any("HitsIndeterminacy" in w for w in rep["warnings"])


def test_pipeline_example1_emits_matrix(tmp_path):
    code, out, rep = run(tmp_path, "pipeline", "--fixture", "example1")
    assert code == EXIT_OK
    assert all(b["status"] == "OK" for b in rep["stages"].values())
    rows = read_csv(out / "subshift.csv")
    assert rows[1][1:7] == ["1/2", "1/4", "1/8", "1/16", "1/32", "1/64"]
    assert rows[2][1] == "1/1"
    for name in ("etree", "weights", "orbit", "escape_law"):
        assert (out / f"{name}.csv").exists()
    keys = {d["key"] for d in rep["printed_value_discrepancies"]}
    assert keys == {"example1_lambda", "example2_lambda_pn", "composition_degree"}


def test_pipeline_example4_matrix_and_skipped_orbit(tmp_path):
    code, out, rep = run(tmp_path, "pipeline", "--fixture", "example4:1,1,1")
    rows = read_csv(out / "subshift.csv")
    assert rows[1][1:3] == ["2/3", "1/3"] and rows[2][1:3] == ["1/3", "2/3"]
    assert code == EXIT_HYPOTHESIS
    assert rep["stages"]["subshift"]["status"] == "OK"
    assert rep["stages"]["orbit"]["status"] == "FAILED"


def test_pipeline_example3_mass_collapse(tmp_path):
    code, out, rep = run(tmp_path, "pipeline", "--fixture", "example3")
    assert code == EXIT_HYPOTHESIS          # periodic indeterminacy is flagged, not fatal
    orbit = rep["stages"]["orbit"]
    assert orbit["status"] == "OK" and orbit["layout"] == "exceptional"
    assert orbit["mass_collapse"]["degrees"] == [3, 1, 2]
    assert orbit["mass_collapse"]["m2_ok"]
    last = read_csv(out / "mass_collapse.csv")[-1]
    assert last[0] == "20"


def test_failed_stage_skips_later_ones(tmp_path):
    code, _, rep = run(tmp_path, "pipeline", "--fixture", "example1", "--node-cap", "2")
    st = rep["stages"]
    assert code == EXIT_NUMERIC
    assert st["analyze"]["status"] == "OK" and st["etree"]["status"] == "FAILED"
    for name in ("weights", "subshift", "escape", "orbit"):
        assert st[name]["status"] == "SKIPPED" and "etree" in st[name]["reason"]


def test_reports_are_byte_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert main(["subshift", "--fixture", "example2", "--out", str(d)]) == EXIT_OK
    for name in ("report.json", "subshift.csv", "weights.csv", "etree.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_map_file_round_trip(tmp_path):
    path = tmp_path / "map.json"
    path.write_text(json.dumps(example3().to_json()))
    code, _, rep = run(tmp_path, "analyze", "--map", str(path))
    assert code == EXIT_OK and rep["stages"]["analyze"]["D"] == 3


def test_raw_polynomial_map_file(tmp_path):
    path = tmp_path / "raw.json"
    path.write_text(json.dumps({"f1": [[3, 0, "1", "0"], [0, 2, "1", "0"]], "f2": [[1, 2, "1", "0"]]}))
    code, _, rep = run(tmp_path, "analyze", "--map", str(path))
    assert code == EXIT_OK and rep["stages"]["analyze"]["criterion"]["verdict"] == "Satisfied"


def test_malformed_json_is_a_located_parse_error(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"factors": [\n  oops]}')

    class Args:
        map, fixture, backend = str(path), None, "rational"
    with pytest.raises(ParseError, match="line 2"):
        load_map(Args)
    assert main(["analyze", "--map", str(path), "--out", str(tmp_path / "o")]) == EXIT_NUMERIC


def test_missing_map_file_is_an_error(tmp_path, capsys):
    code = main(["analyze", "--map", str(tmp_path / "nope.json"), "--out", str(tmp_path / "o")])
    assert code == EXIT_NUMERIC
    assert "does not exist" in capsys.readouterr().err


def test_unknown_fixture_is_an_error(tmp_path, capsys):
    code = main(["analyze", "--fixture", "example9", "--out", str(tmp_path / "o")])
    assert code == EXIT_NUMERIC
    assert "unknown fixture" in capsys.readouterr().err


def test_map_outside_class_is_a_hypothesis_violation(tmp_path):
    path = tmp_path / "coprime.json"
    path.write_text(json.dumps({"f1": [[2, 0, "1", "0"]], "f2": [[0, 2, "1", "0"]]}))
    assert main(["analyze", "--map", str(path), "--out", str(tmp_path / "o")]) == EXIT_HYPOTHESIS


def test_invalid_depth_and_tolerances(tmp_path):
    assert main(["etree", "--depth", "0", "--out", str(tmp_path)]) == EXIT_NUMERIC
    assert main(["escape", "--eps-match", "-1", "--out", str(tmp_path)]) == EXIT_NUMERIC
