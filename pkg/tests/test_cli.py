import json
import numpy as np
import pytest

from magtb.artifacts import read_csv
from magtb.cli import main


def run(args):
    return main(args)


def test_validate_square(tmp_path):
    code = run(["validate", "--lattice", "square", "--a", "1", "--nx", "10", "--ny", "10",
                "--out", str(tmp_path)])
    assert code == 0
    doc = json.loads((tmp_path / "validation.json").read_text())
    assert doc["passed"] is True
    assert doc["command"] == "validate"
    assert "config_hash" in doc


def test_validate_honeycomb(tmp_path):
    assert run(["validate", "--lattice", "honeycomb", "--a", "1", "--nx", "3", "--ny", "3",
                "--out", str(tmp_path)]) == 0


def test_atomic_artifacts(tmp_path):
    code = run(["atomic", "--lambda", "8", "--vmin", "-4", "--out", str(tmp_path)])
    assert code == 0
    header, data, meta = read_csv(tmp_path / "ground_state.csv")
    assert header == ["r", "phi"]
    assert data.shape[1] == 2
    doc = json.loads((tmp_path / "ground_state.json").read_text())
    assert doc["gap"] > 0
    assert doc["decay_passes"] is True


def test_hopping_sweep(tmp_path):
    code = run(["hopping", "--lambdas", "6", "8", "--a", "3", "--vmin", "-4", "--out", str(tmp_path)])
    assert code == 0
    header, data, _ = read_csv(tmp_path / "hopping.csv")
    assert header == ["lambda", "abs_rho", "bound_lo", "bound_hi"]
    assert np.all(data[:, 1] <= data[:, 3])


def test_gramian_command(tmp_path):
    code = run(["gramian", "--lattice", "square", "--a", "3", "--nx", "3", "--ny", "3",
                "--lambda", "8", "--vmin", "-4", "--out", str(tmp_path)])
    assert code == 0
    doc = json.loads((tmp_path / "gramian.json").read_text())
    assert doc["deviation_norm"] < 1.0
    assert doc["gramian"]["shape"] == [9, 9]


def test_tb_export_and_determinism(tmp_path):
    args = ["tb", "--lattice", "square", "--nx", "5", "--ny", "5", "--flux", "1/4",
            "--out", str(tmp_path)]
    assert run(args) == 0
    first = (tmp_path / "tb.csv").read_text()
    assert run(args) == 0
    second = (tmp_path / "tb.csv").read_text()
    strip_ts = lambda text: [l for l in text.splitlines() if not l.startswith("# timestamp")]
    assert strip_ts(first) == strip_ts(second)


def test_tb_random_hopping(tmp_path):
    assert run(["tb", "--lattice", "square", "--nx", "4", "--ny", "4", "--flux", "1/3",
                "--displace", "9.0", "--seed", "5", "--out", str(tmp_path)]) == 0
    doc = json.loads((tmp_path / "tb_meta.json").read_text())
    assert doc["n_sites"] == 16


def test_butterfly_rows(tmp_path):
    assert run(["butterfly", "--qmax", "12", "--size", "20", "--out", str(tmp_path)]) == 0
    header, data, _ = read_csv(tmp_path / "butterfly.csv")
    assert header == ["flux", "energy"]
    assert data.shape[0] >= 1000


def test_chern_command(tmp_path):
    code = run(["chern", "--flux", "1/3", "--size", "24", "--gap", "1", "--out", str(tmp_path)])
    assert code == 0
    doc = json.loads((tmp_path / "chern.json").read_text())
    assert doc["kubo"]["nearest_integer"] == 1
    assert doc["flux_insertion"]["nearest_integer"] == 1


def test_edge_command(tmp_path):
    code = run(["edge", "--flux", "1/3", "--nx", "40", "--ny", "20", "--out", str(tmp_path)])
    assert code == 0
    doc = json.loads((tmp_path / "edge.json").read_text())
    assert doc["edge_conductance"]["nearest_integer"] == 1
    assert doc["defect_passes"] is True
    header, data, _ = read_csv(tmp_path / "defect.csv")
    assert header == ["depth", "max_defect"]
    assert data.shape[0] == 20


def test_reduce_command(tmp_path):
    code = run(["reduce", "--flux", "1/3", "--a", "2.5", "--vmin", "-1", "--rs", "3", "4",
                "--out", str(tmp_path)])
    assert code == 0
    header, data, _ = read_csv(tmp_path / "reduce.csv")
    assert data[1, 3] < data[0, 3]  # NN deviation decreasing


def test_unknown_lattice_errors(tmp_path):
    with pytest.raises(SystemExit):
        run(["validate", "--lattice", "kagome", "--out", str(tmp_path)])


def test_error_exit_code(tmp_path):
    # malformed: nx=0 trips the builder's argument validation
    code = run(["validate", "--lattice", "square", "--nx", "0", "--out", str(tmp_path)])
    assert code == 1


def test_reproduce_all_empty_suite(tmp_path):
    suite = tmp_path / "suite.json"
    suite.write_text("[]")
    assert run(["reproduce-all", str(suite), "--out", str(tmp_path)]) == 0


def test_reproduce_all_isolates_bad_cases(tmp_path, capsys):
    suite = tmp_path / "suite.json"
    suite.write_text(json.dumps([
        {"case": "no_such_case"},
        {"case": "landau_oracle"},
    ]))
    code = run(["reproduce-all", str(suite), "--out", str(tmp_path)])
    captured = capsys.readouterr()
    assert code == 1
    assert "ERROR no_such_case" in captured.err
    assert "PASS landau_oracle" in captured.out
    doc = json.loads((tmp_path / "reproduce_all.json").read_text())
    assert doc["results"][0]["name"] == "landau_oracle"
