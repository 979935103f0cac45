import csv
import json

import pytest

from lcd import cli


def write_cfg(tmp_path, name, payload):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


def run(args):
    return cli.main(args)


def test_examples_list(capsys):
    assert run(["examples", "list"]) == 0
    out = capsys.readouterr().out
    assert "flat_euclidean" in out
    assert "contact_sphere" in out


def test_ricci_pass_and_report(tmp_path):
    cfg = write_cfg(tmp_path, "r.json", {
        "model": {"builtin": "flat_euclidean", "params": {"n": 2}},
        "N": "inf", "samples": 5, "tol": 1e-6, "seed": 3})
    assert run(["ricci", "--config", cfg, "--out", str(tmp_path)]) == 0
    report = json.loads((tmp_path / "ricci.json").read_text())
    assert report["schema_version"] == 1
    assert report["verdict"] == "pass"
    assert report["config"]["model"]["builtin"] == "flat_euclidean"
    assert report["results"]["oracle_max_error"] <= 1e-6


def test_unknown_key_rejected(tmp_path, capsys):
    cfg = write_cfg(tmp_path, "bad.json", {
        "model": {"builtin": "flat_euclidean"}, "samplez": 5})
    assert run(["ricci", "--config", cfg, "--out", str(tmp_path)]) == 3
    err = capsys.readouterr().err
    assert "config.samplez" in err


def test_nested_unknown_key_rejected(tmp_path, capsys):
    cfg = write_cfg(tmp_path, "bad2.json", {
        "model": {"builtin": "flat_euclidean",
                  "chartt": {"lower": [0], "upper": [1]}}})
    assert run(["ricci", "--config", cfg, "--out", str(tmp_path)]) == 3
    assert "config.model.chartt" in capsys.readouterr().err


def test_missing_config_file(tmp_path, capsys):
    assert run(["ricci", "--config", str(tmp_path / "nope.json")]) == 3


def test_expression_model(tmp_path):
    cfg = write_cfg(tmp_path, "e.json", {
        "model": {"chart": {"lower": [-2, -2], "upper": [2, 2]},
                  "L": "(v1^2 + v2^2)/2 + 1",
                  "omega": "1"},
        "N": "inf", "samples": 3, "seed": 1})
    # no oracle on a custom model: informational run, exit 2
    assert run(["ricci", "--config", cfg, "--out", str(tmp_path)]) == 2
    report = json.loads((tmp_path / "ricci.json").read_text())
    assert abs(report["results"]["max"]) <= 1e-5


def test_structured_model(tmp_path):
    cfg = write_cfg(tmp_path, "s.json", {
        "model": {"chart": {"lower": [-2, -2], "upper": [2, 2]},
                  "metric": [["1", "0"], ["0", "1"]],
                  "potential": "2",
                  "eta": ["0", "0"]},
        "x0": [0.0, 0.0], "x1": [1.0, 0.0]})
    assert run(["cost", "--config", cfg, "--out", str(tmp_path)]) == 0
    report = json.loads((tmp_path / "cost.json").read_text())
    # L = |v|^2/2 + 2 gives |v| = 2 on the indicatrix, cost = 2 |dx|
    assert report["results"]["action"] == pytest.approx(2.0, abs=1e-5)


def test_bad_expression_rejected(tmp_path, capsys):
    cfg = write_cfg(tmp_path, "bad3.json", {
        "model": {"chart": {"lower": [-1], "upper": [1]},
                  "L": "v1^2 +"},
        "samples": 1})
    assert run(["ricci", "--config", cfg, "--out", str(tmp_path)]) == 3


def test_flow_csv(tmp_path):
    cfg = write_cfg(tmp_path, "f.json", {
        "model": {"builtin": "flat_euclidean", "params": {"n": 2}},
        "x": [0.0, 0.0], "v": [1.0, 0.0], "T": 1.0, "h": 0.01})
    assert run(["flow", "--config", cfg, "--out", str(tmp_path)]) == 0
    with open(tmp_path / "flow.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["t", "x1", "x2", "v1", "v2", "energy"]
    assert len(rows) == 102
    # shortest round-trip decimal rendering
    assert float(rows[-1][1]) == pytest.approx(1.0, abs=1e-12)


def test_cd1d_fail_exit_code(tmp_path):
    cfg = write_cfg(tmp_path, "c.json", {
        "measure": {"interval": [0.0, 1.0], "density": "1"},
        "K": 1.0, "N": "inf"})
    # Lebesgue is not CD(1, inf)
    assert run(["cd1d", "--config", cfg, "--out", str(tmp_path)]) == 1


def test_seed_override_and_determinism(tmp_path):
    cfg = write_cfg(tmp_path, "d.json", {
        "model": {"builtin": "flat_euclidean", "params": {"n": 2}},
        "N": 3, "samples": 4, "seed": 5})
    out1 = tmp_path / "o1"
    out2 = tmp_path / "o2"
    out1.mkdir()
    out2.mkdir()
    run(["ricci", "--config", cfg, "--out", str(out1)])
    run(["ricci", "--config", cfg, "--out", str(out2)])
    r1 = json.loads((out1 / "ricci.json").read_text())
    r2 = json.loads((out2 / "ricci.json").read_text())
    assert r1["results"] == r2["results"]
    run(["ricci", "--config", cfg, "--seed", "6", "--out", str(out2)])
    r3 = json.loads((out2 / "ricci.json").read_text())
    assert r3["seed"] == 6


def test_unknown_suite_exits_3(capsys):
    with pytest.raises(SystemExit):
        # argparse rejects unknown --suite values
        cli.main(["verify", "--suite", "nope"])


def test_interp1d_report(tmp_path):
    cfg = write_cfg(tmp_path, "i.json", {
        "m0": {"interval": [0, 1], "density": "1", "grid": 256},
        "m1": {"interval": [2, 3], "density": "1", "grid": 256},
        "lambdas": [0.5]})
    assert run(["interp1d", "--config", cfg, "--out", str(tmp_path)]) == 0
    report = json.loads((tmp_path / "interp1d.json").read_text())
    assert report["results"]["map_monotone"]
    assert report["results"]["mass_error_max"] <= 1e-6
