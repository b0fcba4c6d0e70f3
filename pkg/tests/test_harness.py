import csv
import json

import pytest

from bhx.harness import REGISTRY, ExperimentSpec, Report, emit_report, run_experiment
from bhx.harness.cli import main
from bhx.harness.config import experiment_overrides, load_config
from bhx.harness.experiments import cli_overrides, fit_slope, list_experiments
from bhx.harness.report import TABLE_SCHEMAS, to_json


def test_registry_lists_ten_experiments():
    rows = list_experiments()
    assert [r[0] for r in rows] == [f"E{i}" for i in range(1, 11)]
    assert all(r[2] and "\n" not in r[2] for r in rows)
    owned = sorted(c for r in rows for c in r[3])
    assert owned == sorted(f"C{i}" for i in range(1, 12))


def test_spec_validation():
    with pytest.raises(ValueError):
        ExperimentSpec("E11")
    with pytest.raises(ValueError):
        ExperimentSpec("E5", {"deltas": [1 / 32]})
    with pytest.raises(ValueError):
        ExperimentSpec("E2", {"bogus": 1})
    with pytest.raises(ValueError):
        ExperimentSpec("E3", {"alphas": [0.5]})


def test_fit_slope():
    assert fit_slope([1, 2, 4], [3, 6, 12]) == pytest.approx(1.0)


def test_json_is_bit_stable(tmp_path):
    a = run_experiment(ExperimentSpec("E2", seed=7))
    b = run_experiment(ExperimentSpec("E2", seed=7))
    emit_report([a], tmp_path / "a")
    emit_report([b], tmp_path / "b")
    assert (tmp_path / "a" / "E2.json").read_bytes() == (tmp_path / "b" / "E2.json").read_bytes()


def test_json_nulls_and_formatting():
    r = Report("E5", "x", "y", {"v": 1 / 3, "bad": float("nan")}, {"C7": True}, {})
    d = json.loads(to_json(r.to_dict()))
    assert d["notes"] is None and d["table"] is None and d["metrics"]["bad"] is None
    assert d["metrics"]["v"] == float("%.12g" % (1 / 3))
    assert list(d) == sorted(d)


def test_csv_schema(tmp_path):
    r = Report("E5", "optimality", "b", {}, {"C7": True}, {}, table=[[0.5, 1.5, 0.2], [0.25, 3.0, 0.6]])
    emit_report([r], tmp_path, "csv")
    rows = list(csv.reader(open(tmp_path / "E5.csv")))
    assert rows[0] == TABLE_SCHEMAS["E5"] == ["delta", "ap_const", "ratio"]
    assert len(rows) == 3
    assert list(csv.reader(open(tmp_path / "summary.csv")))[0] == ["experiment", "criterion", "passed"]


def test_emit_requires_reports(tmp_path):
    with pytest.raises(ValueError):
        emit_report([], tmp_path)


def test_config_sections(tmp_path):
    p = tmp_path / "c.toml"
    p.write_text('[quadrature]\nresolution = 2048\n[experiments.E10]\nr = 0.8\n')
    cfg = load_config(str(p))
    ov = experiment_overrides(cfg, "E10")
    assert ov == {"resolution": 2048, "r": 0.8}
    (tmp_path / "bad.toml").write_text("[other]\nx = 1\n")
    with pytest.raises(ValueError):
        load_config(str(tmp_path / "bad.toml"))


def test_cli_overrides():
    assert cli_overrides("E3", n=1, eps_cut=1e-3) == {"dims": [1], "eps_cut": 1e-3}
    assert cli_overrides("E10", resolution=512) == {"resolution": 512}


def test_cli_exit_codes(tmp_path, capsys):
    assert main(["list"]) == 0
    assert "E10" in capsys.readouterr().out
    assert main(["quad", "check", "--n", "2", "--resolution", "16"]) == 0
    assert main(["verify", "E10", "--out", str(tmp_path)]) == 0
    assert main(["report", "--out", str(tmp_path)]) == 0
    assert main(["verify", "E99", "--out", str(tmp_path)]) == 2
    # an unattainable tolerance fails the criterion and the exit code
    cfg = tmp_path / "strict.toml"
    cfg.write_text("[experiments.E10]\nradial_nodes = 2\n")
    assert main(["verify", "E10", "--out", str(tmp_path / "s"), "--config", str(cfg)]) == 1


def test_cli_dyadic(tmp_path):
    assert main(["dyadic", "check", "--n", "1", "--resolution", "1024"]) == 0
    assert main(["dyadic", "build", "--n", "1", "--resolution", "1024", "--out", str(tmp_path)]) == 0
    assert main(["dyadic", "check", "--n", "1", "--resolution", "64"]) == 2
    assert json.loads((tmp_path / "dyadic_n1.json").read_text())["params"]["k_min"] == -3


def test_registry_defaults_valid():
    for eid in REGISTRY:
        ExperimentSpec(eid)
