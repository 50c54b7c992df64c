"""Command-line behavior: exit codes, determinism, file outputs."""

import csv
import json

import pytest

from frontier.cli import main
from frontier.harness import CSV_COLUMNS, load_json


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# ----------------------------------------------------------------------
# usage and exit codes


def test_help_exits_zero(capsys):
    code, out, _ = run(capsys, "--help")
    assert code == 0
    assert "simulate" in out and "estimate" in out and "coverage" in out


def test_unknown_flag_exits_one(capsys):
    code, _, err = run(capsys, "estimate", "--model", "ppp", "--g", "const:0",
                       "--n", "50", "--estimator", "mle", "--beta", "1",
                       "--R", "1", "--wat", "7")
    assert code == 1
    assert "wat" in err


def test_missing_subcommand_exits_one(capsys):
    code, _, _ = run(capsys)
    assert code == 1


def test_estimation_failure_exits_two(capsys):
    # monotone estimation rejects full-support weights on point samples
    code, _, err = run(capsys, "estimate", "--model", "ppp",
                       "--g", "const:0", "--n", "50",
                       "--estimator", "monotone", "--seed", "3")
    assert code == 2
    assert "estimation failed" in err


# ----------------------------------------------------------------------
# estimate


ESTIMATE_ARGS = ("estimate", "--model", "ppp", "--g", "const:0",
                 "--beta", "1", "--R", "1", "--n", "100",
                 "--estimator", "mle", "--w", "const:1", "--seed", "7")


def test_estimate_is_deterministic(capsys):
    code1, out1, _ = run(capsys, *ESTIMATE_ARGS)
    code2, out2, _ = run(capsys, *ESTIMATE_ARGS)
    assert code1 == code2 == 0
    assert out1 == out2
    doc = json.loads(out1)
    assert doc["method"] == "mle-hoelder"
    assert doc["on_graph_count"] >= 1
    assert doc["ci"]["lo"] <= doc["theta_hat"] <= doc["ci"]["hi"]
    assert doc["sigma_hat"] > 0
    # flags echo back for auditability
    assert doc["config"]["n"] == 100 and doc["config"]["seed"] == 7
    assert doc["config"]["estimator"]["R"] == 1.0


def test_estimate_blockwise_reports_bandwidth(capsys):
    code, out, _ = run(capsys, "estimate", "--model", "ppp",
                       "--g", "const:0", "--beta", "1", "--R", "1",
                       "--n", "200", "--estimator", "blockwise",
                       "--h", "0.1", "--seed", "5")
    assert code == 0
    doc = json.loads(out)
    assert doc["h"] == 0.1
    assert "ci" not in doc  # no self-normalized interval for block sums


def test_estimate_oracle_bandwidth_default(capsys):
    code, out, _ = run(capsys, "estimate", "--model", "ppp",
                       "--g", "const:0", "--beta", "1", "--R", "1",
                       "--n", "200", "--estimator", "blockwise",
                       "--seed", "5")
    assert code == 0
    assert json.loads(out)["h"] == 0.05


def test_estimate_lepski_reports_chosen_h(capsys, tmp_path):
    out_path = tmp_path / "report.json"
    code, out, _ = run(capsys, "estimate", "--model", "regression",
                       "--g", "const:0.2", "--n", "80",
                       "--estimator", "lepski",
                       "--bandwidths", "0.025,0.05,0.1", "--c", "0.3",
                       "--seed", "11", "--out", str(out_path))
    assert code == 0
    doc = json.loads(out)
    assert doc["chosen_h"] in (0.025, 0.05, 0.1)
    assert json.loads(out_path.read_text()) == doc


def test_estimate_validates_required_method_flags(capsys):
    code, _, err = run(capsys, "estimate", "--model", "ppp",
                       "--g", "const:0", "--n", "50", "--estimator", "mle")
    assert code == 1
    assert "--beta" in err and "--R" in err
    code, _, err = run(capsys, "estimate", "--model", "regression",
                       "--g", "const:0", "--n", "50",
                       "--estimator", "lepski")
    assert code == 1
    assert "--bandwidths" in err


# ----------------------------------------------------------------------
# simulate


def test_simulate_writes_deterministic_csv(capsys, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        code, out, _ = run(capsys, "simulate", "--model", "ppp",
                           "--g", "sqrt", "--n", "60", "--seed", "9",
                           "--out", str(path))
        assert code == 0
        meta = json.loads(out)
        assert meta["n"] == 60 and meta["seed"] == 9
        assert meta["points"] >= 1
    assert a.read_bytes() == b.read_bytes()
    with open(a, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["x", "y"]
    x, y = zip(*((float(r[0]), float(r[1])) for r in rows[1:]))
    assert all(0 <= xi <= 1 for xi in x)


def test_simulate_regression_has_n_rows(capsys, tmp_path):
    path = tmp_path / "reg.csv"
    code, _, _ = run(capsys, "simulate", "--model", "regression",
                     "--g", "const:0", "--n", "25", "--seed", "2",
                     "--out", str(path))
    assert code == 0
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert len(rows) == 26
    assert float(rows[1][0]) == 1 / 25 and float(rows[-1][0]) == 1.0


# ----------------------------------------------------------------------
# mc


def _write_config(tmp_path, **extra):
    cfg = {"g": "const:0", "model": "ppp", "n_grid": [40, 80],
           "replications": 10, "master_seed": 3,
           "experiment_id": "cli-test",
           "estimators": [
               {"name": "mle", "method": "mle", "beta": 1, "R": 1},
               {"name": "block", "method": "blockwise",
                "beta": 1, "R": 1, "h": "oracle"}]}
    cfg.update(extra)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(cfg))
    return path


def test_mc_writes_csv_with_full_grid(capsys, tmp_path):
    cfg = _write_config(tmp_path)
    out_path = tmp_path / "result.csv"
    code, out, _ = run(capsys, "mc", "--config", str(cfg),
                       "--out", str(out_path))
    assert code == 0
    with open(out_path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == list(CSV_COLUMNS)
    assert len(rows) == 1 + 2 * 2  # estimators x grid sizes
    names = {(r[1], r[2]) for r in rows[1:]}
    assert names == {("mle", "40"), ("mle", "80"),
                     ("block", "40"), ("block", "80")}
    meta = json.loads(out)
    assert meta["spec"]["master_seed"] == 3


def test_mc_json_format_round_trips_and_flags_override(capsys, tmp_path):
    cfg = _write_config(tmp_path)
    out_path = tmp_path / "result.json"
    code, _, _ = run(capsys, "mc", "--config", str(cfg), "--format", "json",
                     "--master-seed", "99", "--replications", "4",
                     "--out", str(out_path))
    assert code == 0
    result = load_json(out_path)
    assert result.spec.master_seed == 99
    assert result.spec.replications == 4
    assert all(row.M == 4 for row in result.rows)


def test_mc_inline_estimators_without_config_file(capsys, tmp_path):
    out_path = tmp_path / "inline.csv"
    code, _, _ = run(capsys, "mc", "--g", "const:0", "--model", "regression",
                     "--n-grid", "30,60", "--replications", "5",
                     "--master-seed", "1",
                     "--estimator",
                     '{"name": "mle", "method": "mle", "beta": 1, "R": 1}',
                     "--out", str(out_path))
    assert code == 0
    with open(out_path, newline="") as fh:
        assert len(list(csv.reader(fh))) == 3


def test_mc_unknown_config_field_named_in_error(capsys, tmp_path):
    cfg = _write_config(tmp_path, bogus=1)
    code, _, err = run(capsys, "mc", "--config", str(cfg),
                       "--out", str(tmp_path / "x.csv"))
    assert code == 1
    assert "bogus" in err


def test_mc_missing_g_and_malformed_json(capsys, tmp_path):
    code, _, err = run(capsys, "mc", "--n-grid", "10,20",
                       "--out", str(tmp_path / "x.csv"))
    assert code == 1 and "g" in err
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _, err = run(capsys, "mc", "--config", str(bad),
                       "--out", str(tmp_path / "x.csv"))
    assert code == 1
    code, _, err = run(capsys, "mc", "--config", str(tmp_path / "nope.json"),
                       "--out", str(tmp_path / "x.csv"))
    assert code == 1


def test_mc_estimation_failure_exits_two(capsys, tmp_path):
    cfg = _write_config(
        tmp_path, estimators=[{"name": "mono", "method": "monotone"}])
    code, _, err = run(capsys, "mc", "--config", str(cfg),
                       "--out", str(tmp_path / "x.csv"))
    assert code == 2
    assert "mono" in err


# ----------------------------------------------------------------------
# rates and coverage


def test_rates_emits_fits(capsys, tmp_path):
    cfg = _write_config(tmp_path, n_grid=[40, 80, 160], replications=40,
                        estimators=[{"name": "block", "method": "blockwise",
                                     "beta": 1, "R": 1, "h": "oracle"}])
    out_path = tmp_path / "rates.json"
    code, out, _ = run(capsys, "rates", "--config", str(cfg),
                       "--quantity", "rmse", "--out", str(out_path))
    assert code == 0
    doc = json.loads(out_path.read_text())
    assert doc["quantity"] == "rmse"
    (fit,) = doc["fits"]
    assert fit["estimator"] == "block"
    assert fit["slope"] < 0 and fit["stderr"] >= 0
    assert doc["spec"]["n_grid"] == [40, 80, 160]


def test_coverage_subcommand(capsys, tmp_path):
    cfg = tmp_path / "cov.json"
    cfg.write_text(json.dumps({
        "g": "const:0", "n": 150, "replications": 40, "alpha": 0.05,
        "estimator": {"name": "mle", "method": "mle", "beta": 1, "R": 1}}))
    code, out, _ = run(capsys, "coverage", "--config", str(cfg),
                       "--master-seed", "17")
    assert code == 0
    doc = json.loads(out)
    assert 0.8 <= doc["report"]["coverage"] <= 1.0
    assert doc["report"]["replications"] == 40
    assert doc["config"]["master_seed"] == 17


def test_coverage_config_validation(capsys, tmp_path):
    cfg = tmp_path / "cov.json"
    cfg.write_text(json.dumps({"g": "const:0", "n": 50,
                               "replications": 5, "zap": 1,
                               "estimator": {"method": "stub"}}))
    code, _, err = run(capsys, "coverage", "--config", str(cfg))
    assert code == 1 and "zap" in err
    cfg.write_text(json.dumps({"g": "const:0", "n": 50}))
    code, _, err = run(capsys, "coverage", "--config", str(cfg))
    assert code == 1
    assert "estimator" in err and "replications" in err
