import json

import jsonschema
import pytest

from folnerlab.cli import main
from folnerlab.report import SEED_ENV, schema


def load(path):
    return json.loads(path.read_text())


def test_criterion_free2(tmp_path):
    out = tmp_path / "c.json"
    assert main(["criterion", "--group", "free:2", "--set", "[a,a^-1,b,b^-1]", "--nmax", "12", "--json", str(out), "--quiet"]) == 0
    rep = load(out)
    jsonschema.validate(rep, schema())
    assert rep["verdict"] == {"holds": True, "certified": True, "n": 9}
    assert rep["stages"]["power_search"]["h_lower"]["value"] == pytest.approx(0.7262, abs=5e-4)


def test_criterion_zd2_not_certified(tmp_path):
    out = tmp_path / "c.json"
    assert main(["criterion", "--group", "zd:2", "--set", "std", "--json", str(out), "--quiet"]) == 3
    rep = load(out)
    jsonschema.validate(rep, schema())
    assert rep["verdict"] is None
    assert rep["stages"]["h_of_S"]["h_upper"]["value"] <= 0.05


def test_criterion_nmax_too_small(tmp_path):
    assert main(["criterion", "--group", "free:2", "--nmax", "8", "--quiet"]) == 3


def test_malformed_spec_no_report(tmp_path, capsys):
    out = tmp_path / "c.json"
    assert main(["criterion", "--group", "free:two", "--json", str(out)]) == 2
    assert not out.exists()
    assert "error" in capsys.readouterr().err


def test_budget_error_exit(tmp_path, capsys):
    assert main(["criterion", "--group", "free:2", "--radius", "8", "--max-vertices", "100", "--quiet"]) == 2
    assert "error" in capsys.readouterr().err


def test_unknown_flag():
    with pytest.raises(SystemExit) as exc:
        main(["witness", "--bogus"])
    assert exc.value.code == 2


def test_witness_paradoxical(tmp_path, capsys):
    out = tmp_path / "w.json"
    assert main(["witness", "--paradoxical-f2", "--json", str(out)]) == 0
    text = capsys.readouterr().out
    assert "sup H = -1/4" in text and "epsilon = 1/4" in text
    rep = load(out)
    jsonschema.validate(rep, schema())
    assert rep["stages"]["paradoxical"]["sup"]["exact"] == "-1/4"


def test_witness_iterate(tmp_path, capsys):
    out = tmp_path / "w.json"
    assert main(["witness", "--group", "zd:1", "--iterate", "box:10", "--m", "3", "--json", str(out)]) == 0
    assert "chain bound after 3 steps: 1/1000 (verified)" in capsys.readouterr().out
    jsonschema.validate(load(out), schema())


def test_witness_iterate_rejects_free(capsys):
    assert main(["witness", "--group", "free:2", "--iterate", "box:10"]) == 2


def test_percolate_outputs(tmp_path, monkeypatch):
    monkeypatch.setenv(SEED_ENV, "11")
    paths = {k: tmp_path / f"a.{k}" for k in ("csv", "json", "svg")}
    args = ["percolate", "--group", "free:2", "--set", "std", "--radius", "6", "--p", "0,0.4,1",
            "--samples", "200", "--probe-samples", "10", "--quiet"]
    code = main(args + [f"--{k}={v}" for k, v in paths.items()])
    assert code == 3
    rep = load(paths["json"])
    jsonschema.validate(rep, schema())
    assert rep["seed"] == 11
    assert rep["stages"]["pc_bound"]["pc_upper"]["value"] == pytest.approx(1 / 3)
    rows = paths["csv"].read_text().splitlines()
    assert rows[0] == "p,theta_hat,ci_lo,ci_hi,n_samples,boundary_clusters_mean"
    assert rows[1].split(",")[1] == "0.0" and rows[3].split(",")[1] == "1.0"
    assert paths["svg"].read_text().startswith("<svg")


def test_percolate_needs_grid():
    assert main(["percolate", "--group", "free:2", "--radius", "3", "--quiet"]) == 2


def test_percolate_heuristic_h_refused():
    assert main(["percolate", "--group", "free:2", "--radius", "3", "--p", "0.5", "--samples", "10",
                 "--h", "0.5", "--h-provenance", "heuristic", "--quiet"]) == 2
