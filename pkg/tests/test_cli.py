import json
import os
from pathlib import Path

import pytest

from loggas.cli import main

HERE = Path(__file__).parent
INPUTS = HERE / "inputs"
GOLDEN = HERE / "golden"


@pytest.fixture(autouse=True)
def single_thread(monkeypatch):
    monkeypatch.setenv("LOGGAS_THREADS", "1")


def run(args):
    return main([str(a) for a in args])


def compare_json(produced: Path, golden: Path):
    assert json.loads(produced.read_text()) == json.loads(golden.read_text())


def compare_text(produced: Path, golden: Path):
    assert produced.read_text() == golden.read_text()


# ---------------------------------------------------------------------------
# Golden-file coverage of every subcommand
# ---------------------------------------------------------------------------

def test_golden_critical(tmp_path):
    out = tmp_path / "report.json"
    assert run(["critical", "--input", INPUTS / "ex72_charges.json", "--out", out]) == 0
    compare_json(out, GOLDEN / "critical_ex72.json")


def test_golden_bounds(tmp_path):
    out = tmp_path / "report.json"
    assert run(["bounds", "--input", INPUTS / "mixed_charges.json", "--out", out]) == 0
    compare_json(out, GOLDEN / "bounds_mixed.json")


def test_golden_closed_form_two_component(tmp_path):
    out = tmp_path / "report.json"
    assert run(["closed-form", "--input", INPUTS / "two_component_2332.json", "--out", out]) == 0
    compare_json(out, GOLDEN / "closed_form_tc.json")


def test_golden_closed_form_onsager(tmp_path):
    out = tmp_path / "report.json"
    assert run(["closed-form", "--input", INPUTS / "onsager_six.json", "--out", out]) == 0
    compare_json(out, GOLDEN / "closed_form_onsager.json")


def test_golden_arboricity(tmp_path):
    out = tmp_path / "report.json"
    assert run(["arboricity", "--input", INPUTS / "c5_graph.json", "--out", out]) == 0
    compare_json(out, GOLDEN / "arboricity_c5.json")


def test_golden_sk_check(tmp_path):
    out = tmp_path / "report.json"
    assert run(["sk-check", "--input", INPUTS / "sk_matrix.json", "--out", out]) == 0
    compare_json(out, GOLDEN / "sk_check.json")


def test_golden_mc_partition(tmp_path):
    out = tmp_path / "sweep.csv"
    code = run(["mc-partition", "--input", INPUTS / "pair_c1.json",
                "--beta-grid", " -0.4:0.8:4", "--samples", 2000, "--seed", 9,
                "--out", out])
    assert code == 0
    compare_text(out, GOLDEN / "mc_partition.csv")


def test_golden_mc_gibbs(tmp_path):
    out = tmp_path / "collapse.csv"
    code = run(["mc-gibbs", "--input", INPUTS / "mixed_charges.json",
                "--beta-grid", "0.5", "--steps", 3000, "--burn-in", 500,
                "--thin", 5, "--seed", 11, "--out", out])
    assert code == 0
    compare_text(out, GOLDEN / "mc_gibbs.csv")


def test_golden_ensemble(tmp_path):
    out = tmp_path / "ensemble.json"
    code = run(["ensemble", "--model", "gaussian_charges", "--n", 5,
                "--trials", 5, "--seed", 2, "--out", out])
    assert code == 0
    compare_json(out, GOLDEN / "ensemble_charges.json")


# ---------------------------------------------------------------------------
# Exit codes and validation
# ---------------------------------------------------------------------------

def test_exit_2_on_unknown_key(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"matrix": [[0,1],[1,0]], "unexpected": 1}')
    assert run(["critical", "--input", bad]) == 2


def test_exit_2_on_asymmetric_matrix(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"matrix": [[0,1],[2,0]]}')
    assert run(["critical", "--input", bad]) == 2


def test_exit_2_on_missing_file():
    assert run(["critical", "--input", "/nonexistent/input.json"]) == 2


def test_exit_2_when_exact_mode_needs_rationals(tmp_path):
    floats = tmp_path / "floats.json"
    floats.write_text('{"matrix": [[0, 1.5], [1.5, 0]]}')
    assert run(["critical", "--input", floats, "--mode", "exact"]) == 2


def test_exit_3_on_oversized_instance(tmp_path):
    big = tmp_path / "big.json"
    big.write_text('{"random": {"model": "couplings", "n": 27, "variance": 1.0, "seed": 0}}')
    assert run(["critical", "--input", big]) == 3


def test_exit_3_on_ensemble_size_cap():
    assert run(["ensemble", "--model", "gaussian_couplings", "--n", 21, "--trials", 1]) == 3


def test_exit_4_when_grid_leaves_interval(tmp_path):
    out = tmp_path / "sweep.csv"
    code = run(["mc-partition", "--input", INPUTS / "pair_c1.json",
                "--beta-grid", " -1.0:0.5:4", "--samples", 2000, "--out", out])
    assert code == 4


def test_exit_4_on_failed_onsager_conditions(tmp_path):
    bad = tmp_path / "wide.json"
    bad.write_text('{"charges": [1, 1.6, -1, -1]}')
    assert run(["closed-form", "--input", bad]) == 4


def test_mc_partition_appends_pole_fit(tmp_path):
    out = tmp_path / "toward.csv"
    code = run(["mc-partition", "--input", INPUTS / "pair_c1.json",
                "--beta-grid", " -0.5,-0.8,-0.9,-0.95,-0.98", "--samples", 20000,
                "--seed", 5, "--out", out])
    assert code == 0
    text = out.read_text()
    assert "# pole_fit_beta_crit=-1.0" in text
    assert "# pole_fit_kappa=" in text


def test_threads_do_not_change_results(tmp_path, monkeypatch):
    outs = []
    for threads in ("1", "3"):
        monkeypatch.setenv("LOGGAS_THREADS", threads)
        out = tmp_path / f"ens_{threads}.json"
        assert run(["ensemble", "--model", "gaussian_couplings", "--n", 6,
                    "--trials", 8, "--seed", 4, "--out", out]) == 0
        outs.append(json.loads(out.read_text()))
    assert outs[0] == outs[1]


def test_report_schema_is_versioned(tmp_path):
    out = tmp_path / "report.json"
    run(["critical", "--input", INPUTS / "pair_c1.json", "--out", out])
    doc = json.loads(out.read_text())
    assert doc["schema_version"] == 1
    assert doc["beta_plus"] == "inf"
    assert doc["beta_minus"] == "-1"


def test_float_mode_on_exact_input(tmp_path):
    out = tmp_path / "report.json"
    assert run(["critical", "--input", INPUTS / "ex72_charges.json",
                "--mode", "float", "--out", out]) == 0
    doc = json.loads(out.read_text())
    assert doc["mode"] == "float"
    assert doc["beta_minus"] == -0.01
    assert doc["g_minus"] == [[1, 2]]
