import json
import subprocess
import sys
from fractions import Fraction

import pytest

from nondiv import serialize as se
from nondiv.cli import main

F = Fraction

FIX = "fixtures"


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_delta_sl4_pushed(capsys):
    code, out, err = run(capsys, "delta",
                         "--scenario", f"{FIX}/sl4_so21.json",
                         "--lattice", f"{FIX}/sl4_pushed_t_half.json")
    assert code == 0
    doc = json.loads(out)
    assert doc["delta_sq_pow"] == se.rat_str(F(1, 64) ** 12)
    assert doc["witness_hnf"] == [[1, 0, 0, 0]]
    assert doc["complete"] is True


def test_delta_z4_under_scenario(capsys):
    code, out, _ = run(capsys, "delta",
                       "--scenario", f"{FIX}/sl4_so21.json",
                       "--lattice", f"{FIX}/z4.json")
    assert code == 0
    doc = json.loads(out)
    assert doc["delta_float"] == 1.0
    assert doc["complete"] is True


def test_drive_z4_zero_rows(capsys):
    code, out, _ = run(capsys, "drive",
                       "--scenario", f"{FIX}/sl4_so21.json",
                       "--lattice", f"{FIX}/z4.json")
    assert code == 0
    doc = json.loads(out)
    assert doc["terminated"] == "ReachedEta0"
    assert doc["steps"] == []


def test_oracle_z4(capsys):
    code, out, _ = run(capsys, "oracle", "--lattice", f"{FIX}/z4.json",
                       "--hnf-bound", "2")
    assert code == 0
    assert json.loads(out)["verdict"] == "AGREE"


def test_delta_output_roundtrip(tmp_path, capsys):
    out_path = tmp_path / "cert.json"
    code, _, _ = run(capsys, "delta",
                     "--scenario", f"{FIX}/sl4_so21.json",
                     "--lattice", f"{FIX}/sl4_t_quarter.json",
                     "--output", str(out_path))
    assert code == 0
    text = out_path.read_text(encoding="utf-8")
    doc = json.loads(text)
    # re-emitting the parsed document must reproduce the bytes
    assert se.dumps_json(doc) == text
    assert se.parse_rat(doc["delta_sq_pow"], "x") == F(1, 4096) ** 12


def test_drive_reaches_floor(capsys):
    code, out, _ = run(capsys, "drive",
                       "--scenario", f"{FIX}/sl4_so21.json",
                       "--lattice", f"{FIX}/sl4_t_eighth.json")
    assert code == 0
    doc = json.loads(out)
    assert doc["terminated"] == "ReachedEta0"
    assert doc["eta0_sq"] == "1/16"
    assert len(doc["steps"]) == 3
    floats = [doc["initial"]["delta_float"]] + [r["delta_float"] for r in doc["steps"]]
    assert floats == sorted(floats)
    assert doc["composed_torus"] == ["512/1", "1/8"]
    cols = doc["final_basis_columns"]
    assert all(cols[j][i] == ("1/1" if i == j else "0/1")
               for i in range(4) for j in range(4))


def test_drive_csv(tmp_path, capsys):
    out_path = tmp_path / "traj.csv"
    code, _, _ = run(capsys, "drive",
                     "--scenario", f"{FIX}/sl4_so21.json",
                     "--lattice", f"{FIX}/sl4_pushed_t_half.json",
                     "--format", "csv", "--output", str(out_path))
    assert code == 0
    raw = out_path.read_bytes()
    assert b"\r\n" in raw
    lines = raw.decode("utf-8").split("\r\n")
    assert lines[0] == "step,delta_num,delta_den_pow,delta_float,case_tag,torus_scalars,witness_hnf"
    row = lines[1].split(",", 5)
    assert row[0] == "1" and row[1] == "1" and row[2] == "1"


def test_drive_max_steps_zero(capsys):
    code, out, _ = run(capsys, "drive",
                       "--scenario", f"{FIX}/sl4_so21.json",
                       "--lattice", f"{FIX}/sl4_pushed_t_half.json",
                       "--max-steps", "0")
    assert code == 4
    doc = json.loads(out)
    assert doc["terminated"] == "MaxSteps"
    assert doc["steps"] == []


def test_drive_eta0_flag_overrides_config(capsys):
    # floor below the current delta: nothing to do
    code, out, _ = run(capsys, "drive",
                       "--scenario", f"{FIX}/sl4_so21.json",
                       "--lattice", f"{FIX}/sl4_pushed_t_half.json",
                       "--eta0", "1/16")
    assert code == 0
    doc = json.loads(out)
    assert doc["steps"] == []
    assert doc["eta0_sq"] == "1/256"


def test_drive_budget_flag_incomplete(capsys):
    code, out, _ = run(capsys, "drive",
                       "--scenario", f"{FIX}/sl4_so21.json",
                       "--lattice", f"{FIX}/sl4_pushed_t_half.json",
                       "--vector-budget", "5")
    assert code == 5
    assert json.loads(out)["terminated"] == "IncompleteSearch"


def test_budget_env_and_flag_precedence(capsys, monkeypatch):
    monkeypatch.setenv("NONDIV_VECTOR_BUDGET", "5")
    code, _, _ = run(capsys, "delta",
                     "--scenario", f"{FIX}/sl4_so21.json",
                     "--lattice", f"{FIX}/sl4_pushed_t_half.json")
    assert code == 3  # env starves the search, partial result
    code, out, _ = run(capsys, "delta",
                       "--scenario", f"{FIX}/sl4_so21.json",
                       "--lattice", f"{FIX}/sl4_pushed_t_half.json",
                       "--vector-budget", "100000")
    assert code == 0  # flag wins over env
    assert json.loads(out)["complete"] is True
    monkeypatch.setenv("NONDIV_VECTOR_BUDGET", "junk")
    code, _, err = run(capsys, "delta",
                       "--scenario", f"{FIX}/sl4_so21.json",
                       "--lattice", f"{FIX}/sl4_pushed_t_half.json")
    assert code == 2 and "NONDIV_VECTOR_BUDGET" in err


def test_delta_incomplete_prints_partial(capsys):
    code, out, _ = run(capsys, "delta",
                       "--scenario", f"{FIX}/sl4_so21.json",
                       "--lattice", f"{FIX}/sl4_pushed_t_half.json",
                       "--vector-budget", "5")
    assert code == 3
    doc = json.loads(out)
    assert doc["complete"] is False
    assert se.parse_rat(doc["delta_sq_pow"], "x") <= 1


def test_overlapping_blocks_fixture(capsys):
    code, _, err = run(capsys, "delta",
                       "--scenario", f"{FIX}/err_overlapping_blocks.json",
                       "--lattice", f"{FIX}/z4.json")
    assert code == 2
    assert "[2, 4]" in err and "overlap" in err


def test_bad_determinant_fixture(capsys):
    code, _, err = run(capsys, "delta", "--lattice", f"{FIX}/err_bad_determinant.json")
    assert code == 2
    assert "determinant" in err


def test_oracle_dimension_cap(capsys):
    code, _, err = run(capsys, "oracle", "--lattice", f"{FIX}/z6.json")
    assert code == 2
    assert "dimension" in err


def test_oracle_agreement(capsys):
    code, out, _ = run(capsys, "oracle",
                       "--lattice", f"{FIX}/random_n3_seed20260815.json")
    assert code == 0
    doc = json.loads(out)
    assert doc["verdict"] == "AGREE"
    assert doc["search"]["delta_sq_pow"] == doc["oracle"]["delta_sq_pow"]


def test_oracle_sl4_scenario(capsys):
    code, out, _ = run(capsys, "oracle",
                       "--scenario", f"{FIX}/sl4_so21.json",
                       "--lattice", f"{FIX}/sl4_pushed_t_half.json")
    assert code == 0
    assert json.loads(out)["verdict"] == "AGREE"


def test_shortvec_squash(capsys):
    code, out, _ = run(capsys, "shortvec",
                       "--lattice", f"{FIX}/squash_n2_k6.json",
                       "--bound-sq", "1/256")
    assert code == 0
    doc = json.loads(out)
    assert doc["count"] == 4
    assert doc["vectors"][0]["coords"] == [1, 0]
    assert doc["vectors"][0]["norm_sq"] == "1/4096"


def test_csv_rejected_outside_drive(capsys):
    code, _, err = run(capsys, "delta", "--lattice", f"{FIX}/z4.json",
                       "--format", "csv")
    assert code == 2
    assert "format" in err


def test_seed_echoed(capsys):
    code, out, _ = run(capsys, "delta", "--lattice", f"{FIX}/z4.json",
                       "--seed", "7")
    assert code == 0
    assert json.loads(out)["seed"] == 7


def test_malformed_json_diagnostic(tmp_path, capsys):
    p = tmp_path / "broken.json"
    p.write_text('{"dimension": 2,\n  "basis_columns": [[}', encoding="utf-8")
    code, _, err = run(capsys, "delta", "--lattice", str(p))
    assert code == 2
    assert "line 2" in err


def test_unknown_config_field(tmp_path, capsys):
    p = tmp_path / "sc.json"
    p.write_text(json.dumps({
        "dimension": 2, "blocks": [[1, 1], [2, 2]], "m_generators": [],
        "config": {"etaO": "1/4"}}), encoding="utf-8")
    code, _, err = run(capsys, "delta", "--scenario", str(p),
                       "--lattice", f"{FIX}/squash_n2_k6.json")
    assert code == 2
    assert "config.etaO" in err


def test_scenario_lattice_dimension_mismatch(capsys):
    code, _, err = run(capsys, "delta",
                       "--scenario", f"{FIX}/sl4_so21.json",
                       "--lattice", f"{FIX}/squash_n2_k6.json")
    assert code == 2
    assert "dimension" in err


def test_isomorphy_warning_on_explicit_scenario(capsys):
    code, _, err = run(capsys, "delta",
                       "--scenario", f"{FIX}/trivial_n2.json",
                       "--lattice", f"{FIX}/squash_n2_k6.json")
    assert code == 0
    assert "isomorphic" in err
    # the built-in fallback stays quiet
    code, _, err = run(capsys, "delta", "--lattice", f"{FIX}/squash_n2_k6.json")
    assert code == 0
    assert err == ""


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "nondiv", "delta", "--lattice", f"{FIX}/z4.json"],
        capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["delta_sq_pow"] == "1/1"


def test_drive_trivial_squash_family(capsys):
    # unit blocks, no group: every coordinate line is eligible
    code, out, _ = run(capsys, "drive",
                       "--scenario", f"{FIX}/trivial_n2.json",
                       "--lattice", f"{FIX}/squash_n2_k6.json")
    assert code == 0
    doc = json.loads(out)
    assert doc["terminated"] == "ReachedEta0"
    assert doc["eta0_sq"] == "1/256"
    s = F(1)
    for row in doc["steps"]:
        s *= se.parse_rat(row["torus_scalars"][0], "s")
    b = [[se.parse_rat(x, "b") for x in col] for col in doc["final_basis_columns"]]
    assert b[0][0] == F(1, 64) * s
