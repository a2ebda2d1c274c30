import csv
import json
import math
from pathlib import Path

import pytest

from beurling.cli import main

FIX = Path(__file__).parent / "fixtures"


def run(capsys, *args):
    code = main([str(a) for a in args])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_weight_check_exponential(capsys):
    code, out, _ = run(capsys, "weight-check", "--weight", FIX / "weight_exp2.json")
    d = json.loads(out)
    assert (d["rho"]["rho1"], d["rho"]["rho2"]) == (0.5, 2.0)
    assert code == 2  # not an AMAW without scaling


def test_weight_check_e_scaling(capsys):
    code, out, _ = run(capsys, "weight-check", "--weight", FIX / "weight_e.json", "--q", 2)
    d = json.loads(out)
    assert code == 2
    assert d["amaw"]["scaling_C"] == pytest.approx(d["amaw"]["conv_ratio_max"] ** 0.5)
    assert d["amaw"]["tail_sum"] == pytest.approx(1 / math.tanh(1), rel=1e-12)


def test_weight_check_real(capsys):
    code, out, _ = run(capsys, "weight-check", "--weight", FIX / "weight_r_exp.json")
    d = json.loads(out)
    assert (d["rho"]["rho1"], d["rho"]["rho2"]) == (-1.0, 1.0)


def test_weight_check_malformed(capsys):
    code, _, err = run(capsys, "weight-check", "--weight", FIX / "malformed.json")
    assert code == 1 and "parse error" in err


def test_missing_file(capsys):
    code, _, err = run(capsys, "weight-check", "--weight", FIX / "nope.json")
    assert code == 1 and "error" in err


def test_bad_parameter(capsys):
    code, _, err = run(capsys, "weight-check", "--weight", FIX / "weight_exp2.json", "--gamma", 1.5)
    assert code == 1 and "gamma" in err


def _rows(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def test_invert_two_plus_z(capsys, tmp_path):
    code, out, _ = run(capsys, "invert", "--weight", FIX / "weight_exp2.json", "--sequence", FIX / "seq_2pz.json",
                       "--out", tmp_path)
    assert code == 0
    rows = {int(r["n"]): r for r in _rows(tmp_path / "invert.csv")}
    assert abs(float(rows[3]["norm_g"]) - 0.0625) <= 1e-10
    ordered = [int(r["n"]) for r in _rows(tmp_path / "invert.csv")]
    assert ordered == sorted(ordered, key=lambda n: (abs(n), n))
    assert json.loads((tmp_path / "invert.json").read_text()) == json.loads(out)


def test_invert_identity_single_row(capsys, tmp_path):
    code, _, _ = run(capsys, "invert", "--weight", FIX / "weight_exp2.json", "--sequence", FIX / "seq_identity.json",
                     "--out", tmp_path)
    assert code == 0
    rows = _rows(tmp_path / "invert.csv")
    assert len(rows) == 1 and rows[0]["n"] == "0"


def test_invert_not_invertible(capsys):
    code, _, err = run(capsys, "invert", "--weight", FIX / "weight_exp2.json", "--sequence", FIX / "seq_zm1.json")
    assert code == 1
    d = json.loads(err)
    re, im = d["worst_node"]
    assert abs(complex(re, im) - 1) < 1e-9


def test_matrix_decay_bidiagonal(capsys, tmp_path):
    code, out, _ = run(capsys, "matrix-decay", "--weight", FIX / "weight_exp2.json", "--operator",
                       FIX / "op_bidiagonal.json", "--epsilon", 0.05, "--out", tmp_path)
    d = json.loads(out)
    assert code == 0
    assert d["verdict_omega"] == "divergent trend" and d["verdict_nu"] == "convergent"
    assert (tmp_path / "decay_omega.csv").exists() and (tmp_path / "decay_nu.csv").exists()


def test_matrix_decay_identity(capsys):
    code, out, _ = run(capsys, "matrix-decay", "--weight", FIX / "weight_exp2.json", "--operator",
                       FIX / "op_identity.json")
    d = json.loads(out)
    assert code == 0 and d["verdict_omega"] == d["verdict_nu"] == "convergent"


def test_matrix_decay_singular(capsys):
    code, _, err = run(capsys, "matrix-decay", "--weight", FIX / "weight_exp2.json", "--operator",
                       FIX / "op_singular.json", "--r1", 0.5, "--r2", 2)
    assert code == 1 and "condition" in err


def test_construct_nu(capsys, tmp_path):
    code, out, _ = run(capsys, "construct-nu", "--weight", FIX / "weight_exp2.json", "--p", 2, "--r1", 0.5,
                       "--r2", 2, "--out", tmp_path)
    d = json.loads(out)
    assert code == 0 and d["certified"] and d["nu"]["case_tag"] == "interior"
    assert len(_rows(tmp_path / "nu.csv")) == 129


def test_construct_nu_table_flagged(capsys, tmp_path):
    spec = tmp_path / "w.json"
    spec.write_text(json.dumps({"kind": "table", "values": [4, 2, 1, 2, 4]}))
    code, _, err = run(capsys, "construct-nu", "--weight", spec)
    assert code == 1 and "force" in err
    code, out, _ = run(capsys, "construct-nu", "--weight", spec, "--force-estimates")
    assert code == 2 and json.loads(out)["nu"]["estimated"]


def test_invert_real(capsys, tmp_path):
    code, out, _ = run(capsys, "invert-real", "--weight", FIX / "weight_r_exp.json", "--samples",
                       FIX / "samples_gauss.json", "--out", tmp_path)
    d = json.loads(out)
    assert code == 0 and d["residual"] <= 1e-6
    assert (tmp_path / "invert_real.csv").exists()
