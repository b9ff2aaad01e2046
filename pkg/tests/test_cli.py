import csv
import io
import json
import math
import subprocess
import sys
from fractions import Fraction

import numpy as np
import pytest

from gkbound import matgt
from gkbound.cli import main
from gkbound.series import TruncatedSeries


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_bound_json(capsys):
    code, out, _ = run(capsys, "bound", "--function", "grothendieck", "--order", "41")
    assert code == 0
    rep = json.loads(out)
    assert rep["bound"] == pytest.approx(math.pi / (2 * math.log(1 + math.sqrt(2))), abs=1e-9)
    assert rep["order"] == 41 and rep["notes"][0].startswith("order-41")


def test_bound_csv_to_file(capsys, tmp_path):
    path = tmp_path / "k.csv"
    code, out, _ = run(capsys, "bound", "--function", "kappa", "--format", "csv", "-o", str(path))
    assert code == 0 and out == ""
    row = next(csv.DictReader(io.StringIO(path.read_text())))
    assert float(row["bound"]) == pytest.approx(3.26425, abs=1e-5)


@pytest.mark.parametrize("argv", [
    ["bound", "--function", "grothendieck", "--order", "8"],
    ["bound", "--function", "nothing"],
    ["bound", "--function", "fk"],
    ["curve", "--function", "kappa", "--grid", "1"],
])
def test_domain_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and err.startswith("error:")


def test_argparse_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["bound"])
    assert exc.value.code == 2


def test_invert_catalan(capsys, tmp_path):
    src = tmp_path / "s.json"
    src.write_text(TruncatedSeries([Fraction(0), Fraction(1), Fraction(1)] + [Fraction(0)] * 8).to_json())
    code, out, _ = run(capsys, "invert", "--in", str(src), "--order", "10")
    assert code == 0
    inv = TruncatedSeries.from_json(out)
    assert list(inv.coeffs[1:]) == [(-1) ** (n - 1) * math.comb(2 * n - 2, n - 1) // n for n in range(1, 11)]


def test_invert_odd_file_and_csv(capsys, tmp_path):
    src = tmp_path / "sinh.csv"
    coeffs = [Fraction(0)] * 8
    for n in (1, 3, 5, 7):
        coeffs[n] = Fraction(1, math.factorial(n))
    src.write_text(TruncatedSeries(coeffs, "odd").to_csv())
    code, out, _ = run(capsys, "invert", "--in", str(src), "--format", "csv")
    assert code == 0
    inv = TruncatedSeries.from_csv(out)
    assert inv.parity == "odd"
    assert inv.coeffs[3] == Fraction(-1, 6) and inv.coeffs[5] == Fraction(3, 40)


def test_invert_not_invertible(capsys, tmp_path):
    src = tmp_path / "bad.json"
    src.write_text(TruncatedSeries([Fraction(1), Fraction(1)]).to_json())
    code, _, err = run(capsys, "invert", "--in", str(src))
    assert code == 2 and "NotInvertibleAtZero" in err
    code, _, _ = run(capsys, "invert", "--in", str(tmp_path / "missing.json"))
    assert code == 2


def test_wht(capsys):
    code, out, _ = run(capsys, "wht", "--m", "3", "--entry", "6", "4")
    entry = json.loads(out)
    assert code == 0 and entry["sign"] == -1 and entry["value"] == pytest.approx(-0.353553, abs=1e-6)
    _, out, _ = run(capsys, "wht", "--m", "1")
    assert np.allclose(matgt.read_matrix(out).data, np.array([[1, 1], [1, -1]]) / math.sqrt(2))
    _, out, _ = run(capsys, "wht", "--m", "2", "--complex")
    assert matgt.read_matrix(out).is_complex


def test_norm_files(capsys, tmp_path):
    a1 = tmp_path / "a1.txt"
    a1.write_text(matgt.write_matrix(matgt.a_had(1)))
    code, out, _ = run(capsys, "norm", "--matrix", str(a1))
    assert code == 0 and json.loads(out)["value_float"] == pytest.approx(1.0)
    eye = tmp_path / "eye.txt"
    eye.write_text(matgt.write_matrix(np.eye(4, dtype=np.int64)))
    _, out, _ = run(capsys, "norm", "--matrix", str(eye))
    assert json.loads(out)["value"] in (4, "4")
    big = tmp_path / "big.txt"
    big.write_text(matgt.write_matrix(np.ones((26, 26), dtype=np.int64)))
    code, _, err = run(capsys, "norm", "--matrix", str(big))
    assert code == 3 and "error" in err


def test_norm_had_search(capsys):
    _, out, _ = run(capsys, "norm", "--had", "3")
    assert json.loads(out)["value"] == "5/8"
    code, _, _ = run(capsys, "norm")
    assert code == 2


def test_verify_series(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "series", "--seed", "1")
    report = json.loads(out)
    assert code == 0 and report["passed"] and len(report["checks"]) > 20
    code, _, _ = run(capsys, "verify", "--suite", "matrix", "--seed", "1", "--samples", "10")
    assert code == 2


def test_verify_failure_exit_1(capsys, monkeypatch):
    from gkbound import verify
    monkeypatch.setattr(verify, "run", lambda *a: [verify.Check("x", False, -1.0)])
    code, out, _ = run(capsys, "verify", "--suite", "series", "--seed", "0")
    assert code == 1 and not json.loads(out)["passed"]


def test_curve(capsys):
    code, out, _ = run(capsys, "curve", "--function", "grothendieck", "--order", "21", "--grid", "5")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [float(r["rho"]) for r in rows] == [-1.0, -0.5, 0.0, 0.5, 1.0]
    mid = rows[3]
    assert float(mid["h"]) == pytest.approx(1 / 3, abs=1e-4)
    assert float(mid["h_inv_abs"]) == pytest.approx(math.sinh(math.pi / 4), abs=1e-10)
    assert float(mid["psi_hyp"]) == pytest.approx(2 / math.pi * math.asinh(0.5), abs=1e-10)


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "gkbound", "bound", "--function", "haagerup", "--order", "7"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["route"] == "invert-abs-root"
