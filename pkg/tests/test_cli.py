import csv
import io
import json
import math

import pytest

from ddestab.cli import run

ROTATED_STABLE = ["--lambda-re", "0.25", "--lambda-im", repr(math.pi / 4),
       "--gamma-re", repr(-(2 ** -0.5)), "--gamma-im", repr(-(2 ** -0.5))]


def _run(capsys, argv):
    code = run(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_check_json(capsys):
    code, out, _ = _run(capsys, ["check", *ROTATED_STABLE, "--tau", "1"])
    assert code == 0
    d = json.loads(out)
    assert d["status"] == "Stable" and d["case_tag"] == "RegionInterior"


def test_check_csv(capsys):
    code, out, _ = _run(capsys, ["check", *ROTATED_STABLE, "--tau", "1", "--format", "csv"])
    assert code == 0 and "Stable" in out


def test_check_deterministic(capsys):
    first = _run(capsys, ["check", *ROTATED_STABLE, "--tau", "1"])[1]
    second = _run(capsys, ["check", *ROTATED_STABLE, "--tau", "1"])[1]
    assert first == second


def test_validation_error_exit_code(capsys):
    code, out, err = _run(capsys, ["check", "--tau", "-1"])
    assert code == 2 and out == ""
    assert json.loads(err)["error"] == "validation"


def test_unknown_option(capsys):
    assert _run(capsys, ["check", "--tau", "1", "--nope", "1"])[0] == 2


def test_max_delay_pure_delay_case(capsys):
    code, out, _ = _run(capsys, ["max-delay", "--gamma-re", "-1", "--gamma-im", repr(8 ** -0.5)])
    assert code == 0
    d = json.loads(out)
    assert d["kind"] == "Finite"
    assert d["tau_star"] == pytest.approx(1.1605596684894709, abs=1e-14)


def test_max_delay_reduced_inputs(capsys):
    code, out, _ = _run(capsys, ["max-delay", "--a", "-2", "--eta-re", "0", "--eta-im", "1.9"])
    assert code == 0 and json.loads(out)["kind"] == "AlwaysStable"


def test_max_delay_rejects_rotating_lambda(capsys):
    assert _run(capsys, ["max-delay", "--lambda-im", "1", "--gamma-re", "-1"])[0] == 2


def test_boundary_csv(capsys):
    code, out, _ = _run(capsys, ["boundary", "--a", "0", "--tau", "1", "--samples", "50"])
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    upper = [r for r in rows if r["branch"] == "upper"]
    assert len(upper) == 50
    assert float(upper[-1]["w"]) == pytest.approx(math.pi / 2)
    assert float(upper[-1]["arg_eta"]) == pytest.approx(math.pi)


def test_boundary_to_file(tmp_path, capsys):
    path = tmp_path / "b.csv"
    code, out, _ = _run(capsys, ["boundary", "--a", "-1.5", "--tau", "1", "-o", str(path)])
    assert code == 0 and out == ""
    assert path.read_text().startswith("w,re_eta,im_eta,arg_eta,branch")


def test_roots(capsys):
    code, out, _ = _run(capsys, ["roots", *ROTATED_STABLE, "--tau", "1", "--k", "3"])
    assert code == 0
    d = json.loads(out)
    assert d["rhp_count"] == 0
    assert len(d["roots"]) == 3


def test_sweep_agreement(capsys):
    code, out, _ = _run(capsys, ["sweep", "--a", "-0.5", "--tau", "1", "--resolution", "15"])
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 225
    agree = sum(r["agree_flag"] == "true" for r in rows)
    assert agree / len(rows) >= 0.99
    assert float(rows[0]["re_eta"]) == -3 and float(rows[0]["im_eta"]) == -2
    assert float(rows[1]["re_eta"]) > -3 and float(rows[1]["im_eta"]) == -2


def test_sweep_bad_window(capsys):
    assert _run(capsys, ["sweep", "--a", "0", "--tau", "1", "--re-min", "1", "--re-max", "0"])[0] == 2


def test_simulate_json(capsys):
    code, out, _ = _run(capsys, ["simulate", *ROTATED_STABLE, "--tau", "1", "--format", "json"])
    assert code == 0
    d = json.loads(out)
    assert d["decay_rate"] < 0 and d["diverged"] is False


def test_simulate_csv(capsys):
    code, out, _ = _run(capsys, ["simulate", "--lambda-re", "-1", "--tau", "1", "--horizon", "2",
                                 "--steps-per-delay", "16"])
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["t", "re_x", "im_x", "abs_x"]
    assert len(rows) == 1 + 16 * 3 + 1


def test_simulate_insufficient_data_is_numeric_error(capsys):
    code, _, err = _run(capsys, ["simulate", "--lambda-re", "-1", "--tau", "1", "--horizon", "0.1",
                                 "--steps-per-delay", "16", "--format", "json"])
    assert code == 3
    assert json.loads(err)["error"] == "numeric"


def test_lemma2(capsys):
    code, out, _ = _run(capsys, ["lemma2", "--beta", "-0.3"])
    assert code == 0
    d = json.loads(out)
    assert d["r0"] == pytest.approx(1.0292118013715134, abs=1e-12)
