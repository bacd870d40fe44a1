import json

import pytest

from actionbound import cli


def _strip_meta(text):
    lines = [ln for ln in text.splitlines() if not ln.startswith("#meta")]
    return "\n".join(",".join(ln.split(",")[:-1]) if not ln.startswith("#") else ln for ln in lines)


def test_list(capsys):
    assert cli.main(["list"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0].startswith("adiabatic_rotating_z")
    assert len(out) == 22


def test_run_json(tmp_path):
    out = tmp_path / "r.json"
    assert cli.main(["run", "--scenario", "rwa_qubit", "--out", str(out)]) == 0
    d = json.loads(out.read_text())
    assert d["bound_value"] == pytest.approx(0.0015)
    assert d["holds"] is True


def test_run_unknown_scenario(capsys):
    assert cli.main(["run", "--scenario", "nope"]) == 1
    assert "rwa_qubit" in capsys.readouterr().err


def test_run_bad_param(capsys):
    assert cli.main(["run", "--scenario", "rwa_qubit", "--param", "zzz=1"]) == 1


def test_run_isospectral_positional(tmp_path):
    out = tmp_path / "r.json"
    assert cli.main(["run", "--scenario", "isospectral_divergence", "h=Z", "g=1.1*Z", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["actual"] >= 2 ** 0.5


def test_run_violation_exit_code(tmp_path):
    # a negative slack turns a tight inequality into a reported violation
    assert cli.main(["run", "--scenario", "rwa_qubit", "--tol", "-1", "--out", str(tmp_path / "x")]) == 2


def test_params_file(tmp_path):
    pf = tmp_path / "p.json"
    pf.write_text(json.dumps({"n": 16}))
    out = tmp_path / "r.json"
    assert cli.main(["run", "--scenario", "trotter_periodic", "--params-file", str(pf), "--out", str(out)]) == 0
    assert json.loads(out.read_text())["params"]["n"] == 16


def test_sweep_csv_slope(tmp_path):
    out = tmp_path / "s.csv"
    assert cli.main(["sweep", "--scenario", "trotter_periodic", "--vary", "n", "--values", "8:128:5:log",
                     "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("#meta")
    assert lines[1] == cli.SWEEP_HEADER
    assert [ln.split(",")[0] for ln in lines[2:7]] == ["8", "16", "32", "64", "128"]
    slope = float(lines[-1].split()[1].split("=")[1])
    assert -1.15 <= slope <= -0.85


def test_sweep_single_value_has_no_slope(tmp_path):
    out = tmp_path / "s.csv"
    assert cli.main(["sweep", "--scenario", "trotter_periodic", "--values", "8", "--out", str(out)]) == 0
    assert not any(ln.startswith("# slope") for ln in out.read_text().splitlines())


def test_sweep_deterministic_with_seed(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["sweep", "--scenario", "random_trotter", "--values", "16,32", "--seed", "5", "trials=50"]
    assert cli.main(args + ["--out", str(a)]) == 0
    assert cli.main(args + ["--out", str(b), "--jobs", "2"]) == 0
    assert _strip_meta(a.read_text()) == _strip_meta(b.read_text())


def test_sweep_json_and_bad_range(tmp_path, capsys):
    out = tmp_path / "s.json"
    assert cli.main(["sweep", "--scenario", "strong_coupling", "--values", "25,50", "--format", "json",
                     "--out", str(out)]) == 0
    d = json.loads(out.read_text())
    assert d["axis"] == "kappa" and len(d["rows"]) == 2 and d["slope_fit"] is None
    assert cli.main(["sweep", "--scenario", "strong_coupling", "--values", "1:2"]) == 1


def test_parse_values():
    assert cli.parse_values("1,2, 3") == [1.0, 2.0, 3.0]
    assert cli.parse_values("1:100:3:log") == pytest.approx([1, 10, 100])
    assert cli.parse_values("0:1:3") == pytest.approx([0, 0.5, 1])
